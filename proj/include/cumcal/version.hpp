#pragma once

namespace cumcal {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cumcal
