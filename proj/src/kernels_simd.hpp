#pragma once

// Internal declarations of the ISA-specific kernel variants. Each namespace
// is only defined when its translation unit is part of the build.

#include "cumcal/kernels.hpp"

namespace cumcal::kernels::avx2 {
void prediction_terms(const double* p, const std::uint8_t* y, std::size_t n, double* variance,
                      double* error);
void prediction_errors(const double* p, const std::uint8_t* y, std::size_t n, double* error);
Extremum max_abs(const double* v, std::size_t n);
Extremum bridged_max_abs(const double* walk, const double* times, std::size_t n, double terminal);
}  // namespace cumcal::kernels::avx2

namespace cumcal::kernels::neon {
void prediction_terms(const double* p, const std::uint8_t* y, std::size_t n, double* variance,
                      double* error);
void prediction_errors(const double* p, const std::uint8_t* y, std::size_t n, double* error);
Extremum max_abs(const double* v, std::size_t n);
Extremum bridged_max_abs(const double* walk, const double* times, std::size_t n, double terminal);
}  // namespace cumcal::kernels::neon
