#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace cumcal::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kUsage = 2 };

/// Runs the command line `args` (without the program name). Output files
/// go under --out, or $CUMCAL_OUTPUT_DIR, or ./cumcal-out.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

/// Comma-separated reals; each item may be a fraction such as -1/4.
std::vector<double> parse_real_grid(const std::string& text);
/// Comma-separated positive integers.
std::vector<std::size_t> parse_size_grid(const std::string& text);

}  // namespace cumcal::cli
