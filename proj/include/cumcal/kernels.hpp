#pragma once

// Data-parallel inner loops of the cumulative-error walk.
//
// Every kernel has a scalar reference implementation and, where the build
// target allows it, an AVX2 (x86-64) or NEON (aarch64) variant. The variant
// is chosen once at runtime from the CPU feature set; setting the
// environment variable CUMCAL_KERNELS=scalar forces the reference path.
// All variants are required to be bit-identical to the scalar reference:
// they perform the same IEEE operations in the same order per element and
// the reductions only compare, never accumulate.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace cumcal::kernels {

enum class Backend { Scalar, Avx2, Neon };

/// Largest absolute value of a sequence and the smallest index attaining it.
struct Extremum {
  std::size_t index = 0;
  double value = 0.0;

  friend bool operator==(const Extremum&, const Extremum&) = default;
};

struct KernelTable {
  Backend backend = Backend::Scalar;
  // variance[i] = p[i] * (1 - p[i]);  error[i] = y[i] - p[i]
  void (*prediction_terms)(const double* p, const std::uint8_t* y, std::size_t n, double* variance,
                           double* error) = nullptr;
  // error[i] = y[i] - p[i]
  void (*prediction_errors)(const double* p, const std::uint8_t* y, std::size_t n,
                            double* error) = nullptr;
  Extremum (*max_abs)(const double* v, std::size_t n) = nullptr;
  // max_i |walk[i] - times[i] * terminal|
  Extremum (*bridged_max_abs)(const double* walk, const double* times, std::size_t n,
                              double terminal) = nullptr;
};

std::string_view backend_name(Backend backend) noexcept;

/// Kernel table for a specific backend, or nullopt when this build or CPU lacks it.
std::optional<KernelTable> table_for(Backend backend) noexcept;

/// Backends usable on this machine; Scalar is always first.
std::vector<Backend> available_backends();

/// The table selected for this process.
const KernelTable& active() noexcept;

void prediction_terms(std::span<const double> predictions, std::span<const std::uint8_t> outcomes,
                      std::span<double> variance, std::span<double> error);
void prediction_errors(std::span<const double> predictions,
                       std::span<const std::uint8_t> outcomes, std::span<double> error);
Extremum max_abs(std::span<const double> values);
Extremum bridged_max_abs(std::span<const double> walk, std::span<const double> times,
                         double terminal);

// Prefix sums are a serial dependency chain, so there is only a scalar
// version. Neumaier compensation keeps the relative error of each prefix at
// a few ulps independent of n.
void compensated_prefix_sum(std::span<const double> in, std::span<double> out);
double compensated_sum(std::span<const double> in);

namespace scalar {
void prediction_terms(const double* p, const std::uint8_t* y, std::size_t n, double* variance,
                      double* error);
void prediction_errors(const double* p, const std::uint8_t* y, std::size_t n, double* error);
Extremum max_abs(const double* v, std::size_t n);
Extremum bridged_max_abs(const double* walk, const double* times, std::size_t n, double terminal);
}  // namespace scalar

}  // namespace cumcal::kernels
