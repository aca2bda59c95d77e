#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "cumcal/kernels.hpp"
#include "kernels_simd.hpp"

namespace cumcal::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(CUMCAL_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

bool forced_scalar() noexcept {
  const char* value = std::getenv("CUMCAL_KERNELS");
  return value != nullptr && std::string(value) == "scalar";
}

KernelTable select() noexcept {
  if (!forced_scalar()) {
    if (auto table = table_for(Backend::Avx2)) {
      return *table;
    }
    if (auto table = table_for(Backend::Neon)) {
      return *table;
    }
  }
  return *table_for(Backend::Scalar);
}

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    throw std::invalid_argument("kernel operands differ in length");
  }
}

}  // namespace

std::string_view backend_name(Backend backend) noexcept {
  switch (backend) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "unknown";
}

std::optional<KernelTable> table_for(Backend backend) noexcept {
  switch (backend) {
    case Backend::Scalar:
      return KernelTable{Backend::Scalar, scalar::prediction_terms, scalar::prediction_errors,
                         scalar::max_abs, scalar::bridged_max_abs};
    case Backend::Avx2:
#if defined(CUMCAL_HAVE_AVX2_TU)
      if (cpu_has_avx2()) {
        return KernelTable{Backend::Avx2, avx2::prediction_terms, avx2::prediction_errors,
                           avx2::max_abs, avx2::bridged_max_abs};
      }
#endif
      return std::nullopt;
    case Backend::Neon:
#if defined(CUMCAL_HAVE_NEON_TU)
      return KernelTable{Backend::Neon, neon::prediction_terms, neon::prediction_errors,
                         neon::max_abs, neon::bridged_max_abs};
#else
      return std::nullopt;
#endif
  }
  return std::nullopt;
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::Scalar};
  for (Backend b : {Backend::Avx2, Backend::Neon}) {
    if (table_for(b)) {
      out.push_back(b);
    }
  }
  return out;
}

const KernelTable& active() noexcept {
  static const KernelTable table = select();
  return table;
}

void prediction_terms(std::span<const double> predictions, std::span<const std::uint8_t> outcomes,
                      std::span<double> variance, std::span<double> error) {
  require_same_length(predictions.size(), outcomes.size());
  require_same_length(predictions.size(), variance.size());
  require_same_length(predictions.size(), error.size());
  active().prediction_terms(predictions.data(), outcomes.data(), predictions.size(),
                            variance.data(), error.data());
}

void prediction_errors(std::span<const double> predictions,
                       std::span<const std::uint8_t> outcomes, std::span<double> error) {
  require_same_length(predictions.size(), outcomes.size());
  require_same_length(predictions.size(), error.size());
  active().prediction_errors(predictions.data(), outcomes.data(), predictions.size(),
                             error.data());
}

Extremum max_abs(std::span<const double> values) {
  return active().max_abs(values.data(), values.size());
}

Extremum bridged_max_abs(std::span<const double> walk, std::span<const double> times,
                         double terminal) {
  require_same_length(walk.size(), times.size());
  return active().bridged_max_abs(walk.data(), times.data(), walk.size(), terminal);
}

void compensated_prefix_sum(std::span<const double> in, std::span<double> out) {
  require_same_length(in.size(), out.size());
  double sum = 0.0;
  double compensation = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double x = in[i];
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      compensation += (sum - t) + x;
    } else {
      compensation += (x - t) + sum;
    }
    sum = t;
    out[i] = sum + compensation;
  }
}

double compensated_sum(std::span<const double> in) {
  double sum = 0.0;
  double compensation = 0.0;
  for (const double x : in) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      compensation += (sum - t) + x;
    } else {
      compensation += (x - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

}  // namespace cumcal::kernels
