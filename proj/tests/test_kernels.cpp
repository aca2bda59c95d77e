#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cumcal/kernels.hpp"

using namespace cumcal::kernels;

namespace {

struct Inputs {
  std::vector<double> p;
  std::vector<std::uint8_t> y;
  std::vector<double> walk;
  std::vector<double> times;
};

Inputs make_inputs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Inputs in;
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    in.p.push_back(std::clamp(u(engine), 1e-9, 1.0 - 1e-9));
    in.y.push_back(u(engine) < 0.4 ? 1 : 0);
    in.walk.push_back(4.0 * u(engine) - 2.0);
    t += u(engine) + 1e-3;
    in.times.push_back(t);
  }
  for (double& v : in.times) {
    v /= t;
  }
  return in;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) {
      return false;
    }
  }
  return true;
}

void check_backend_against_scalar(const KernelTable& table, const Inputs& in, double terminal) {
  const std::size_t n = in.p.size();
  std::vector<double> var_ref(n), err_ref(n), var(n), err(n), err_only(n);
  scalar::prediction_terms(in.p.data(), in.y.data(), n, var_ref.data(), err_ref.data());
  table.prediction_terms(in.p.data(), in.y.data(), n, var.data(), err.data());
  table.prediction_errors(in.p.data(), in.y.data(), n, err_only.data());
  REQUIRE(same_bits(var, var_ref));
  REQUIRE(same_bits(err, err_ref));
  REQUIRE(same_bits(err_only, err_ref));
  REQUIRE(table.max_abs(in.walk.data(), n) == scalar::max_abs(in.walk.data(), n));
  REQUIRE(table.bridged_max_abs(in.walk.data(), in.times.data(), n, terminal) ==
          scalar::bridged_max_abs(in.walk.data(), in.times.data(), n, terminal));
}

}  // namespace

TEST_CASE("scalar reference kernels") {
  const std::vector<double> p{0.2, 0.6};
  const std::vector<std::uint8_t> y{0, 1};
  std::vector<double> var(2), err(2);
  scalar::prediction_terms(p.data(), y.data(), 2, var.data(), err.data());
  CHECK(var[0] == 0.2 * (1.0 - 0.2));
  CHECK(err[1] == 1.0 - 0.6);

  const std::vector<double> w{-1.0, 0.5, 1.0, -0.25};
  CHECK(scalar::max_abs(w.data(), w.size()) == Extremum{0, 1.0});
  CHECK(scalar::max_abs(w.data(), 0) == Extremum{0, 0.0});
  const std::vector<double> t{0.25, 0.5, 0.75, 1.0};
  const Extremum b = scalar::bridged_max_abs(w.data(), t.data(), 4, -0.25);
  CHECK(b.index == 2);
  CHECK(b.value == doctest::Approx(1.0 + 0.75 * 0.25));
}

TEST_CASE("every available backend is bit-identical to scalar") {
  const auto backends = available_backends();
  REQUIRE(backends.front() == Backend::Scalar);
  for (const Backend backend : backends) {
    CAPTURE(std::string(backend_name(backend)));
    const KernelTable table = *table_for(backend);
    for (std::size_t n = 0; n <= 67; ++n) {
      CAPTURE(n);
      const Inputs in = make_inputs(n, 1000 + n);
      check_backend_against_scalar(table, in, 0.37);
    }
    for (const std::size_t n : {255u, 256u, 1001u, 4099u, 100000u}) {
      CAPTURE(n);
      const Inputs in = make_inputs(n, n);
      check_backend_against_scalar(table, in, -1.3);
    }
  }
}

TEST_CASE("reductions break ties by smallest index in every lane position") {
  for (const Backend backend : available_backends()) {
    CAPTURE(std::string(backend_name(backend)));
    const KernelTable table = *table_for(backend);
    for (std::size_t n = 1; n <= 40; ++n) {
      for (std::size_t first = 0; first < n; ++first) {
        for (std::size_t second = first; second < n; second += 3) {
          std::vector<double> v(n, 0.5);
          v[first] = -2.0;
          v[second] = 2.0;
          const Extremum e = table.max_abs(v.data(), n);
          REQUIRE(e.index == first);
          REQUIRE(e.value == 2.0);
        }
      }
      // Constant input: index 0.
      std::vector<double> flat(n, -0.75);
      REQUIRE(table.max_abs(flat.data(), n) == Extremum{0, 0.75});
      std::vector<double> zeros(n, 0.0);
      std::vector<double> times(n, 0.5);
      REQUIRE(table.bridged_max_abs(zeros.data(), times.data(), n, 0.0) == Extremum{0, 0.0});
    }
  }
}

TEST_CASE("special values propagate identically") {
  for (const Backend backend : available_backends()) {
    CAPTURE(std::string(backend_name(backend)));
    const KernelTable table = *table_for(backend);
    std::vector<double> v{0.0, -0.0, 1e-310, -1e-310, 3.0, -3.0, 2.0, 1.0, 0.5};
    CHECK(table.max_abs(v.data(), v.size()) == scalar::max_abs(v.data(), v.size()));
    std::vector<double> inf{1.0, -std::numeric_limits<double>::infinity(), 2.0, 3.0, 4.0};
    CHECK(table.max_abs(inf.data(), inf.size()) == scalar::max_abs(inf.data(), inf.size()));
  }
}

TEST_CASE("dispatch honours the scalar override") {
  const char* forced = std::getenv("CUMCAL_KERNELS");
  if (forced != nullptr && std::string(forced) == "scalar") {
    CHECK(active().backend == Backend::Scalar);
  } else {
    CHECK(active().backend == available_backends().back());
  }
  MESSAGE("active kernel backend: " << backend_name(active().backend));
}

TEST_CASE("span wrappers validate lengths") {
  std::vector<double> p(3, 0.5), var(3), err(2);
  std::vector<std::uint8_t> y(3, 1);
  CHECK_THROWS_AS(prediction_terms(p, y, var, err), std::invalid_argument);
  CHECK_THROWS_AS(bridged_max_abs(p, err, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(compensated_prefix_sum(p, err), std::invalid_argument);
}

TEST_CASE("compensated sums are exact where naive sums drift") {
  std::vector<double> v{1.0, 1e100, 1.0, -1e100};
  CHECK(compensated_sum(v) == 2.0);
  std::vector<double> prefix(v.size());
  compensated_prefix_sum(v, prefix);
  CHECK(prefix[0] == 1.0);
  CHECK(prefix[3] == 2.0);

  std::vector<double> tenths(1'000'000, 0.1);
  const double exact = 100000.0;  // sum of the double nearest 0.1, to within 1e-10
  CHECK(std::abs(compensated_sum(tenths) - exact) < 1e-9);
  double naive = 0.0;
  for (const double x : tenths) {
    naive += x;
  }
  CHECK(std::abs(naive - exact) > std::abs(compensated_sum(tenths) - exact));
}
