#include "doctest.h"

#include <cmath>
#include <vector>

#include "wickconv/numerics.hpp"

using namespace wickconv;

TEST_CASE("log_sum_exp matches direct summation and survives offsets") {
  std::vector<double> a{0.0, std::log(2.0), std::log(3.0)};
  CHECK(num::log_sum_exp(a) == doctest::Approx(std::log(6.0)).epsilon(1e-14));

  std::vector<double> big{1000.0, 1000.0 + std::log(2.0)};
  CHECK(num::log_sum_exp(big) == doctest::Approx(1000.0 + std::log(3.0)).epsilon(1e-14));

  std::vector<double> with_ninf{num::kNegInf, 0.0};
  CHECK(num::log_sum_exp(with_ninf) == doctest::Approx(0.0));
  std::vector<double> empty;
  CHECK(num::log_sum_exp(empty) == num::kNegInf);
}

TEST_CASE("golden_min finds quadratic minimum") {
  auto f = [](double x) { return (x - 0.3) * (x - 0.3) + 1.5; };
  const auto r = num::golden_min(f, -4.0, 9.0);
  CHECK(r.x == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(r.f == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("log_grid_min refines below every grid sample and flags edges") {
  auto f = [](double t) { return t + 2.0 / t; };  // min at sqrt(2)
  const auto r = num::log_grid_min(f, 1e-4, 1e4, 48);
  CHECK(r.edge == false);
  CHECK(r.x == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  for (int i = 0; i < 48; ++i) {
    const double t = std::exp(std::log(1e-4) + (std::log(1e4) - std::log(1e-4)) * i / 47.0);
    CHECK(r.f <= f(t) + 1e-12);
  }

  auto dec = [](double t) { return t; };  // minimum at the left edge
  const auto re = num::log_grid_min(dec, 0.5, 8.0, 16);
  CHECK(re.edge == true);
  CHECK(re.x == doctest::Approx(0.5));
}

TEST_CASE("concave_argmax locates integer peak") {
  auto g = [](std::int64_t k) { return -std::abs(static_cast<double>(k) - 37.0); };
  CHECK(num::concave_argmax(g, 0, 1000) == 37);
}

TEST_CASE("fit_line recovers slope and r2") {
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(0.1 * i);
    y.push_back(3.0 - 2.0 * 0.1 * i);
  }
  const auto fit = num::fit_line(x, y);
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log_factorial agrees with iterated products") {
  double acc = 0.0;
  for (int k = 1; k <= 40; ++k) {
    acc += std::log(static_cast<double>(k));
    CHECK(num::log_factorial(k) == doctest::Approx(acc).epsilon(1e-13));
  }
  CHECK(num::log_factorial(0) == 0.0);
  CHECK(num::log_factorial(500) == doctest::Approx(std::lgamma(501.0)).epsilon(1e-13));
}
