#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "wickconv/parallel.hpp"

using namespace wickconv;

TEST_CASE("map_indexed: parallel equals serial exactly") {
  const std::size_t n = 10000;
  auto fn = [](std::size_t i) { return std::sin(0.001 * static_cast<double>(i)) / (1.0 + i); };
  std::vector<double> a(n), b(n);
  par::map_indexed(par::Exec::Serial, n, fn, a.data());
  par::map_indexed(par::Exec::Parallel, n, fn, b.data());
  CHECK(a == b);
}

TEST_CASE("sum_indexed: bit-identical across policies and thread counts") {
  const std::size_t n = 123457;
  auto term = [](std::size_t i) { return std::cos(0.01 * static_cast<double>(i)) / (1.0 + 0.5 * i); };
  const double s_serial = par::sum_indexed<double>(par::Exec::Serial, n, term);
  const double s_par = par::sum_indexed<double>(par::Exec::Parallel, n, term);
  CHECK(s_serial == s_par);

  par::set_threads(1);
  const double s1 = par::sum_indexed<double>(par::Exec::Parallel, n, term);
  par::set_threads(0);
  CHECK(s1 == s_par);

  using cd = std::complex<double>;
  auto cterm = [](std::size_t i) {
    return cd(std::sin(0.02 * i), std::cos(0.03 * i)) / (1.0 + static_cast<double>(i));
  };
  CHECK(par::sum_indexed<cd>(par::Exec::Serial, n, cterm) ==
        par::sum_indexed<cd>(par::Exec::Parallel, n, cterm));
}

TEST_CASE("max_indexed: deterministic argmax with lowest-index ties") {
  const std::size_t n = 50000;
  auto v = [](std::size_t i) { return -std::abs(static_cast<double>(i % 977) - 500.0); };
  const auto ms = par::max_indexed(par::Exec::Serial, n, v);
  const auto mp = par::max_indexed(par::Exec::Parallel, n, v);
  CHECK(ms.first == mp.first);
  CHECK(ms.second == mp.second);
  CHECK(ms.second == 500);  // first index attaining the max
}
