#pragma once

#include <complex>
#include <memory>
#include <type_traits>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace wickconv::par {

// Execution policy for the grid kernels. Serial is an independent reference
// implementation; Parallel uses OpenMP. Both follow the same fixed chunk
// decomposition when reducing, so results are bit-identical for any thread
// count.
enum class Exec { Serial, Parallel };

// Thread count resolution order: set_threads() > WICKCONV_THREADS > OpenMP default.
int max_threads();
void set_threads(int n);

inline constexpr std::size_t kChunk = 1024;

namespace detail {
void run_chunks_serial(std::size_t n_chunks, void* ctx, void (*body)(void*, std::size_t));
void run_chunks_parallel(std::size_t n_chunks, void* ctx, void (*body)(void*, std::size_t));

template <class Body>
void run_chunks(Exec exec, std::size_t n, Body&& body) {
  using B = std::remove_reference_t<Body>;
  const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
  auto thunk = [](void* ctx, std::size_t c) { (*static_cast<B*>(ctx))(c); };
  B& ref = body;
  if (exec == Exec::Parallel)
    run_chunks_parallel(n_chunks, std::addressof(ref), thunk);
  else
    run_chunks_serial(n_chunks, std::addressof(ref), thunk);
}
}  // namespace detail

// out[i] = fn(i), i in [0, n). Identical output for both policies.
template <class T, class Fn>
void map_indexed(Exec exec, std::size_t n, Fn&& fn, T* out) {
  detail::run_chunks(exec, n, [&](std::size_t c) {
    const std::size_t lo = c * kChunk;
    const std::size_t hi = lo + kChunk < n ? lo + kChunk : n;
    for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
  });
}

// Sum of term(i) with fixed chunk partials combined in index order.
template <class T, class Fn>
T sum_indexed(Exec exec, std::size_t n, Fn&& term) {
  const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<T> partial(n_chunks, T{});
  detail::run_chunks(exec, n, [&](std::size_t c) {
    const std::size_t lo = c * kChunk;
    const std::size_t hi = lo + kChunk < n ? lo + kChunk : n;
    T s{};
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[c] = s;
  });
  T total{};
  for (const T& p : partial) total += p;
  return total;
}

// Max of value(i) with the lowest attaining index. Comparisons are exact, so
// the result does not depend on the execution policy.
template <class Fn>
std::pair<double, std::size_t> max_indexed(Exec exec, std::size_t n, Fn&& value) {
  const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<std::pair<double, std::size_t>> partial(
      n_chunks, {-std::numeric_limits<double>::infinity(), 0});
  detail::run_chunks(exec, n, [&](std::size_t c) {
    const std::size_t lo = c * kChunk;
    const std::size_t hi = lo + kChunk < n ? lo + kChunk : n;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = lo;
    for (std::size_t i = lo; i < hi; ++i) {
      const double v = value(i);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    partial[c] = {best, arg};
  });
  std::pair<double, std::size_t> out{-std::numeric_limits<double>::infinity(), 0};
  for (const auto& p : partial)
    if (p.first > out.first) out = p;
  return out;
}

}  // namespace wickconv::par
