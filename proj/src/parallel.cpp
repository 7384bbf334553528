#include "wickconv/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <string>

namespace wickconv::par {

namespace {
std::atomic<int> g_threads{0};

int env_threads() {
  const char* s = std::getenv("WICKCONV_THREADS");
  if (!s) return 0;
  const int n = std::atoi(s);
  return n > 0 ? n : 0;
}
}  // namespace

int max_threads() {
  const int forced = g_threads.load();
  if (forced > 0) return forced;
  const int env = env_threads();
  if (env > 0) return env;
  return omp_get_max_threads();
}

void set_threads(int n) { g_threads.store(n > 0 ? n : 0); }

namespace detail {

void run_chunks_serial(std::size_t n_chunks, void* ctx, void (*body)(void*, std::size_t)) {
  for (std::size_t c = 0; c < n_chunks; ++c) body(ctx, c);
}

void run_chunks_parallel(std::size_t n_chunks, void* ctx, void (*body)(void*, std::size_t)) {
  const int nt = max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
  for (long long c = 0; c < static_cast<long long>(n_chunks); ++c)
    body(ctx, static_cast<std::size_t>(c));
}

}  // namespace detail
}  // namespace wickconv::par
