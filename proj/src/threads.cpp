#include "nlslab/threads.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>

namespace nlslab {

namespace {
std::atomic<int> g_limit{0};

int env_threads() {
  const char* s = std::getenv("NLSLAB_THREADS");
  if (!s) return 0;
  try {
    return std::max(0, std::stoi(s));
  } catch (...) {
    return 0;
  }
}
}  // namespace

int worker_count() {
  int n = omp_get_max_threads();
  if (const int env = env_threads(); env > 0) n = std::min(n, env);
  if (const int lim = g_limit.load(); lim > 0) n = std::min(n, lim);
  return std::max(1, n);
}

void set_worker_limit(int limit) { g_limit.store(std::max(0, limit)); }

}  // namespace nlslab
