#include "hodge3d/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hodge3d::parallel {

namespace {
std::atomic<int> g_override{0};

int env_threads() {
  const char* s = std::getenv("HODGE3D_THREADS");
  if (!s) return 0;
  const int n = std::atoi(s);
  return n > 0 ? n : 0;
}
}  // namespace

int max_threads() {
  if (const int n = g_override.load(); n > 0) return n;
  if (const int n = env_threads(); n > 0) return n;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

void set_max_threads(int n) { g_override.store(std::max(0, n)); }

void for_blocks(std::size_t n, std::size_t block,
                const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  block = std::max<std::size_t>(block, 1);
  const std::size_t n_blocks = (n + block - 1) / block;
  const auto workers =
      static_cast<std::size_t>(std::min<std::size_t>(max_threads(), n_blocks));
  if (workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) body(b * block, std::min(n, (b + 1) * block));
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t b; (b = next.fetch_add(1)) < n_blocks;)
      body(b * block, std::min(n, (b + 1) * block));
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
}

}  // namespace hodge3d::parallel
