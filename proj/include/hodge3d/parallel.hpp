#pragma once

#include <cstddef>
#include <functional>

namespace hodge3d::parallel {

/// Worker cap: set_max_threads() if called with n > 0, else the HODGE3D_THREADS
/// environment variable, else the hardware concurrency.
int max_threads();
void set_max_threads(int n);

/// Runs body(begin, end) over consecutive blocks of [0, n). The block layout
/// depends only on n and `block`, never on the thread count, so bodies that
/// write disjoint outputs give bit-identical results for any worker count.
void for_blocks(std::size_t n, std::size_t block,
                const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace hodge3d::parallel
