#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace sft {

/// Worker count used by every data-parallel loop. 0 means hardware concurrency.
void set_worker_count(unsigned n);
unsigned worker_count();

/// Runs body(i) for i in [0, n). Iterations must write disjoint outputs;
/// callers reduce afterwards in index order so results do not depend on the
/// schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Stream seed for item `index` derived from a master seed (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace sft
