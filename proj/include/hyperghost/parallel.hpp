#pragma once

#include <cstddef>
#include <functional>

namespace hyperghost {

/// Worker count used by parallel_for. 0 selects hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [begin, end) over contiguous static chunks.
/// Callers must only write to per-index outputs; results are then
/// independent of the chunking.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace hyperghost
