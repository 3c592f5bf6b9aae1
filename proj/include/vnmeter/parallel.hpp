#pragma once

#include <cstddef>
#include <functional>

namespace vnmeter {

/// Worker cap: hardware concurrency, further limited by VNMETER_THREADS when set.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads, in contiguous
/// blocks. Each index is visited exactly once; bodies must not share mutable state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace vnmeter
