#pragma once

#include <cstddef>
#include <functional>

namespace locop {

/// Worker count used by parallel_for. Results never depend on it.
void set_thread_count(unsigned n);
[[nodiscard]] unsigned thread_count();

/// Runs body(i) for i in [0, n). Indices are split into contiguous chunks,
/// one per worker; nested calls run inline on the calling worker.
/// The first exception in index order is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace locop
