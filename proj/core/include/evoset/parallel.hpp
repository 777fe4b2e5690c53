#pragma once

#include <cstddef>
#include <functional>

namespace evoset {

/// Worker count from EVOSET_WORKERS; falls back to the hardware thread count
/// (at least 1). Invalid values are a kConfig error.
std::size_t worker_count_from_env();

/// Runs body(i) for i in [0, count) on up to `workers` threads. Indices are
/// handed out dynamically, so results must be keyed by index. The first
/// exception thrown by any body is rethrown after all threads join.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace evoset
