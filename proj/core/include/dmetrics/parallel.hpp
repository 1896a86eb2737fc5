#pragma once

#include <cstddef>
#include <functional>

namespace dmetrics {

/// Worker count: hardware concurrency, capped by DOMAIN_METRICS_THREADS when
/// that is set to a positive integer.
std::size_t worker_count();

/// Calls fn(i) for i in [0, n) on up to `threads` workers (0 = worker_count()).
/// Indices are handed out dynamically; the first exception is rethrown after
/// all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t threads = 0);

}  // namespace dmetrics
