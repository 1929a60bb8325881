#pragma once

#include <cstddef>
#include <functional>

namespace rmgeom {

// Worker count for data-parallel loops.  Defaults to RMGEOM_WORKERS or the
// hardware concurrency.  Results never depend on it: every parallel loop
// writes into per-index slots that are reduced afterwards in index order.
int worker_count();
void set_worker_count(int n);

// fn(i) for i in [0, n), spread over worker_count() threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace rmgeom
