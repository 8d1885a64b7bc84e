#pragma once
#include <cstddef>
#include <functional>

namespace freent {

// Runs f(0), ..., f(count-1) across `workers` threads with strided index
// assignment.  Each call must depend only on its index, so results never
// depend on the partition.  The first exception thrown by any worker is
// rethrown after the join.
void parallel_over(std::size_t count, std::size_t workers,
                   const std::function<void(std::size_t)>& f);

} // namespace freent
