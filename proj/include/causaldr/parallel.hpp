#pragma once

#include <cstddef>
#include <functional>

namespace causaldr::parallel {

// Runs fn(i) for i in [0, count) on up to `workers` threads. Work items are
// claimed from an atomic counter; callers must make fn(i) independent of
// execution order. The first exception thrown by any item is rethrown on
// the calling thread after all workers join.
void for_each_index(std::size_t count, int workers,
                    const std::function<void(std::size_t)>& fn);

}  // namespace causaldr::parallel
