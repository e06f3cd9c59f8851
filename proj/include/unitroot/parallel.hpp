#pragma once

#include <cstddef>
#include <functional>

namespace ur {

// Worker cap from UNITROOT_THREADS, else hardware concurrency.
int worker_count();
void set_worker_count(int n);

// Runs fn(i) for i in [0, n) on up to worker_count() threads; fn must write only to slot i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ur
