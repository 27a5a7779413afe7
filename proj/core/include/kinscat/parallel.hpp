#pragma once

#include <cstddef>
#include <functional>

namespace kinscat {

/// Worker count used by parallel_for. Defaults to 1.
void set_thread_count(int n);
[[nodiscard]] int thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() workers with a static
/// block partition. Each index is visited exactly once; callers write results
/// by index and reduce serially afterwards, so output does not depend on the
/// worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace kinscat
