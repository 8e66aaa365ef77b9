#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>

namespace rfclt {

/// Serial runs are the reference. Parallel runs must produce bit-identical
/// results wherever the library promises determinism: work is split by index
/// and partial results are always combined in index order.
enum class Execution { Serial, Parallel };

/// Calls fn(i) for i in [0, n). With Execution::Parallel the calls are spread
/// over OpenMP threads; fn must only write to state owned by index i. If any
/// call throws, the exception from the smallest failing index is rethrown.
template <typename Fn>
void for_each_index(std::size_t n, Execution exec, Fn&& fn) {
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::size_t first_index = n;
  std::mutex error_mutex;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (static_cast<std::size_t>(i) < first_index) {
        first_index = static_cast<std::size_t>(i);
        first_error = std::current_exception();
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

/// Number of OpenMP threads a parallel region would use (1 without OpenMP).
int max_threads();

}  // namespace rfclt
