#pragma once

#include <cstddef>
#include <exception>

namespace raileval {

/// Runs fn(i) for i in [0, n). `threads` == 1 takes the serial reference
/// path, 0 lets OpenMP pick the team size, anything else requests that
/// many threads. Callers write results into per-index slots and merge in
/// index order afterwards, so the outcome is identical for every thread
/// count. The first exception thrown by any iteration is rethrown here.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error = nullptr;
  const long long count = static_cast<long long>(n);
  if (threads <= 0) {
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) {
      try {
        fn(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(raileval_parallel_for_error)
        if (!error) error = std::current_exception();
      }
    }
  } else {
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long long i = 0; i < count; ++i) {
      try {
        fn(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(raileval_parallel_for_error)
        if (!error) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

} // namespace raileval
