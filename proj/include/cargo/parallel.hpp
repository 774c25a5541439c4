#pragma once

#include <cstdint>
#include <exception>
#include <mutex>

namespace cargo {

/// body(k) for k in [0, n). Iterations must be independent; the first
/// exception thrown by any iteration is rethrown after the loop.
template <typename Body>
void parallel_for(std::int64_t n, Body&& body) {
  std::exception_ptr error;
  std::mutex error_mutex;
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) {
    try {
      body(k);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace cargo
