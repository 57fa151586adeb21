#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace smp {

/// Worker budget handed down to the parallel kernels. `jobs == 1` selects
/// the serial reference loop; every kernel must give identical results for
/// any value.
struct Exec {
  int jobs = 1;

  [[nodiscard]] bool serial() const noexcept { return jobs <= 1; }
  [[nodiscard]] static Exec sequential() noexcept { return Exec{1}; }
};

/// Runs body(i) for i in [0, n). Results must be written positionally by the
/// body. When several iterations throw, the lowest index wins, which is the
/// exception the serial loop would have raised.
template <typename Body>
void parallel_for(std::size_t n, const Exec& exec, Body&& body) {
  if (exec.serial() || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for num_threads(exec.jobs) schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace smp
