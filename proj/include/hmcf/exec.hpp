#pragma once

#include <cstddef>

namespace hmcf {

// Pointwise kernels run either serially or as an OpenMP loop. Both paths
// execute the same per-index callable, so results are bitwise identical;
// reductions are never parallelized (fixed-order summation everywhere).
enum class ExecMode { Serial, Parallel };

void set_exec_mode(ExecMode mode);
ExecMode exec_mode();

// True when the binary was built with OpenMP support.
bool openmp_enabled();

template <class F>
void parallel_for(std::ptrdiff_t n, F&& fn) {
#ifdef _OPENMP
  if (exec_mode() == ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    fn(i);
  }
}

}  // namespace hmcf
