#pragma once

// OpenMP support shims. The heavy kernels (pentagon sweeps, tube pair
// products, per-sublattice plaquette updates) have a serial reference path
// selected at runtime with snc::parallel_enabled(); tests compare both.

#ifdef _OPENMP
#include <omp.h>
#else
inline int omp_get_max_threads() { return 1; }
inline int omp_get_thread_num() { return 0; }
inline int omp_get_num_threads() { return 1; }
#endif

namespace snc {

inline bool& parallel_enabled() {
  static bool enabled = true;
  return enabled;
}

}  // namespace snc
