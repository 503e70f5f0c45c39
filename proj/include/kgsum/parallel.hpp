#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kgsum {

// Caps the worker count of every parallel kernel; n <= 0 leaves it unchanged.
inline void set_thread_count(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

inline int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace kgsum
