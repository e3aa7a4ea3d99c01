#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sldg {

// Worker count used by the data-parallel kernels. Kernels partition work
// over output cells only, so results do not depend on this value.
inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace sldg
