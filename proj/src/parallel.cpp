#include "bucketwidth/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bucketwidth {

int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace bucketwidth
