#ifndef NBGEC_PARALLEL_HPP
#define NBGEC_PARALLEL_HPP

#include <cstddef>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nbgec {

// Runs f(0) .. f(n-1), across `jobs` OpenMP threads when jobs > 1, serially
// when jobs <= 1 (the reference path). Iterations must be independent and
// write only to their own output slot, so results never depend on the job
// count. jobs == 0 means "use all hardware threads". The first exception, if
// any, is rethrown on the calling thread.
template <typename F>
void parallel_for(std::size_t n, int jobs, F&& f) {
#ifdef _OPENMP
  if (jobs != 1 && n > 1) {
    int threads = jobs > 0 ? jobs : omp_get_max_threads();
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (long long i = 0; i < (long long)n; ++i) {
      try {
        f(std::size_t(i));
      } catch (...) {
#pragma omp critical(nbgec_parallel_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
    return;
  }
#else
  (void)jobs;
#endif
  for (std::size_t i = 0; i < n; ++i) f(i);
}

inline int hardware_jobs() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace nbgec

#endif  // NBGEC_PARALLEL_HPP
