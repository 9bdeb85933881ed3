#ifndef POGAMP_PARALLEL_HPP
#define POGAMP_PARALLEL_HPP

#ifdef POGAMP_HAVE_OPENMP
#include <omp.h>
#endif

namespace pogamp {

inline int hardware_threads() {
#ifdef POGAMP_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Serial reference loop. Kept separate from the OpenMP kernel so tests and
// the benchmark can compare the two paths directly.
template <class Body>
void run_replicates_serial(long n, Body&& body) {
  for (long i = 0; i < n; ++i) body(i);
}

// OpenMP replicate kernel. Bodies must only write to replicate-owned slots
// (index i); RNG substreams are derived from i, so the result is identical
// to the serial reference for any thread count.
template <class Body>
void run_replicates(long n, Body&& body, int threads = 0) {
#ifdef POGAMP_HAVE_OPENMP
  if (threads == 1) {
    run_replicates_serial(n, body);
    return;
  }
  if (threads <= 0) threads = omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (long i = 0; i < n; ++i) body(i);
#else
  (void)threads;
  run_replicates_serial(n, body);
#endif
}

}  // namespace pogamp

#endif
