#pragma once

#include <cstddef>

// Dense double-precision kernels used by the change-point estimator's inner
// loop. A scalar reference implementation always exists; on x86 hosts with
// AVX2+FMA a vectorized variant is selected at runtime. Both variants are
// equivalence-tested against each other, so callers may treat the backend as
// an implementation detail. Results can differ between backends by rounding
// only (vector accumulation reorders sums).
namespace linkanomaly::simd {

enum class Backend {
  kAuto,    // best supported backend on this host
  kScalar,  // portable reference
  kAvx2,    // x86 AVX2+FMA
};

// Selects the backend for all subsequent kernel calls. Returns false (and
// leaves the selection unchanged) if the requested backend is not available
// in this build or on this CPU. Not thread-safe against concurrent kernel
// calls; intended for startup and tests.
bool set_backend(Backend backend);

// Backend currently in effect (never kAuto).
Backend active_backend();

// Human-readable name of the active backend ("scalar", "avx2").
const char* backend_name();

// True if the AVX2 variant was compiled in and this CPU supports it.
bool avx2_available();

// Inner product of a and b, length n.
double dot(const double* a, const double* b, std::size_t n);

// y = M * x with M row-major n-by-n.
void matvec(const double* m, std::size_t n, const double* x, double* y);

// y = alpha * y + beta * x, length n.
void axpby(double* y, const double* x, std::size_t n, double alpha, double beta);

// M = s * M + c * u * u^T with M row-major n-by-n. Entry (i,j) and (j,i) are
// updated with identical rounding, so symmetry of M is preserved exactly.
void sym_scale_rank1(double* m, std::size_t n, double s, double c, const double* u);

}  // namespace linkanomaly::simd
