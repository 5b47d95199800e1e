#include "linkanomaly/simd/kernels.hpp"

namespace linkanomaly::simd {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void matvec_scalar(const double* m, std::size_t n, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = m + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void axpby_scalar(double* y, const double* x, std::size_t n, double alpha, double beta) {
  for (std::size_t i = 0; i < n; ++i) y[i] = alpha * y[i] + beta * x[i];
}

void sym_scale_rank1_scalar(double* m, std::size_t n, double s, double c, const double* u) {
  for (std::size_t i = 0; i < n; ++i) {
    double* row = m + i * n;
    const double ui = u[i];
    for (std::size_t j = 0; j < n; ++j) {
      // u[i]*u[j] is rounded before the scale by c; the product commutes, so
      // entries (i,j) and (j,i) round identically and symmetry is exact.
      row[j] = s * row[j] + c * (ui * u[j]);
    }
  }
}

#if defined(LINKANOMALY_HAVE_AVX2_TU)
// Implemented in kernels_avx2.cpp, compiled with -mavx2 -mfma.
double dot_avx2(const double* a, const double* b, std::size_t n);
void matvec_avx2(const double* m, std::size_t n, const double* x, double* y);
void axpby_avx2(double* y, const double* x, std::size_t n, double alpha, double beta);
void sym_scale_rank1_avx2(double* m, std::size_t n, double s, double c, const double* u);
#endif

}  // namespace detail

namespace {

struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  void (*matvec)(const double*, std::size_t, const double*, double*);
  void (*axpby)(double*, const double*, std::size_t, double, double);
  void (*sym_scale_rank1)(double*, std::size_t, double, double, const double*);
};

constexpr KernelTable kScalarTable = {
    detail::dot_scalar,
    detail::matvec_scalar,
    detail::axpby_scalar,
    detail::sym_scale_rank1_scalar,
};

#if defined(LINKANOMALY_HAVE_AVX2_TU)
constexpr KernelTable kAvx2Table = {
    detail::dot_avx2,
    detail::matvec_avx2,
    detail::axpby_avx2,
    detail::sym_scale_rank1_avx2,
};
#endif

bool cpu_has_avx2_fma() {
#if defined(LINKANOMALY_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct Dispatch {
  const KernelTable* table;
  Backend backend;
};

Dispatch detect_best() {
#if defined(LINKANOMALY_HAVE_AVX2_TU)
  if (cpu_has_avx2_fma()) return {&kAvx2Table, Backend::kAvx2};
#endif
  return {&kScalarTable, Backend::kScalar};
}

Dispatch& dispatch() {
  static Dispatch d = detect_best();
  return d;
}

}  // namespace

bool set_backend(Backend backend) {
  switch (backend) {
    case Backend::kAuto:
      dispatch() = detect_best();
      return true;
    case Backend::kScalar:
      dispatch() = {&kScalarTable, Backend::kScalar};
      return true;
    case Backend::kAvx2:
#if defined(LINKANOMALY_HAVE_AVX2_TU)
      if (cpu_has_avx2_fma()) {
        dispatch() = {&kAvx2Table, Backend::kAvx2};
        return true;
      }
#endif
      return false;
  }
  return false;
}

Backend active_backend() { return dispatch().backend; }

const char* backend_name() {
  return dispatch().backend == Backend::kAvx2 ? "avx2" : "scalar";
}

bool avx2_available() { return cpu_has_avx2_fma(); }

double dot(const double* a, const double* b, std::size_t n) {
  return dispatch().table->dot(a, b, n);
}

void matvec(const double* m, std::size_t n, const double* x, double* y) {
  dispatch().table->matvec(m, n, x, y);
}

void axpby(double* y, const double* x, std::size_t n, double alpha, double beta) {
  dispatch().table->axpby(y, x, n, alpha, beta);
}

void sym_scale_rank1(double* m, std::size_t n, double s, double c, const double* u) {
  dispatch().table->sym_scale_rank1(m, n, s, c, u);
}

}  // namespace linkanomaly::simd
