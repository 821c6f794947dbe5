#include "gccd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define GCCD_HAVE_AVX2_BUILD 1
#include <immintrin.h>
#endif

namespace gccd::kernels {

#ifdef GCCD_HAVE_AVX2_BUILD
namespace {

__attribute__((target("avx2")))
void add_quadratic_avx2(double* a, double* b, double* c, std::size_t n,
                        double da, double db, double dc) {
  const std::size_t limit = n & ~std::size_t{3};
  const __m256d vda = _mm256_set1_pd(da);
  const __m256d vdb = _mm256_set1_pd(db);
  const __m256d vdc = _mm256_set1_pd(dc);
  std::size_t i = 0;
  for (; i < limit; i += 4) {
    _mm256_storeu_pd(a + i, _mm256_add_pd(_mm256_loadu_pd(a + i), vda));
    _mm256_storeu_pd(b + i, _mm256_add_pd(_mm256_loadu_pd(b + i), vdb));
    _mm256_storeu_pd(c + i, _mm256_add_pd(_mm256_loadu_pd(c + i), vdc));
  }
  for (; i < n; ++i) {
    a[i] += da;
    b[i] += db;
    c[i] += dc;
  }
}

// maxpd/minpd return the second operand when the first is NaN, which is
// what routes a 0/0 vertex to lo; the scalar reference encodes the same
// choice with ordered comparisons.
__attribute__((target("avx2")))
void piece_min_avx2(const double* lo, const double* hi,
                    const double* a, const double* b, const double* c,
                    std::size_t n, double* val, double* arg) {
  const std::size_t limit = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < limit; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    const __m256d vc = _mm256_loadu_pd(c + i);
    const __m256d vlo = _mm256_loadu_pd(lo + i);
    const __m256d vhi = _mm256_loadu_pd(hi + i);
    const __m256d vx = _mm256_div_pd(_mm256_sub_pd(_mm256_setzero_pd(), vb),
                                     _mm256_add_pd(va, va));
    __m256d x = _mm256_max_pd(vx, vlo);
    x = _mm256_min_pd(x, vhi);
    const __m256d v =
        _mm256_add_pd(_mm256_mul_pd(_mm256_add_pd(_mm256_mul_pd(va, x), vb), x), vc);
    _mm256_storeu_pd(val + i, v);
    _mm256_storeu_pd(arg + i, x);
  }
  for (; i < n; ++i) {
    const double vx = -b[i] / (a[i] + a[i]);
    double x = vx > lo[i] ? vx : lo[i];
    x = x < hi[i] ? x : hi[i];
    val[i] = (a[i] * x + b[i]) * x + c[i];
    arg[i] = x;
  }
}

__attribute__((target("avx2")))
void sum_sumsq_avx2(const double* x, std::size_t n, double* sum, double* sumsq) {
  const std::size_t limit = n & ~std::size_t{3};
  __m256d vs = _mm256_setzero_pd();
  __m256d vs2 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i < limit; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    vs = _mm256_add_pd(vs, v);
    vs2 = _mm256_add_pd(vs2, _mm256_mul_pd(v, v));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vs);
  double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  _mm256_store_pd(lanes, vs2);
  double s2 = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) {
    s += x[i];
    s2 += x[i] * x[i];
  }
  *sum = s;
  *sumsq = s2;
}

}  // namespace

bool avx2_available() {
  return __builtin_cpu_supports("avx2");
}

const Impl& avx2_impl() {
  static const Impl impl{"avx2", add_quadratic_avx2, piece_min_avx2,
                         sum_sumsq_avx2};
  return impl;
}

#else  // non-x86 builds fall back to the scalar reference

bool avx2_available() { return false; }

const Impl& avx2_impl() { return scalar_impl(); }

#endif

}  // namespace gccd::kernels
