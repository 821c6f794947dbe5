#include "gccd/kernels.hpp"

namespace gccd::kernels {
namespace {

void add_quadratic_scalar(double* a, double* b, double* c, std::size_t n,
                          double da, double db, double dc) {
  for (std::size_t i = 0; i < n; ++i) a[i] += da;
  for (std::size_t i = 0; i < n; ++i) b[i] += db;
  for (std::size_t i = 0; i < n; ++i) c[i] += dc;
}

// Mirrors the AVX2 blend semantics exactly: the clamp is written with
// ordered comparisons so a NaN vertex (a = 0, b = 0) resolves to lo.
void piece_min_scalar(const double* lo, const double* hi,
                      const double* a, const double* b, const double* c,
                      std::size_t n, double* val, double* arg) {
  for (std::size_t i = 0; i < n; ++i) {
    const double vx = -b[i] / (a[i] + a[i]);
    double x = vx > lo[i] ? vx : lo[i];
    x = x < hi[i] ? x : hi[i];
    val[i] = (a[i] * x + b[i]) * x + c[i];
    arg[i] = x;
  }
}

void sum_sumsq_scalar(const double* x, std::size_t n, double* sum, double* sumsq) {
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += x[i];
    s2 += x[i] * x[i];
  }
  *sum = s;
  *sumsq = s2;
}

}  // namespace

const Impl& scalar_impl() {
  static const Impl impl{"scalar", add_quadratic_scalar, piece_min_scalar,
                         sum_sumsq_scalar};
  return impl;
}

}  // namespace gccd::kernels
