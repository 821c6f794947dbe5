#pragma once

#include <cstddef>

// Data-parallel inner loops over the piecewise-quadratic SoA arrays.
// Scalar implementations are the reference; the AVX2 variants must match
// them bit-for-bit for add_quadratic and piece_min (same operation order,
// no FMA contraction) and to 1e-12 relative for the sum reduction.

namespace gccd::kernels {

// a[i] += da; b[i] += db; c[i] += dc  for all i.
using AddQuadraticFn = void (*)(double* a, double* b, double* c, std::size_t n,
                                double da, double db, double dc);

// Per-piece minimum of a*x^2 + b*x + c over [lo_i, hi_i]: the parabola
// vertex clamped into the interval. Degenerate pieces (a = 0) fall out of
// the same formula through inf/NaN propagation in the clamp, picking lo
// for non-decreasing pieces and hi for decreasing ones. Callers overwrite
// the entries of infinite pieces themselves.
using PieceMinFn = void (*)(const double* lo, const double* hi,
                            const double* a, const double* b, const double* c,
                            std::size_t n, double* val, double* arg);

// sum = sum(x), sumsq = sum(x^2).
using SumSumsqFn = void (*)(const double* x, std::size_t n,
                            double* sum, double* sumsq);

struct Impl {
  const char* name;
  AddQuadraticFn add_quadratic;
  PieceMinFn piece_min;
  SumSumsqFn sum_sumsq;
};

const Impl& scalar_impl();

// True when the build has the AVX2 variants and the CPU supports them.
bool avx2_available();
const Impl& avx2_impl();  // only valid when avx2_available()

// Selected once at startup: AVX2 when available unless the environment
// sets GCCD_DISABLE_AVX2=1, scalar otherwise.
const Impl& active();

}  // namespace gccd::kernels
