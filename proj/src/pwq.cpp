#include "gccd/pwq.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "gccd/kernels.hpp"
#include "gccd/types.hpp"

namespace gccd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double eval_quad(double a, double b, double c, double x) {
  return (a * x + b) * x + c;
}

// Tag for a copy region of a running minimum: the argmin tracks mu itself
// (shifted by the gap), so restart stays NaN.
PieceTag copy_tag(PieceTag t) {
  t.restart = kNaN;
  return t;
}

PieceTag flat_tag(PieceTag t, double argmin) {
  t.restart = argmin;
  return t;
}

void format_double(std::string& out, double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

bool same_tag(const PieceTag& a, const PieceTag& b) {
  if (a.sample != b.sample || a.vertex != b.vertex || a.edge != b.edge)
    return false;
  const bool na = std::isnan(a.restart), nb = std::isnan(b.restart);
  if (na != nb) return false;
  return na || a.restart == b.restart;
}

PiecewiseQuadratic PiecewiseQuadratic::constant(double lo, double hi,
                                                double value, PieceTag tag) {
  return quadratic(lo, hi, 0.0, 0.0, value, tag);
}

PiecewiseQuadratic PiecewiseQuadratic::quadratic(double lo, double hi, double a,
                                                 double b, double c,
                                                 PieceTag tag) {
  if (!(lo < hi)) throw std::invalid_argument("piecewise domain must be non-empty");
  PiecewiseQuadratic f;
  f.reset(lo);
  f.append(hi, a, b, c, true, tag);
  return f;
}

PiecewiseQuadratic PiecewiseQuadratic::infinite(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("piecewise domain must be non-empty");
  PiecewiseQuadratic f;
  f.reset(lo);
  f.append(hi, 0.0, 0.0, 0.0, false, PieceTag{});
  return f;
}

bool PiecewiseQuadratic::all_infinite() const {
  for (std::uint8_t fl : finite_)
    if (fl) return false;
  return true;
}

std::size_t PiecewiseQuadratic::piece_index(double mu) const {
  const auto first = x_.begin() + 1;
  std::size_t i = std::upper_bound(first, x_.end(), mu) - first;
  if (i >= piece_count()) i = piece_count() - 1;  // mu at (or past) domain_hi
  return i;
}

double PiecewiseQuadratic::value(double mu) const {
  const std::size_t i = piece_index(mu);
  if (!finite_[i]) return kInf;
  return eval_quad(a_[i], b_[i], c_[i], mu);
}

void PiecewiseQuadratic::add_quadratic(double da, double db, double dc) {
  kernels::active().add_quadratic(a_.data(), b_.data(), c_.data(), a_.size(),
                                  da, db, dc);
}

void PiecewiseQuadratic::stamp(std::int32_t sample, std::int32_t vertex,
                               std::int32_t edge) {
  for (auto& t : tags_) {
    t.sample = sample;
    t.vertex = vertex;
    t.edge = edge;
  }
}

void PiecewiseQuadratic::prune_above(double bound) {
  const std::size_t n = piece_count();
  scratch_val_.resize(n);
  scratch_arg_.resize(n);
  kernels::active().piece_min(x_.data(), x_.data() + 1, a_.data(), b_.data(),
                              c_.data(), n, scratch_val_.data(),
                              scratch_arg_.data());
  for (std::size_t i = 0; i < n; ++i)
    if (finite_[i] && scratch_val_[i] > bound) finite_[i] = 0;
}

void PiecewiseQuadratic::merge_equal_pieces() {
  const std::size_t n = piece_count();
  if (n < 2) return;
  auto mergeable = [this](std::size_t i, std::size_t j) {
    if (!finite_[i] && !finite_[j]) return true;
    if (finite_[i] != finite_[j]) return false;
    return std::fabs(a_[i] - a_[j]) <= kCoeffMergeTol &&
           std::fabs(b_[i] - b_[j]) <= kCoeffMergeTol &&
           std::fabs(c_[i] - c_[j]) <= kCoeffMergeTol &&
           same_tag(tags_[i], tags_[j]);
  };
  std::size_t w = 0;
  for (std::size_t r = 1; r < n; ++r) {
    if (mergeable(w, r)) {
      if (!finite_[w]) tags_[w] = PieceTag{};  // merged sentinel loses identity
      x_[w + 1] = x_[r + 1];
    } else {
      ++w;
      a_[w] = a_[r];
      b_[w] = b_[r];
      c_[w] = c_[r];
      finite_[w] = finite_[r];
      tags_[w] = tags_[r];
      x_[w + 1] = x_[r + 1];
    }
  }
  const std::size_t m = w + 1;
  x_.resize(m + 1);
  a_.resize(m);
  b_.resize(m);
  c_.resize(m);
  finite_.resize(m);
  tags_.resize(m);
}

void PiecewiseQuadratic::reset(double lo) {
  x_.assign(1, lo);
  a_.clear();
  b_.clear();
  c_.clear();
  finite_.clear();
  tags_.clear();
}

void PiecewiseQuadratic::append(double hi, double a, double b, double c,
                                bool finite, PieceTag tag) {
  if (!(hi > x_.back())) return;  // zero-width pieces are dropped
  x_.push_back(hi);
  a_.push_back(a);
  b_.push_back(b);
  c_.push_back(c);
  finite_.push_back(finite ? 1 : 0);
  tags_.push_back(tag);
}

PiecewiseQuadratic add_point_loss(const PiecewiseQuadratic& f, double z) {
  if (!std::isfinite(z)) throw std::invalid_argument("add_point_loss: z must be finite");
  PiecewiseQuadratic g = f;
  g.add_point_loss(z);
  return g;
}

PiecewiseQuadratic add_constant(const PiecewiseQuadratic& f, double k) {
  if (!std::isfinite(k)) throw std::invalid_argument("add_constant: k must be finite");
  PiecewiseQuadratic g = f;
  g.add_constant(k);
  return g;
}

PiecewiseQuadratic min_envelope(const PiecewiseQuadratic& f,
                                const PiecewiseQuadratic& g) {
  if (f.domain_lo() != g.domain_lo() || f.domain_hi() != g.domain_hi())
    throw std::invalid_argument("min_envelope: domain mismatch");

  PiecewiseQuadratic h;
  h.reset(f.domain_lo());
  const double dom_hi = f.domain_hi();

  auto emit = [&h](double hi, const PiecewiseQuadratic& src, std::size_t k) {
    h.append(hi, src.piece_a(k), src.piece_b(k), src.piece_c(k),
             src.piece_finite(k), src.piece_tag(k));
  };

  std::size_t i = 0, j = 0;
  double cur = f.domain_lo();
  while (cur < dom_hi) {
    const double seg_hi = std::min(f.piece_hi(i), g.piece_hi(j));
    const bool ff = f.piece_finite(i), gf = g.piece_finite(j);
    if (!ff || !gf) {
      // Infinite loses to finite; ties keep the first argument.
      if (!gf)
        emit(seg_hi, f, i);
      else
        emit(seg_hi, g, j);
    } else {
      const double da = f.piece_a(i) - g.piece_a(j);
      const double db = f.piece_b(i) - g.piece_b(j);
      const double dc = f.piece_c(i) - g.piece_c(j);
      double cuts[2];
      int n_cuts = 0;
      if (std::fabs(da) <= kCoeffMergeTol && std::fabs(db) <= kCoeffMergeTol &&
          std::fabs(dc) <= kCoeffMergeTol) {
        // identical pieces, f wins everywhere
      } else if (std::fabs(da) <= kCoeffMergeTol) {
        if (std::fabs(db) > kCoeffMergeTol) cuts[n_cuts++] = -dc / db;
      } else {
        const double disc = db * db - 4.0 * da * dc;
        if (disc > kDiscriminantCutoff) {
          const double sq = std::sqrt(disc);
          const double q = -0.5 * (db + std::copysign(sq, db));
          double r1, r2;
          if (q != 0.0) {
            r1 = q / da;
            r2 = dc / q;
          } else {
            r1 = 0.0;
            r2 = -db / da;
          }
          if (r1 > r2) std::swap(r1, r2);
          cuts[n_cuts++] = r1;
          cuts[n_cuts++] = r2;
        }
      }
      double sub_lo = cur;
      for (int k = 0; k <= n_cuts; ++k) {
        const double sub_hi = k < n_cuts ? cuts[k] : seg_hi;
        if (!(sub_hi > sub_lo) || sub_lo >= seg_hi) continue;
        const double clipped_hi = std::min(sub_hi, seg_hi);
        const double mid = 0.5 * (sub_lo + clipped_hi);
        const double d = eval_quad(da, db, dc, mid);
        if (d > 0.0)
          emit(clipped_hi, g, j);
        else
          emit(clipped_hi, f, i);
        sub_lo = clipped_hi;
      }
    }
    cur = seg_hi;
    if (f.piece_hi(i) == seg_hi && i + 1 < f.piece_count()) ++i;
    if (g.piece_hi(j) == seg_hi && j + 1 < g.piece_count()) ++j;
  }

  h.merge_equal_pieces();
  return h;
}

PiecewiseQuadratic min_less(const PiecewiseQuadratic& f, double gap) {
  if (!(gap >= 0.0)) throw std::invalid_argument("min_less: gap must be >= 0");
  const double lo = f.domain_lo(), hi = f.domain_hi();

  // Pass 1: running minimum from the left, in source coordinates.
  PiecewiseQuadratic m;
  m.reset(lo);
  double best = kInf;
  double best_arg = kNaN;
  PieceTag best_tag{};

  auto emit_flat = [&](double seg_hi) {
    if (std::isfinite(best))
      m.append(seg_hi, 0.0, 0.0, best, true, flat_tag(best_tag, best_arg));
    else
      m.append(seg_hi, 0.0, 0.0, 0.0, false, PieceTag{});
  };

  for (std::size_t i = 0; i < f.piece_count(); ++i) {
    const double l = f.piece_lo(i), h = f.piece_hi(i);
    if (!f.piece_finite(i)) {
      emit_flat(h);
      continue;
    }
    const double a = f.piece_a(i), b = f.piece_b(i), c = f.piece_c(i);
    // The piece decreases on [l, dend) and does not decrease afterwards.
    double dend;
    if (a > 0.0)
      dend = std::clamp(-b / (2.0 * a), l, h);
    else
      dend = b < 0.0 ? h : l;

    if (dend > l) {
      const double ql = eval_quad(a, b, c, l);
      const double qd = eval_quad(a, b, c, dend);
      if (best <= qd) {
        emit_flat(dend);
      } else if (best < ql) {
        // crossing on the decreasing branch where q meets the running best
        double r;
        if (a > 0.0) {
          const double vx = -b / (2.0 * a);
          const double qmin = eval_quad(a, b, c, vx);
          r = vx - std::sqrt(std::max(0.0, (best - qmin) / a));
        } else {
          r = (best - c) / b;
        }
        r = std::clamp(r, l, dend);
        emit_flat(r);
        m.append(dend, a, b, c, true, copy_tag(f.piece_tag(i)));
      } else {
        m.append(dend, a, b, c, true, copy_tag(f.piece_tag(i)));
      }
      if (qd < best) {
        best = qd;
        best_arg = dend;
        best_tag = f.piece_tag(i);
      }
    }
    if (dend < h) {
      const double qd = eval_quad(a, b, c, dend);
      if (qd < best) {
        best = qd;
        best_arg = dend;
        best_tag = f.piece_tag(i);
      }
      emit_flat(h);
    }
  }

  // Pass 2: shift right by gap and clip back to the domain. The feasible
  // region [lo + gap, hi] is closed on the left; half-open pieces give the
  // boundary point to the finite side already.
  if (gap == 0.0) {
    m.merge_equal_pieces();
    return m;
  }
  PiecewiseQuadratic out;
  out.reset(lo);
  if (gap > hi - lo) {
    out.append(hi, 0.0, 0.0, 0.0, false, PieceTag{});
    return out;
  }
  out.append(std::min(lo + gap, std::nextafter(hi, lo)), 0.0, 0.0, 0.0, false,
             PieceTag{});
  for (std::size_t i = 0; i < m.piece_count(); ++i) {
    const double s = m.piece_lo(i) + gap;
    if (s >= hi) break;
    const double e = std::min(m.piece_hi(i) + gap, hi);
    const double a = m.piece_a(i), b = m.piece_b(i), c = m.piece_c(i);
    // substitute mu' = mu - gap
    out.append(e, a, b - 2.0 * a * gap, (a * gap - b) * gap + c,
               m.piece_finite(i), m.piece_tag(i));
  }
  if (out.domain_hi() < hi && m.piece_count() > 0) {
    // gap == hi - lo: the single feasible point mu = hi survives
    const std::size_t first = 0;
    out.append(hi, m.piece_a(first), m.piece_b(first) - 2.0 * m.piece_a(first) * gap,
               (m.piece_a(first) * gap - m.piece_b(first)) * gap + m.piece_c(first),
               m.piece_finite(first), m.piece_tag(first));
  }
  out.merge_equal_pieces();
  return out;
}

PiecewiseQuadratic min_more(const PiecewiseQuadratic& f, double gap) {
  if (!(gap >= 0.0)) throw std::invalid_argument("min_more: gap must be >= 0");
  const double lo = f.domain_lo(), hi = f.domain_hi();

  // Pass 1: running minimum from the right, collected right-to-left.
  struct RawPiece {
    double lo, hi, a, b, c;
    bool finite;
    PieceTag tag;
  };
  std::vector<RawPiece> rev;
  double best = kInf;
  double best_arg = kNaN;
  PieceTag best_tag{};

  auto emit_flat = [&](double seg_lo, double seg_hi) {
    if (!(seg_hi > seg_lo)) return;
    if (std::isfinite(best))
      rev.push_back({seg_lo, seg_hi, 0.0, 0.0, best, true,
                     flat_tag(best_tag, best_arg)});
    else
      rev.push_back({seg_lo, seg_hi, 0.0, 0.0, 0.0, false, PieceTag{}});
  };

  for (std::size_t k = f.piece_count(); k-- > 0;) {
    const double l = f.piece_lo(k), h = f.piece_hi(k);
    if (!f.piece_finite(k)) {
      emit_flat(l, h);
      continue;
    }
    const double a = f.piece_a(k), b = f.piece_b(k), c = f.piece_c(k);
    // The piece increases on [istart, h) and does not increase before it.
    double istart;
    if (a > 0.0)
      istart = std::clamp(-b / (2.0 * a), l, h);
    else
      istart = b > 0.0 ? l : h;

    if (istart < h) {
      const double qi = eval_quad(a, b, c, istart);
      const double qh = eval_quad(a, b, c, h);
      if (best <= qi) {
        emit_flat(istart, h);
      } else if (best < qh) {
        // crossing on the increasing branch
        double r;
        if (a > 0.0) {
          const double vx = -b / (2.0 * a);
          const double qmin = eval_quad(a, b, c, vx);
          r = vx + std::sqrt(std::max(0.0, (best - qmin) / a));
        } else {
          r = (best - c) / b;
        }
        r = std::clamp(r, istart, h);
        emit_flat(r, h);
        rev.push_back({istart, r, a, b, c, true, copy_tag(f.piece_tag(k))});
      } else {
        rev.push_back({istart, h, a, b, c, true, copy_tag(f.piece_tag(k))});
      }
      if (qi < best) {
        best = qi;
        best_arg = istart;
        best_tag = f.piece_tag(k);
      }
    }
    if (istart > l) {
      const double qi = eval_quad(a, b, c, istart);
      if (qi < best) {
        best = qi;
        best_arg = istart;
        best_tag = f.piece_tag(k);
      }
      emit_flat(l, istart);
    }
  }

  // Pass 2: shift left by gap, clip, and close with a sentinel at the top.
  // The feasible region [lo, hi - gap] is closed on the right (mu' = hi is
  // attainable), so the finite side is extended one ulp past hi - gap to
  // own the boundary point.
  PiecewiseQuadratic out;
  out.reset(lo);
  if (gap > hi - lo) {
    out.append(hi, 0.0, 0.0, 0.0, false, PieceTag{});
    return out;
  }
  for (std::size_t k = rev.size(); k-- > 0;) {
    const RawPiece& p = rev[k];
    const double e = p.hi - gap;
    if (e <= lo) continue;
    const double a = p.a, b = p.b, c = p.c;
    // substitute mu' = mu + gap
    out.append(std::min(e, hi), a, b + 2.0 * a * gap,
               (a * gap + b) * gap + c, p.finite, p.tag);
  }
  if (gap > 0.0) {
    if (!rev.empty()) {
      const RawPiece& top = rev.front();  // rightmost region, covers hi
      out.append(std::min(std::nextafter(hi - gap, hi), hi), top.a,
                 top.b + 2.0 * top.a * gap, (top.a * gap + top.b) * gap + top.c,
                 top.finite, top.tag);
    }
    out.append(hi, 0.0, 0.0, 0.0, false, PieceTag{});
  }
  out.merge_equal_pieces();
  return out;
}

PiecewiseQuadratic reflect(const PiecewiseQuadratic& f) {
  PiecewiseQuadratic out;
  out.reset(-f.domain_hi());
  for (std::size_t k = f.piece_count(); k-- > 0;) {
    PieceTag t = f.piece_tag(k);
    if (!std::isnan(t.restart)) t.restart = -t.restart;
    out.append(-f.piece_lo(k), f.piece_a(k), -f.piece_b(k), f.piece_c(k),
               f.piece_finite(k), t);
  }
  return out;
}

GlobalMin global_min(const PiecewiseQuadratic& f) {
  GlobalMin best{kInf, kNaN, 0};
  bool found = false;
  for (std::size_t i = 0; i < f.piece_count(); ++i) {
    if (!f.piece_finite(i)) continue;
    const double a = f.piece_a(i), b = f.piece_b(i), c = f.piece_c(i);
    const double vx = -b / (a + a);
    double x = vx > f.piece_lo(i) ? vx : f.piece_lo(i);
    x = x < f.piece_hi(i) ? x : f.piece_hi(i);
    double v = eval_quad(a, b, c, x);
    if (i + 1 < f.piece_count() && x == f.piece_hi(i)) {
      // The breakpoint belongs to the next piece. Where the function is
      // continuous that piece attains v at x anyway; where it jumps, the
      // reported minimum must move one ulp inside so value(argmin) reads it.
      const double v_next =
          f.piece_finite(i + 1)
              ? eval_quad(f.piece_a(i + 1), f.piece_b(i + 1), f.piece_c(i + 1), x)
              : kInf;
      if (!(v_next <= v + kContinuityTol * (1.0 + std::fabs(v)))) {
        x = std::nextafter(x, f.piece_lo(i));
        v = eval_quad(a, b, c, x);
      }
    }
    if (!found || v < best.value || (v == best.value && x < best.argmin)) {
      best = GlobalMin{v, x, i};
      found = true;
    }
  }
  if (!found) throw InfeasibleModel("infeasible model: cost function has no finite piece");
  return best;
}

std::string dump(const PiecewiseQuadratic& f) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < f.piece_count(); ++i) {
    format_double(out, f.piece_lo(i));
    out += ' ';
    format_double(out, f.piece_hi(i));
    out += ' ';
    if (f.piece_finite(i)) {
      format_double(out, f.piece_a(i));
      out += ' ';
      format_double(out, f.piece_b(i));
      out += ' ';
      format_double(out, f.piece_c(i));
    } else {
      out += "inf inf inf";
    }
    const PieceTag& t = f.piece_tag(i);
    std::snprintf(buf, sizeof buf, " %d/%d/%d/", t.sample, t.vertex, t.edge);
    out += buf;
    if (std::isnan(t.restart))
      out += "copy";
    else
      format_double(out, t.restart);
    out += '\n';
  }
  return out;
}

void check_invariants(const PiecewiseQuadratic& f) {
  if (f.piece_count() == 0) throw std::logic_error("pwq: no pieces");
  for (std::size_t i = 0; i < f.piece_count(); ++i) {
    if (!(f.piece_lo(i) < f.piece_hi(i)))
      throw std::logic_error("pwq: pieces must have positive width");
    if (i > 0 && f.piece_lo(i) != f.piece_hi(i - 1))
      throw std::logic_error("pwq: pieces must partition the domain");
    if (!f.piece_finite(i)) continue;
    if (!std::isfinite(f.piece_a(i)) || !std::isfinite(f.piece_b(i)) ||
        !std::isfinite(f.piece_c(i)))
      throw std::logic_error("pwq: non-finite coefficients on a finite piece");
    if (f.piece_a(i) < -1e-9)
      throw std::logic_error("pwq: negative curvature piece");
  }
}

void check_continuity(const PiecewiseQuadratic& f) {
  for (std::size_t i = 0; i + 1 < f.piece_count(); ++i) {
    if (!f.piece_finite(i) || !f.piece_finite(i + 1)) continue;
    const double x = f.piece_hi(i);
    const double left = eval_quad(f.piece_a(i), f.piece_b(i), f.piece_c(i), x);
    const double right =
        eval_quad(f.piece_a(i + 1), f.piece_b(i + 1), f.piece_c(i + 1), x);
    if (std::fabs(left - right) > kContinuityTol * (1.0 + std::fabs(left)))
      throw std::logic_error("pwq: discontinuity at breakpoint");
  }
}

}  // namespace gccd
