#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace gccd {

inline constexpr double kCoeffMergeTol = 1e-12;     // coefficient equality
inline constexpr double kDiscriminantCutoff = 1e-12;  // near-tangent = no crossing
inline constexpr double kContinuityTol = 1e-9;      // relative, at breakpoints
inline constexpr double kFeasibilityTol = 1e-9;     // constraint slack on outputs

// Provenance of a piece: the DP event (sample, vertex, edge) that created
// it. For change pieces, `restart` is the source-side argmin; NaN means
// "copy" (the argmin is mu - gap for up edges, mu + gap for down edges).
struct PieceTag {
  std::int32_t sample = -1;
  std::int32_t vertex = -1;
  std::int32_t edge = -1;
  double restart = std::numeric_limits<double>::quiet_NaN();
};

bool same_tag(const PieceTag& a, const PieceTag& b);

// Piecewise-quadratic function of the candidate mean mu over a fixed
// domain [lo, hi]. Pieces partition the domain with no gaps or overlaps;
// piece i covers [x[i], x[i+1]) (the last piece is closed at hi).
// Infeasible regions are sentinel pieces flagged infinite, never large
// finite constants. Coefficients are stored as parallel arrays so the
// per-sample update loops can run through the SIMD kernels.
class PiecewiseQuadratic {
 public:
  PiecewiseQuadratic() = default;

  static PiecewiseQuadratic constant(double lo, double hi, double value,
                                     PieceTag tag = {});
  static PiecewiseQuadratic quadratic(double lo, double hi, double a, double b,
                                      double c, PieceTag tag = {});
  static PiecewiseQuadratic infinite(double lo, double hi);

  double domain_lo() const { return x_.front(); }
  double domain_hi() const { return x_.back(); }
  std::size_t piece_count() const { return a_.size(); }

  double piece_lo(std::size_t i) const { return x_[i]; }
  double piece_hi(std::size_t i) const { return x_[i + 1]; }
  double piece_a(std::size_t i) const { return a_[i]; }
  double piece_b(std::size_t i) const { return b_[i]; }
  double piece_c(std::size_t i) const { return c_[i]; }
  bool piece_finite(std::size_t i) const { return finite_[i] != 0; }
  const PieceTag& piece_tag(std::size_t i) const { return tags_[i]; }

  bool all_infinite() const;

  // Index of the piece owning mu: half-open [lo, hi) ownership, so a
  // breakpoint belongs to the piece on its right; domain_hi belongs to the
  // last piece.
  std::size_t piece_index(double mu) const;
  double value(double mu) const;  // +inf on infinite pieces

  // In-place pointwise updates; breakpoints, tags, and flags unchanged.
  void add_quadratic(double da, double db, double dc);
  void add_point_loss(double z) { add_quadratic(1.0, -2.0 * z, z * z); }
  void add_constant(double k) { add_quadratic(0.0, 0.0, k); }

  // Overwrites piece identities (used when a shifted source function
  // becomes "change via edge e at sample t"); keeps restart values.
  void stamp(std::int32_t sample, std::int32_t vertex, std::int32_t edge);

  // Marks every piece whose minimum exceeds `bound` infinite. Dropped
  // pieces can never win, so this preserves the optimum.
  void prune_above(double bound);

  // Merges adjacent pieces with equal coefficients (within kCoeffMergeTol)
  // and identical tags; adjacent infinite pieces always merge.
  void merge_equal_pieces();

  // Construction interface used by the calculus operations.
  void reset(double lo);
  void append(double hi, double a, double b, double c, bool finite,
              PieceTag tag);

 private:
  std::vector<double> x_;  // piece_count() + 1 breakpoints
  std::vector<double> a_, b_, c_;
  std::vector<std::uint8_t> finite_;
  std::vector<PieceTag> tags_;

  mutable std::vector<double> scratch_val_, scratch_arg_;  // prune workspace
};

// g(mu) = f(mu) + (mu - z)^2, piece count unchanged.
PiecewiseQuadratic add_point_loss(const PiecewiseQuadratic& f, double z);
// f + k pointwise.
PiecewiseQuadratic add_constant(const PiecewiseQuadratic& f, double k);

// h(mu) = min(f(mu), g(mu)); crossing roots become breakpoints, each output
// piece carries the winning input's tag. Exact ties prefer f.
PiecewiseQuadratic min_envelope(const PiecewiseQuadratic& f,
                                const PiecewiseQuadratic& g);

// h(mu) = min over mu' <= mu - gap of f(mu'): the running minimum from the
// left shifted right by gap, infinite where mu - gap < domain_lo.
PiecewiseQuadratic min_less(const PiecewiseQuadratic& f, double gap);
// Mirror image: h(mu) = min over mu' >= mu + gap of f(mu').
PiecewiseQuadratic min_more(const PiecewiseQuadratic& f, double gap);

// reflect(f)(mu) = f(-mu) on the mirrored domain.
PiecewiseQuadratic reflect(const PiecewiseQuadratic& f);

struct GlobalMin {
  double value = 0.0;
  double argmin = 0.0;
  std::size_t piece = 0;
};

// Exact minimizer over all pieces; ties broken by smallest argmin.
// Throws InfeasibleModel when every piece is infinite.
GlobalMin global_min(const PiecewiseQuadratic& f);

// One line per piece: "lo hi a b c tag", tag = sample/vertex/edge/restart.
std::string dump(const PiecewiseQuadratic& f);

// Partition and convexity-per-piece checks; throws std::logic_error naming
// the broken rule.
void check_invariants(const PiecewiseQuadratic& f);

// Neighbor equality at finite-finite breakpoints, within
// kContinuityTol * (1 + |value|). Envelopes taken against functions with
// infinite regions jump where a competitor drops out, so this only applies
// to functions built from finite inputs.
void check_continuity(const PiecewiseQuadratic& f);

}  // namespace gccd
