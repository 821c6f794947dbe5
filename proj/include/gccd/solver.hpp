#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gccd/pwq.hpp"
#include "gccd/types.hpp"

namespace gccd {

struct SolveOptions {
  std::vector<int> start_states;  // vertex ids; empty = any
  std::vector<int> end_states;    // vertex ids; empty = any
  bool prune = true;              // drop pieces above the single-segment bound
  double domain_margin = 1.0;     // signal units beyond [min, max]
};

// Winning decision on one mu-interval of one (sample, vertex) update.
// edge < 0 encodes "stay"; for changes, restart is the source-side mean
// (NaN = mu -/+ the edge gap).
struct DecisionInterval {
  double hi = 0.0;
  double restart = 0.0;
  std::int32_t edge = -1;
};

// Forward-pass result: final cost-to-come functions plus the per-(sample,
// vertex) winner intervals needed to decode the argmin path in one reverse
// sweep. Memory is O(N * |V| * avg intervals).
class SolverState {
 public:
  int n_samples() const { return n_; }
  const ConstraintGraph& graph() const { return graph_; }
  const std::vector<int>& vertex_ids() const { return vertex_ids_; }
  int vertex_index(int vertex_id) const;

  // Cost function of a vertex at the final sample.
  const PiecewiseQuadratic& final_cost(int vertex_index) const {
    return final_[vertex_index];
  }

  // Decisions recorded at sample t (2 <= t <= N) for a vertex index.
  std::span<const DecisionInterval> decisions(int t, int vertex_index) const;

  const std::vector<int>& allowed_end() const { return end_indices_; }

 private:
  friend SolverState run_forward(const Signal&, const ConstraintGraph&,
                                 const SolveOptions&);
  ConstraintGraph graph_;
  std::vector<int> vertex_ids_;
  std::vector<int> end_indices_;
  int n_ = 0;
  std::vector<PiecewiseQuadratic> final_;
  std::vector<std::uint64_t> offsets_;  // (t-2)*V + v -> pool range
  std::vector<DecisionInterval> pool_;
};

struct EndChoice {
  int vertex_index = 0;
  double mu = 0.0;
};

// Forward dynamic program over (sample, vertex) cost-to-come functions:
//   C[v,t](mu) = min(C[v,t-1](mu),
//                    min over edges e into v of shift_e(C[src(e),t-1]) + penalty_e)
//                + (mu - z_t)^2
// where shift_e is min_less(gap) for up edges and min_more(gap) for down
// edges. Throws std::invalid_argument on NaN samples or hard-invalid graphs.
SolverState run_forward(const Signal& signal, const ConstraintGraph& graph,
                        const SolveOptions& options = {});

// Decodes the recorded winners from (N, end_choice) back to sample 1.
Segmentation backtrack(const SolverState& state, const EndChoice& choice);

// Globally optimal segmentation; throws InfeasibleModel when no allowed
// path exists.
Segmentation solve(const Signal& signal, const ConstraintGraph& graph,
                   const SolveOptions& options = {});

// Midpoint (floor of the 1-based index mean) of every maximal run of
// samples assigned to peak_state.
std::vector<int> extract_peaks(const Segmentation& seg, int peak_state);

}  // namespace gccd
