#include "gccd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "gccd/kernels.hpp"

namespace gccd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::unordered_map<int, int> index_map(const std::vector<int>& ids) {
  std::unordered_map<int, int> m;
  for (std::size_t i = 0; i < ids.size(); ++i) m[ids[i]] = static_cast<int>(i);
  return m;
}

// Resolves a start/end restriction to vertex indices; empty means all.
std::vector<int> resolve_states(const std::vector<int>& ids,
                                const std::unordered_map<int, int>& map,
                                std::size_t n_vertices, const char* what) {
  std::vector<int> out;
  if (ids.empty()) {
    for (std::size_t i = 0; i < n_vertices; ++i) out.push_back(static_cast<int>(i));
    return out;
  }
  for (int id : ids) {
    auto it = map.find(id);
    if (it == map.end())
      throw std::invalid_argument(std::string(what) + " state " +
                                  std::to_string(id) + " is not a graph vertex");
    out.push_back(it->second);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

int SolverState::vertex_index(int vertex_id) const {
  for (std::size_t i = 0; i < vertex_ids_.size(); ++i)
    if (vertex_ids_[i] == vertex_id) return static_cast<int>(i);
  return -1;
}

std::span<const DecisionInterval> SolverState::decisions(int t,
                                                         int vertex_index) const {
  const std::size_t v = static_cast<std::size_t>(vertex_index);
  const std::size_t slot = static_cast<std::size_t>(t - 2) * vertex_ids_.size() + v;
  return {pool_.data() + offsets_[slot],
          pool_.data() + offsets_[slot + 1]};
}

SolverState run_forward(const Signal& signal, const ConstraintGraph& graph,
                        const SolveOptions& options) {
  if (signal.samples.empty())
    throw std::invalid_argument("solve: signal must have at least one sample");
  for (double z : signal.samples)
    if (!std::isfinite(z))
      throw std::invalid_argument("solve: signal contains a non-finite sample");
  if (!solvable(graph)) {
    std::string msg = "solve: graph fails validation:";
    for (const auto& v : validate_graph(graph))
      if (v.hard) msg += " [" + v.rule + "]";
    throw std::invalid_argument(msg);
  }

  const int n = signal.n();
  const std::size_t nv = graph.vertices.size();

  SolverState state;
  state.graph_ = graph;
  state.n_ = n;
  for (const auto& v : graph.vertices) state.vertex_ids_.push_back(v.id);
  const auto vmap = index_map(state.vertex_ids_);

  const auto start = resolve_states(options.start_states, vmap, nv, "start");
  state.end_indices_ = resolve_states(options.end_states, vmap, nv, "end");

  const auto [zmin, zmax] =
      std::minmax_element(signal.samples.begin(), signal.samples.end());
  const double lo = *zmin - options.domain_margin;
  const double hi = *zmax + options.domain_margin;

  // Edges grouped by target, ascending id so envelope ties resolve to the
  // lower edge id.
  std::vector<std::vector<const Edge*>> edges_in(nv);
  {
    std::vector<const Edge*> sorted;
    for (const auto& e : graph.edges) sorted.push_back(&e);
    std::sort(sorted.begin(), sorted.end(),
              [](const Edge* a, const Edge* b) { return a->id < b->id; });
    for (const Edge* e : sorted) edges_in[vmap.at(e->target)].push_back(e);
  }

  // Upper bound for pruning: the cost of the cheapest feasible no-change
  // path (needs a vertex allowed as both start and end). Pieces whose
  // minimum exceeds it can never be part of an optimum.
  double prune_bound = kInf;
  if (options.prune) {
    bool common = false;
    for (int s : start)
      if (std::binary_search(state.end_indices_.begin(), state.end_indices_.end(), s))
        common = true;
    if (common) {
      double sum = 0.0, sumsq = 0.0;
      kernels::active().sum_sumsq(signal.samples.data(), signal.samples.size(),
                                  &sum, &sumsq);
      const double sse = sumsq - sum * sum / n;
      prune_bound = sse + kFeasibilityTol * (1.0 + std::fabs(sse));
    }
  }

  std::vector<PiecewiseQuadratic> prev(nv), next(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const bool allowed = std::binary_search(start.begin(), start.end(),
                                            static_cast<int>(v));
    PieceTag tag;
    tag.sample = 1;
    tag.vertex = static_cast<std::int32_t>(state.vertex_ids_[v]);
    prev[v] = allowed ? PiecewiseQuadratic::constant(lo, hi, 0.0, tag)
                      : PiecewiseQuadratic::infinite(lo, hi);
    prev[v].add_point_loss(signal.samples[0]);
    if (std::isfinite(prune_bound)) prev[v].prune_above(prune_bound);
    prev[v].merge_equal_pieces();
  }

  if (n > 1) state.offsets_.reserve(static_cast<std::size_t>(n - 1) * nv + 1);
  state.offsets_.push_back(0);

  for (int t = 2; t <= n; ++t) {
    const double z = signal.samples[t - 1];
    for (std::size_t v = 0; v < nv; ++v) {
      PiecewiseQuadratic acc = prev[v];
      for (const Edge* e : edges_in[v]) {
        const std::size_t src = static_cast<std::size_t>(vmap.at(e->source));
        if (prev[src].all_infinite()) continue;
        PiecewiseQuadratic cand = e->direction == Direction::up
                                      ? min_less(prev[src], e->gap)
                                      : min_more(prev[src], e->gap);
        if (cand.all_infinite()) continue;
        cand.add_constant(e->penalty);
        cand.stamp(t, static_cast<std::int32_t>(state.vertex_ids_[v]), e->id);
        acc = min_envelope(acc, cand);
      }
      acc.add_point_loss(z);
      if (std::isfinite(prune_bound)) {
        acc.prune_above(prune_bound);
        acc.merge_equal_pieces();
      }

      // Record this update's winner intervals: pieces stamped with the
      // current sample are changes, everything else is "stay".
      for (std::size_t p = 0; p < acc.piece_count(); ++p) {
        const PieceTag& tag = acc.piece_tag(p);
        DecisionInterval d;
        d.hi = acc.piece_hi(p);
        if (tag.sample == t && tag.edge >= 0) {
          d.edge = tag.edge;
          d.restart = tag.restart;
        } else {
          d.edge = -1;
          d.restart = 0.0;
        }
        const bool extend =
            state.pool_.size() > state.offsets_.back() &&
            state.pool_.back().edge == d.edge &&
            (d.edge < 0 ||
             (std::isnan(state.pool_.back().restart)
                  ? std::isnan(d.restart)
                  : state.pool_.back().restart == d.restart));
        if (extend)
          state.pool_.back().hi = d.hi;
        else
          state.pool_.push_back(d);
      }
      state.offsets_.push_back(state.pool_.size());
      next[v] = std::move(acc);
    }
    std::swap(prev, next);
  }

  state.final_ = std::move(prev);
  return state;
}

Segmentation backtrack(const SolverState& state, const EndChoice& choice) {
  const ConstraintGraph& graph = state.graph();
  const int n = state.n_samples();

  Segmentation seg;
  seg.n_samples = n;
  seg.total_cost = state.final_cost(choice.vertex_index).value(choice.mu);

  int v = choice.vertex_index;
  double mu = choice.mu;

  // Reverse pass; segments and boundaries come out back-to-front.
  for (int t = n; t >= 2; --t) {
    const auto decisions = state.decisions(t, v);
    if (decisions.empty())
      throw std::logic_error("backtrack: missing decision record");
    std::size_t k = 0;
    while (k + 1 < decisions.size() && decisions[k].hi <= mu) ++k;
    const DecisionInterval& d = decisions[k];
    if (d.edge < 0) continue;  // no change between t-1 and t

    const Edge* e = graph.find_edge(d.edge);
    if (e == nullptr) throw std::logic_error("backtrack: decision names unknown edge");

    seg.boundaries.push_back(t - 1);
    seg.edge_trace.push_back(e->id);
    seg.segment_means.push_back(mu);
    seg.segment_states.push_back(state.vertex_ids()[v]);

    mu = std::isnan(d.restart)
             ? (e->direction == Direction::up ? mu - e->gap : mu + e->gap)
             : d.restart;
    v = state.vertex_index(e->source);
    if (v < 0) throw std::logic_error("backtrack: edge source not in graph");
  }

  seg.segment_means.push_back(mu);
  seg.segment_states.push_back(state.vertex_ids()[v]);

  std::reverse(seg.boundaries.begin(), seg.boundaries.end());
  std::reverse(seg.edge_trace.begin(), seg.edge_trace.end());
  std::reverse(seg.segment_means.begin(), seg.segment_means.end());
  std::reverse(seg.segment_states.begin(), seg.segment_states.end());
  return seg;
}

Segmentation solve(const Signal& signal, const ConstraintGraph& graph,
                   const SolveOptions& options) {
  const SolverState state = run_forward(signal, graph, options);

  // Readout over allowed end states: smallest value, then smallest argmin,
  // then lowest vertex index.
  bool found = false;
  EndChoice choice;
  double best_value = kInf;
  for (int v : state.allowed_end()) {
    const PiecewiseQuadratic& f = state.final_cost(v);
    if (f.all_infinite()) continue;
    const GlobalMin m = global_min(f);
    if (!found || m.value < best_value ||
        (m.value == best_value && m.argmin < choice.mu)) {
      found = true;
      best_value = m.value;
      choice = EndChoice{v, m.argmin};
    }
  }
  if (!found)
    throw InfeasibleModel("infeasible model: no allowed path from start to end states");
  return backtrack(state, choice);
}

std::vector<int> extract_peaks(const Segmentation& seg, int peak_state) {
  // Runs over samples: consecutive segments in the same state (self-loop
  // edges) form one run.
  std::vector<int> peaks;
  const std::size_t n_segments = seg.segment_means.size();
  std::size_t i = 0;
  while (i < n_segments) {
    const int start =
        i == 0 ? 1 : seg.boundaries[i - 1] + 1;
    std::size_t j = i;
    while (j + 1 < n_segments && seg.segment_states[j + 1] == seg.segment_states[i])
      ++j;
    const int end =
        j + 1 == n_segments ? seg.n_samples : seg.boundaries[j];
    if (seg.segment_states[i] == peak_state)
      peaks.push_back((start + end) / 2);
    i = j + 1;
  }
  return peaks;
}

}  // namespace gccd
