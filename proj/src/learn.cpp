#include "gccd/learn.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "gccd/solver.hpp"

namespace gccd {
namespace {

constexpr EditKind kAllKinds[kEditKindCount] = {
    EditKind::add_node_v1,    EditKind::add_node_v2,  EditKind::add_node_v3,
    EditKind::delete_node_v1, EditKind::delete_node_v2,
    EditKind::add_two_nodes,  EditKind::flip_direction,
    EditKind::penalty_up,     EditKind::penalty_down,
    EditKind::gap_up,         EditKind::gap_down,
};

Direction opposite(Direction d) {
  return d == Direction::up ? Direction::down : Direction::up;
}

Vertex make_vertex(int id) {
  return Vertex{id, "N" + std::to_string(id)};
}

// Removes vertex `victim`, re-attaching the given side of its incident
// edges to `heir`; every other edge touching the victim is dropped.
ConstraintGraph splice_out(const ConstraintGraph& g, int victim, int heir,
                           bool retarget_incoming) {
  ConstraintGraph out;
  for (const auto& v : g.vertices)
    if (v.id != victim) out.vertices.push_back(v);
  for (const auto& e : g.edges) {
    Edge copy = e;
    if (retarget_incoming) {
      if (copy.source == victim) continue;
      if (copy.target == victim) copy.target = heir;
    } else {
      if (copy.target == victim) continue;
      if (copy.source == victim) copy.source = heir;
    }
    if (copy.source == victim || copy.target == victim) continue;
    out.edges.push_back(copy);
  }
  return out;
}

}  // namespace

const char* to_string(EditKind k) {
  switch (k) {
    case EditKind::add_node_v1: return "add-node-v1";
    case EditKind::add_node_v2: return "add-node-v2";
    case EditKind::add_node_v3: return "add-node-v3";
    case EditKind::delete_node_v1: return "delete-node-v1";
    case EditKind::delete_node_v2: return "delete-node-v2";
    case EditKind::add_two_nodes: return "add-two-nodes";
    case EditKind::flip_direction: return "flip-direction";
    case EditKind::penalty_up: return "penalty-up";
    case EditKind::penalty_down: return "penalty-down";
    case EditKind::gap_up: return "gap-up";
    case EditKind::gap_down: return "gap-down";
  }
  return "?";
}

void validate_config(const LearnConfig& config) {
  if (!(config.initial_gap >= 0.0))
    throw std::invalid_argument("learn config: g0 must be >= 0");
  if (!(config.initial_penalty >= 0.0))
    throw std::invalid_argument("learn config: lambda0 must be >= 0");
  if (!(config.penalty_step > 1.0) || !(config.gap_step > 1.0))
    throw std::invalid_argument("learn config: steps must be > 1");
  if (config.max_iterations < 0)
    throw std::invalid_argument("learn config: max_iterations must be >= 0");
}

std::string format_trace(const TrainingTrace& trace) {
  std::string out = "iter error n_candidates edit_kind anchor_edge\n";
  char buf[96];
  for (const auto& e : trace.entries) {
    std::snprintf(buf, sizeof buf, "%d %d %d %s %d\n", e.iter, e.error,
                  e.n_candidates, e.iter == 0 ? "init" : to_string(e.kind),
                  e.anchor_edge);
    out += buf;
  }
  return out;
}

ConstraintGraph initial_graph(const LearnConfig& config) {
  ConstraintGraph g;
  g.vertices = {Vertex{0, "A"}, Vertex{1, "R"}};
  g.edges = {
      Edge{0, 0, 1, Direction::up, config.initial_gap, config.initial_penalty},
      Edge{1, 1, 0, Direction::down, config.initial_gap, config.initial_penalty},
  };
  return g;
}

std::optional<ConstraintGraph> apply_edit(const ConstraintGraph& graph,
                                          const EditCandidate& edit,
                                          const LearnConfig& config) {
  const Edge* anchor = graph.find_edge(edit.anchor_edge);
  if (anchor == nullptr) return std::nullopt;
  const Edge e = *anchor;

  ConstraintGraph out = graph;
  auto edge_by_id = [&out](int id) -> Edge& {
    for (auto& ed : out.edges)
      if (ed.id == id) return ed;
    throw std::logic_error("apply_edit: lost anchor edge");
  };
  const int nv = graph.max_vertex_id() + 1;
  const int ne = graph.max_edge_id() + 1;

  switch (edit.kind) {
    case EditKind::add_node_v1:
    case EditKind::add_node_v2:
    case EditKind::add_node_v3: {
      // Split the anchor u->w around a fresh vertex x.
      const Direction second = edit.kind == EditKind::add_node_v2
                                   ? opposite(e.direction)
                                   : e.direction;
      const double gap =
          edit.kind == EditKind::add_node_v3 ? config.initial_gap : e.gap;
      out.vertices.push_back(make_vertex(nv));
      out.edges.erase(std::remove_if(out.edges.begin(), out.edges.end(),
                                     [&](const Edge& x) { return x.id == e.id; }),
                      out.edges.end());
      out.edges.push_back(Edge{ne, e.source, nv, e.direction, gap, e.penalty});
      out.edges.push_back(Edge{ne + 1, nv, e.target, second, gap, e.penalty});
      break;
    }
    case EditKind::delete_node_v1: {
      if (graph.vertices.size() < 3) return std::nullopt;
      out = splice_out(graph, e.source, e.target, /*retarget_incoming=*/true);
      break;
    }
    case EditKind::delete_node_v2: {
      if (graph.vertices.size() < 3) return std::nullopt;
      out = splice_out(graph, e.target, e.source, /*retarget_incoming=*/false);
      break;
    }
    case EditKind::add_two_nodes: {
      // Insert an up-down pulse pair, then the anchor continues as before.
      out.vertices.push_back(make_vertex(nv));
      out.vertices.push_back(make_vertex(nv + 1));
      out.edges.erase(std::remove_if(out.edges.begin(), out.edges.end(),
                                     [&](const Edge& x) { return x.id == e.id; }),
                      out.edges.end());
      out.edges.push_back(Edge{ne, e.source, nv, Direction::up, e.gap, e.penalty});
      out.edges.push_back(
          Edge{ne + 1, nv, nv + 1, Direction::down, e.gap, e.penalty});
      out.edges.push_back(
          Edge{ne + 2, nv + 1, e.target, e.direction, e.gap, e.penalty});
      break;
    }
    case EditKind::flip_direction:
      edge_by_id(e.id).direction = opposite(e.direction);
      break;
    case EditKind::penalty_up:
      edge_by_id(e.id).penalty = e.penalty * config.penalty_step;
      break;
    case EditKind::penalty_down:
      if (e.penalty == 0.0) return std::nullopt;
      edge_by_id(e.id).penalty = e.penalty / config.penalty_step;
      break;
    case EditKind::gap_up:
      if (e.gap == 0.0) return std::nullopt;
      edge_by_id(e.id).gap = e.gap * config.gap_step;
      break;
    case EditKind::gap_down:
      if (e.gap == 0.0) return std::nullopt;
      edge_by_id(e.id).gap = e.gap / config.gap_step;
      break;
  }

  if (!fully_valid(out)) return std::nullopt;
  return out;
}

std::vector<Candidate> enumerate_candidates(const ConstraintGraph& graph,
                                            const LearnConfig& config) {
  std::vector<const Edge*> edges;
  for (const auto& e : graph.edges) edges.push_back(&e);
  std::sort(edges.begin(), edges.end(),
            [](const Edge* a, const Edge* b) { return a->id < b->id; });

  std::vector<Candidate> out;
  for (const Edge* e : edges) {
    for (EditKind kind : kAllKinds) {
      EditCandidate edit{kind, e->id};
      if (auto g = apply_edit(graph, edit, config))
        out.push_back(Candidate{std::move(*g), edit});
    }
  }
  return out;
}

std::vector<ConstraintGraph> find_graph_candidates(const ConstraintGraph& graph,
                                                   const LearnConfig& config) {
  std::vector<ConstraintGraph> out;
  for (auto& c : enumerate_candidates(graph, config))
    out.push_back(std::move(c.graph));
  return out;
}

LabelError label_error(const Signal& signal, const ConstraintGraph& graph,
                       const LabelSet& labels, int peak_state) {
  validate_labels(labels, signal.n());
  LabelError err;
  std::vector<int> peaks;
  if (graph.find_vertex(peak_state) != nullptr) {
    const Segmentation seg = solve(signal, graph);
    peaks = extract_peaks(seg, peak_state);
  }
  // else: the peak state was edited away, every region is a miss

  std::size_t p = 0;
  for (const auto& region : labels.regions) {
    while (p < peaks.size() && peaks[p] < region.start) {
      ++err.fp;  // peak before this region and after the previous one
      ++p;
    }
    int inside = 0;
    while (p < peaks.size() && peaks[p] <= region.end) {
      ++inside;
      ++p;
    }
    if (inside == 0)
      ++err.fn;
    else
      err.fp += inside - 1;
  }
  err.fp += static_cast<int>(peaks.size() - p);  // peaks after the last region
  return err;
}

unsigned thread_cap() {
  const char* env = std::getenv("GCCD_THREADS");
  if (env == nullptr) return 0;
  const long v = std::strtol(env, nullptr, 10);
  return v > 0 ? static_cast<unsigned>(v) : 1;
}

namespace {

// Evaluates every candidate's label error, in parallel when allowed.
// Results are gathered per index, so the reduction below is deterministic.
std::vector<int> evaluate_all(const Signal& signal, const LabelSet& labels,
                              const std::vector<Candidate>& candidates,
                              int peak_state, unsigned threads) {
  std::vector<int> errors(candidates.size(), INT_MAX);
  unsigned n_workers = threads != 0 ? threads : std::thread::hardware_concurrency();
  const unsigned cap = thread_cap();
  if (cap != 0) n_workers = std::min(n_workers, cap);
  n_workers = std::max(1u, std::min<unsigned>(n_workers, candidates.size()));

  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= candidates.size()) return;
      try {
        errors[i] =
            label_error(signal, candidates[i].graph, labels, peak_state).total();
      } catch (const InfeasibleModel&) {
        errors[i] = INT_MAX;  // never selected
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return errors;
}

}  // namespace

LearnResult learn(const Signal& signal, const LabelSet& labels,
                  const ConstraintGraph& initial, const LearnConfig& config,
                  int peak_state) {
  validate_config(config);
  validate_labels(labels, signal.n());
  if (labels.regions.empty())
    throw std::invalid_argument("learn: at least one label region is required");
  if (!fully_valid(initial))
    throw std::invalid_argument("learn: initial graph fails validation");

  LearnResult result;
  result.graph = initial;
  int current_error = label_error(signal, initial, labels, peak_state).total();
  result.trace.entries.push_back(
      TraceEntry{0, current_error, 0, EditKind::gap_down, -1, initial});

  // Every iteration sweeps the full candidate set and keeps the best
  // strictly-improving edit; the search ends on the first sweep without one.
  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    const auto candidates = enumerate_candidates(result.graph, config);
    if (candidates.empty()) break;
    const auto errors =
        evaluate_all(signal, labels, candidates, peak_state, config.threads);

    // Best strict improvement; ties prefer fewer edges, then generation order.
    int best = -1;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (errors[i] >= current_error) continue;
      if (best < 0 || errors[i] < errors[best] ||
          (errors[i] == errors[best] &&
           candidates[i].graph.edges.size() < candidates[best].graph.edges.size()))
        best = static_cast<int>(i);
    }
    if (best < 0) break;

    current_error = errors[best];
    result.graph = candidates[best].graph;
    result.trace.entries.push_back(TraceEntry{
        iter, current_error, static_cast<int>(candidates.size()),
        candidates[best].edit.kind, candidates[best].edit.anchor_edge,
        result.graph});
  }
  return result;
}

std::vector<FoldSplit> split_folds(const LabelSet& labels, int k,
                                   std::uint64_t seed) {
  const int n = static_cast<int>(labels.regions.size());
  if (k < 2) throw std::invalid_argument("split_folds: k must be >= 2");
  if (n < k)
    throw std::invalid_argument("split_folds: need at least k label regions");

  const int base = n / k;
  const int remainder = n % k;
  std::vector<int> sizes(k, base);
  for (int j = 0; j < remainder; ++j)
    ++sizes[static_cast<int>((seed + static_cast<std::uint64_t>(j)) % k)];

  std::vector<FoldSplit> out(k);
  int cursor = 0;
  for (int fold = 0; fold < k; ++fold) {
    const int begin = cursor, end = cursor + sizes[fold];
    for (int i = 0; i < n; ++i) {
      if (i >= begin && i < end)
        out[fold].validation.regions.push_back(labels.regions[i]);
      else
        out[fold].train.regions.push_back(labels.regions[i]);
    }
    cursor = end;
  }
  return out;
}

}  // namespace gccd
