#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gccd/types.hpp"

namespace gccd {

// The 11 per-edge graph edits. Node additions split the anchor edge around
// fresh vertices; deletions splice the anchor's source or target out of the
// path; the rest adjust one edge's parameters.
enum class EditKind {
  add_node_v1,     // split keeping the direction on both halves
  add_node_v2,     // split into direction + opposite (a bump)
  add_node_v3,     // like v1 but both gaps reset to the configured g0
  delete_node_v1,  // delete the anchor's source, re-target its in-edges
  delete_node_v2,  // delete the anchor's target, re-source its out-edges
  add_two_nodes,   // insert an up-down pulse pair before the anchor
  flip_direction,
  penalty_up,
  penalty_down,
  gap_up,
  gap_down,
};

inline constexpr int kEditKindCount = 11;
const char* to_string(EditKind k);

struct EditCandidate {
  EditKind kind;
  int anchor_edge;
};

struct LearnConfig {
  double initial_gap = 100.0;     // g0
  double initial_penalty = 1e5;   // lambda0
  double penalty_step = 2.0;      // multiplicative, > 1
  double gap_step = 2.0;          // multiplicative, > 1
  int max_iterations = 50;        // accepted-iteration cap
  unsigned threads = 0;           // 0 = hardware; GCCD_THREADS caps either way
};

void validate_config(const LearnConfig& config);  // throws std::invalid_argument

struct LabelError {
  int fp = 0;
  int fn = 0;
  int total() const { return fp + fn; }
};

struct TraceEntry {
  int iter = 0;
  int error = 0;
  int n_candidates = 0;
  EditKind kind = EditKind::gap_down;  // meaningless at iter 0
  int anchor_edge = -1;
  ConstraintGraph graph;
};

// Accepted-iteration history; errors strictly decrease after iter 0.
struct TrainingTrace {
  std::vector<TraceEntry> entries;
};

// One line per iteration: "iter error n_candidates edit_kind anchor_edge".
std::string format_trace(const TrainingTrace& trace);

// The two-node A/R cycle used to seed learning (vertex 0 = "A",
// vertex 1 = "R", an up edge into R and a down edge back).
ConstraintGraph initial_graph(const LearnConfig& config);

// Applies one edit; nullopt when the edit is inapplicable (identity edits,
// deletions that would break the graph, results failing validation).
std::optional<ConstraintGraph> apply_edit(const ConstraintGraph& graph,
                                          const EditCandidate& edit,
                                          const LearnConfig& config);

struct Candidate {
  ConstraintGraph graph;
  EditCandidate edit;
};

// All applicable edits of all edges, in (edge id, kind) order. Every
// returned graph passes full validation; the count is at most 11 * |E|.
std::vector<Candidate> enumerate_candidates(const ConstraintGraph& graph,
                                            const LearnConfig& config);
std::vector<ConstraintGraph> find_graph_candidates(const ConstraintGraph& graph,
                                                   const LearnConfig& config);

// Solves, extracts peaks of peak_state, and scores against the coverage
// bands: a region with no peak is one FN, a region with k > 1 peaks adds
// k - 1 FPs, and every peak outside all regions is one FP.
LabelError label_error(const Signal& signal, const ConstraintGraph& graph,
                       const LabelSet& labels, int peak_state);

struct LearnResult {
  ConstraintGraph graph;
  TrainingTrace trace;
};

// Greedy structure search: evaluate the initial error, then repeatedly
// sweep all candidates and accept the best strictly-improving one. Ties
// prefer fewer edges, then earlier generation order. Candidate evaluation
// may run on several threads; the winner equals the sequential choice.
LearnResult learn(const Signal& signal, const LabelSet& labels,
                  const ConstraintGraph& initial, const LearnConfig& config,
                  int peak_state);

struct FoldSplit {
  LabelSet train;
  LabelSet validation;
};

// k contiguous near-equal blocks of regions; each region validates in
// exactly one fold. The seed rotates which folds take the remainder.
std::vector<FoldSplit> split_folds(const LabelSet& labels, int k,
                                   std::uint64_t seed);

// Effective parallelism bound from the GCCD_THREADS environment variable
// (0 = unlimited).
unsigned thread_cap();

}  // namespace gccd
