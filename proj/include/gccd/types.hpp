#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gccd {

// Input could not be parsed; the CLI maps this to exit code 2.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No feasible path under the given graph and start/end restrictions;
// the CLI maps this to exit code 3.
struct InfeasibleModel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Uniformly sampled 1-D series. Sample indices are 1-based everywhere in
// the public interfaces and file formats.
struct Signal {
  std::vector<double> samples;
  double rate = 0.0;  // Hz
  std::string id;

  int n() const { return static_cast<int>(samples.size()); }
};

enum class Direction { up, down };

const char* to_string(Direction d);

struct Vertex {
  int id = 0;
  std::string name;
};

// A permitted change between hidden states. An up edge requires
// m_after >= m_before + gap, a down edge m_after <= m_before - gap.
struct Edge {
  int id = 0;
  int source = 0;
  int target = 0;
  Direction direction = Direction::up;
  double gap = 0.0;      // minimum magnitude of change, signal units
  double penalty = 0.0;  // cost of taking this change
};

// Directed multigraph of hidden states. Multiple edges between the same
// vertex pair are allowed.
struct ConstraintGraph {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;

  const Vertex* find_vertex(int id) const;
  const Vertex* find_vertex_by_name(const std::string& name) const;
  const Edge* find_edge(int id) const;
  int max_vertex_id() const;
  int max_edge_id() const;
};

bool operator==(const Vertex&, const Vertex&);
bool operator==(const Edge&, const Edge&);
bool operator==(const ConstraintGraph&, const ConstraintGraph&);

// Signed constraint value delta*(m_before - m_after) + gap with delta = +1
// for an up edge and -1 for a down edge. A transition is feasible iff the
// result is <= 0.
double evaluate_constraint(const Edge& e, double m_before, double m_after);

// Violations are data, not faults. `hard` violations (bad references,
// negative penalties, ...) make a graph unusable for solving; the
// remaining ones flag breaks of the single-circular-path convention that
// cyclic ECG modeling and graph learning rely on.
struct Violation {
  bool hard = true;
  int vertex = -1;  // offending vertex id, -1 if n/a
  int edge = -1;    // offending edge id, -1 if n/a
  std::string rule;
};

std::vector<Violation> validate_graph(const ConstraintGraph& g);

// True when no hard violations are present (the solver's precondition).
bool solvable(const ConstraintGraph& g);
// True when validate_graph returns nothing at all (learning's invariant).
bool fully_valid(const ConstraintGraph& g);

// Optimal piecewise-constant fit. boundaries[k] = i means the change
// happens between samples i and i+1 (1-based); edge_trace[k] is the edge
// taken there. "No change" is the absence of a boundary, never a stored id.
struct Segmentation {
  int n_samples = 0;
  std::vector<int> boundaries;
  std::vector<double> segment_means;
  std::vector<int> segment_states;  // vertex ids, one per segment
  std::vector<int> edge_trace;      // edge ids, one per boundary
  double total_cost = 0.0;
};

// Coverage band expected to contain exactly one detected peak
// (kind "peak-present" is the only label kind).
struct LabelRegion {
  int start = 0;  // 1-based, inclusive
  int end = 0;
};

struct LabelSet {
  std::vector<LabelRegion> regions;  // sorted, non-overlapping
};

// Throws ParseError if regions are unsorted, overlapping, or out of range.
void validate_labels(const LabelSet& labels, int n_samples);

}  // namespace gccd
