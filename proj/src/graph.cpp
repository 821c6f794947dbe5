#include "gccd/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace gccd {

const char* to_string(Direction d) {
  return d == Direction::up ? "up" : "down";
}

const Vertex* ConstraintGraph::find_vertex(int id) const {
  for (const auto& v : vertices)
    if (v.id == id) return &v;
  return nullptr;
}

const Vertex* ConstraintGraph::find_vertex_by_name(const std::string& name) const {
  for (const auto& v : vertices)
    if (v.name == name) return &v;
  return nullptr;
}

const Edge* ConstraintGraph::find_edge(int id) const {
  for (const auto& e : edges)
    if (e.id == id) return &e;
  return nullptr;
}

int ConstraintGraph::max_vertex_id() const {
  int m = -1;
  for (const auto& v : vertices) m = std::max(m, v.id);
  return m;
}

int ConstraintGraph::max_edge_id() const {
  int m = -1;
  for (const auto& e : edges) m = std::max(m, e.id);
  return m;
}

bool operator==(const Vertex& a, const Vertex& b) {
  return a.id == b.id && a.name == b.name;
}

bool operator==(const Edge& a, const Edge& b) {
  return a.id == b.id && a.source == b.source && a.target == b.target &&
         a.direction == b.direction && a.gap == b.gap && a.penalty == b.penalty;
}

bool operator==(const ConstraintGraph& a, const ConstraintGraph& b) {
  return a.vertices == b.vertices && a.edges == b.edges;
}

double evaluate_constraint(const Edge& e, double m_before, double m_after) {
  const double delta = e.direction == Direction::up ? 1.0 : -1.0;
  return delta * (m_before - m_after) + e.gap;
}

std::vector<Violation> validate_graph(const ConstraintGraph& g) {
  std::vector<Violation> out;
  auto add = [&out](bool hard, int vertex, int edge, std::string rule) {
    out.push_back(Violation{hard, vertex, edge, std::move(rule)});
  };

  if (g.vertices.empty()) add(true, -1, -1, "graph must have at least one vertex");

  std::set<int> vertex_ids;
  for (const auto& v : g.vertices) {
    if (v.id < 0) add(true, v.id, -1, "vertex id must be non-negative");
    if (!vertex_ids.insert(v.id).second)
      add(true, v.id, -1, "duplicate vertex id");
  }

  std::set<int> edge_ids;
  std::set<int> sources, targets;
  for (const auto& e : g.edges) {
    if (e.id < 0) add(true, -1, e.id, "edge id must be non-negative");
    if (!edge_ids.insert(e.id).second) add(true, -1, e.id, "duplicate edge id");
    if (!vertex_ids.count(e.source))
      add(true, -1, e.id, "edge source references missing vertex " + std::to_string(e.source));
    if (!vertex_ids.count(e.target))
      add(true, -1, e.id, "edge target references missing vertex " + std::to_string(e.target));
    if (!(e.penalty >= 0.0) || !std::isfinite(e.penalty))
      add(true, -1, e.id, "edge penalty must be finite and non-negative");
    if (!(e.gap >= 0.0) || !std::isfinite(e.gap))
      add(true, -1, e.id, "edge gap must be finite and non-negative");
    sources.insert(e.source);
    targets.insert(e.target);
  }

  // Circular-path convention: used for cyclic modeling and learning, so a
  // vertex with no outgoing or no incoming edge is flagged, but only as a
  // soft violation (an isolated-vertex graph still solves).
  if (!g.edges.empty()) {
    for (const auto& v : g.vertices) {
      if (!sources.count(v.id))
        add(false, v.id, -1, "vertex \"" + v.name + "\" has no outgoing edge (circular-path rule)");
      if (!targets.count(v.id))
        add(false, v.id, -1, "vertex \"" + v.name + "\" has no incoming edge (circular-path rule)");
    }
  }
  return out;
}

bool solvable(const ConstraintGraph& g) {
  for (const auto& v : validate_graph(g))
    if (v.hard) return false;
  return true;
}

bool fully_valid(const ConstraintGraph& g) {
  return validate_graph(g).empty();
}

void validate_labels(const LabelSet& labels, int n_samples) {
  int prev_end = 0;
  for (const auto& r : labels.regions) {
    if (r.start < 1 || r.end > n_samples)
      throw ParseError("label region [" + std::to_string(r.start) + "," +
                       std::to_string(r.end) + "] outside signal of length " +
                       std::to_string(n_samples));
    if (r.start > r.end)
      throw ParseError("label region start exceeds end");
    if (r.start <= prev_end)
      throw ParseError("label regions must be sorted and non-overlapping");
    prev_end = r.end;
  }
}

}  // namespace gccd
