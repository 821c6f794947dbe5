#pragma once

#include <random>
#include <string>

#include "gccd/types.hpp"

// Shared random-instance generators for the property suites. Everything is
// seeded, so test runs are reproducible.

namespace testutil {

inline gccd::Signal random_signal(std::mt19937_64& rng, int max_n = 12) {
  std::uniform_int_distribution<int> len(1, max_n);
  std::uniform_int_distribution<int> val(0, 9);
  gccd::Signal s;
  s.rate = 360.0;
  s.id = "random";
  const int n = len(rng);
  for (int i = 0; i < n; ++i) s.samples.push_back(val(rng));
  return s;
}

// Continuous-valued variant: almost surely free of exactly-tied optima,
// which integer grids produce by symmetry. Used by the equivariance
// suites, where ties make "the" returned optimum ill-defined.
inline gccd::Signal random_real_signal(std::mt19937_64& rng, int max_n = 12) {
  std::uniform_int_distribution<int> len(1, max_n);
  std::uniform_real_distribution<double> val(0.0, 9.0);
  gccd::Signal s;
  s.rate = 360.0;
  s.id = "random-real";
  const int n = len(rng);
  for (int i = 0; i < n; ++i) s.samples.push_back(val(rng));
  return s;
}

inline gccd::ConstraintGraph random_graph(std::mt19937_64& rng, int max_v = 3,
                                          int max_e = 4) {
  std::uniform_int_distribution<int> nvd(1, max_v);
  gccd::ConstraintGraph g;
  const int nv = nvd(rng);
  for (int i = 0; i < nv; ++i)
    g.vertices.push_back(gccd::Vertex{i, "S" + std::to_string(i)});

  std::uniform_int_distribution<int> ned(0, max_e);
  std::uniform_int_distribution<int> vtx(0, nv - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> gapd(0, 2);
  std::uniform_int_distribution<int> lamd(0, 2);
  const double penalties[3] = {0.1, 1.0, 10.0};
  const int ne = ned(rng);
  for (int k = 0; k < ne; ++k) {
    gccd::Edge e;
    e.id = k;
    e.source = vtx(rng);
    e.target = vtx(rng);
    e.direction = coin(rng) ? gccd::Direction::up : gccd::Direction::down;
    e.gap = gapd(rng);
    e.penalty = penalties[lamd(rng)];
    g.edges.push_back(e);
  }
  return g;
}

// The two-node A/R cycle from the learning chapter's starting point.
inline gccd::ConstraintGraph ar_cycle(double gap, double penalty) {
  gccd::ConstraintGraph g;
  g.vertices = {gccd::Vertex{0, "A"}, gccd::Vertex{1, "R"}};
  g.edges = {
      gccd::Edge{0, 0, 1, gccd::Direction::up, gap, penalty},
      gccd::Edge{1, 1, 0, gccd::Direction::down, gap, penalty},
  };
  return g;
}

inline gccd::Signal make_signal(std::vector<double> samples, double rate = 360.0,
                                const std::string& id = "fixture") {
  gccd::Signal s;
  s.samples = std::move(samples);
  s.rate = rate;
  s.id = id;
  return s;
}

}  // namespace testutil
