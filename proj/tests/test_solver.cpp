#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "gccd/solver.hpp"
#include "gccd/synth.hpp"
#include "gccd/types.hpp"
#include "oracle.hpp"
#include "util.hpp"

using namespace gccd;

namespace {

double recompute_cost(const Signal& signal, const ConstraintGraph& graph,
                      const Segmentation& seg) {
  double cost = 0.0;
  std::size_t segment = 0;
  for (int i = 1; i <= signal.n(); ++i) {
    while (segment < seg.boundaries.size() && i > seg.boundaries[segment])
      ++segment;
    const double d = signal.samples[i - 1] - seg.segment_means[segment];
    cost += d * d;
  }
  for (int edge_id : seg.edge_trace) cost += graph.find_edge(edge_id)->penalty;
  return cost;
}

void check_segmentation_valid(const Signal& signal, const ConstraintGraph& graph,
                              const Segmentation& seg) {
  REQUIRE(seg.n_samples == signal.n());
  REQUIRE(seg.segment_means.size() == seg.boundaries.size() + 1);
  REQUIRE(seg.segment_states.size() == seg.segment_means.size());
  REQUIRE(seg.edge_trace.size() == seg.boundaries.size());
  for (std::size_t k = 0; k < seg.boundaries.size(); ++k) {
    CHECK(seg.boundaries[k] >= 1);
    CHECK(seg.boundaries[k] <= signal.n() - 1);
    if (k > 0) CHECK(seg.boundaries[k] > seg.boundaries[k - 1]);
    const Edge* e = graph.find_edge(seg.edge_trace[k]);
    REQUIRE(e != nullptr);
    CHECK(seg.segment_states[k] == e->source);
    CHECK(seg.segment_states[k + 1] == e->target);
    CHECK(evaluate_constraint(*e, seg.segment_means[k], seg.segment_means[k + 1]) <=
          kFeasibilityTol);
  }
  const double recomputed = recompute_cost(signal, graph, seg);
  CHECK(std::fabs(recomputed - seg.total_cost) <=
        1e-9 * (1.0 + std::fabs(recomputed)));
}

ConstraintGraph single_vertex() {
  ConstraintGraph g;
  g.vertices = {Vertex{0, "A"}};
  return g;
}

}  // namespace

TEST_CASE("constant signal with a lone vertex fits one segment at zero cost") {
  const auto signal = testutil::make_signal({4, 4, 4, 4});
  const auto seg = solve(signal, single_vertex());
  CHECK(seg.boundaries.empty());
  REQUIRE(seg.segment_means.size() == 1);
  CHECK(seg.segment_means[0] == doctest::Approx(4.0));
  CHECK(seg.total_cost == doctest::Approx(0.0));
  check_segmentation_valid(signal, single_vertex(), seg);
}

TEST_CASE("step signal takes one up change through the A/R cycle") {
  const auto signal = testutil::make_signal({0, 0, 0, 5, 5, 5});
  const auto graph = testutil::ar_cycle(1.0, 1.0);
  const auto seg = solve(signal, graph);

  REQUIRE(seg.boundaries.size() == 1);
  CHECK(seg.boundaries[0] == 3);
  CHECK(seg.segment_means[0] == doctest::Approx(0.0));
  CHECK(seg.segment_means[1] == doctest::Approx(5.0));
  CHECK(seg.segment_states[0] == 0);  // A
  CHECK(seg.segment_states[1] == 1);  // R
  CHECK(seg.total_cost == doctest::Approx(1.0));
  check_segmentation_valid(signal, graph, seg);

  const double oracle = oracle::grid_dp_cost(signal, graph);
  CHECK(std::fabs(seg.total_cost - oracle) <= 3.0 * signal.n() * 1e-3);
}

TEST_CASE("huge penalties force a single segment") {
  const auto signal = testutil::make_signal({0, 0, 0, 5, 5, 5});
  const auto graph = testutil::ar_cycle(1.0, 1e6);
  const auto seg = solve(signal, graph);
  CHECK(seg.boundaries.empty());
  CHECK(seg.segment_means[0] == doctest::Approx(2.5));
  CHECK(seg.total_cost == doctest::Approx(37.5));

  const double oracle = oracle::grid_dp_cost(signal, graph);
  CHECK(std::fabs(seg.total_cost - oracle) <= 3.0 * signal.n() * 1e-3);
}

TEST_CASE("one-sample signal decodes to one segment") {
  const auto signal = testutil::make_signal({7});
  const auto seg = solve(signal, testutil::ar_cycle(1.0, 1.0));
  CHECK(seg.boundaries.empty());
  REQUIRE(seg.segment_means.size() == 1);
  CHECK(seg.segment_means[0] == doctest::Approx(7.0));
}

TEST_CASE("exact path ties return the later changepoint") {
  // Up self-loop with zero gap and zero penalty on a constant signal: the
  // no-change path and the change-at-1 path tie exactly.
  ConstraintGraph loop;
  loop.vertices = {Vertex{0, "A"}};
  loop.edges = {Edge{0, 0, 0, Direction::up, 0.0, 0.0}};
  const auto signal = testutil::make_signal({5, 5});
  const auto seg = solve(signal, loop);
  REQUIRE(seg.boundaries.size() == 1);
  CHECK(seg.boundaries[0] == 1);
  CHECK(seg.segment_means[0] == doctest::Approx(5.0));
  CHECK(seg.segment_means[1] == doctest::Approx(5.0));
  CHECK(seg.total_cost == doctest::Approx(0.0));

  // The mirrored tie resolves to "stay" instead: decisions prefer the
  // earlier candidate wherever the candidates coincide on an interval.
  ConstraintGraph down_loop = loop;
  down_loop.edges[0].direction = Direction::down;
  const auto seg2 = solve(signal, down_loop);
  CHECK(seg2.boundaries.empty());
}

TEST_CASE("start and end restrictions are honored") {
  const auto signal = testutil::make_signal({0, 0, 5, 5});
  const auto graph = testutil::ar_cycle(1.0, 1.0);

  SolveOptions options;
  options.start_states = {1};  // R
  options.end_states = {0};    // A
  const auto seg = solve(signal, graph, options);
  CHECK(seg.segment_states.front() == 1);
  CHECK(seg.segment_states.back() == 0);
  check_segmentation_valid(signal, graph, seg);
}

TEST_CASE("unreachable end state raises InfeasibleModel") {
  ConstraintGraph g;
  g.vertices = {Vertex{0, "A"}, Vertex{1, "B"}};
  const auto signal = testutil::make_signal({1, 2, 3});
  SolveOptions options;
  options.start_states = {0};
  options.end_states = {1};
  CHECK_THROWS_AS(solve(signal, g, options), InfeasibleModel);
}

TEST_CASE("non-finite samples are rejected") {
  auto signal = testutil::make_signal({1, 2, 3});
  signal.samples[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(solve(signal, single_vertex()), std::invalid_argument);
}

TEST_CASE("hard-invalid graphs are rejected") {
  ConstraintGraph g;
  g.vertices = {Vertex{0, "A"}};
  g.edges = {Edge{0, 0, 9, Direction::up, 0.0, 1.0}};
  CHECK_THROWS_AS(solve(testutil::make_signal({1, 2}), g), std::invalid_argument);
}

TEST_CASE("extract_peaks emits run midpoints") {
  Segmentation seg;
  seg.n_samples = 6;
  seg.boundaries = {2, 5};
  seg.edge_trace = {0, 1};
  seg.segment_means = {0, 5, 0};
  seg.segment_states = {0, 1, 0};
  CHECK(extract_peaks(seg, 1) == std::vector<int>{4});
  CHECK(extract_peaks(seg, 7).empty());

  Segmentation two;
  two.n_samples = 10;
  two.boundaries = {2, 5, 8};
  two.edge_trace = {0, 1, 0};
  two.segment_means = {0, 5, 0, 5};
  two.segment_states = {0, 1, 0, 1};
  CHECK(extract_peaks(two, 1) == std::vector<int>{4, 9});

  // adjacent same-state segments (self-loop changes) form one run
  Segmentation split_run;
  split_run.n_samples = 6;
  split_run.boundaries = {2, 4};
  split_run.edge_trace = {0, 0};
  split_run.segment_means = {1, 2, 3};
  split_run.segment_states = {1, 1, 1};
  CHECK(extract_peaks(split_run, 1) == std::vector<int>{3});
}

TEST_CASE("solver matches the brute-force grid oracle on random instances") {
  std::mt19937_64 rng(101);
  int solved = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto signal = testutil::random_signal(rng);
    const auto graph = testutil::random_graph(rng);
    const auto seg = solve(signal, graph);
    check_segmentation_valid(signal, graph, seg);
    const double oracle = oracle::grid_dp_cost(signal, graph);
    CHECK(seg.total_cost <= oracle + 1e-9 * (1.0 + oracle));
    CHECK(std::fabs(seg.total_cost - oracle) <= 3.0 * signal.n() * 1e-3);
    ++solved;
  }
  CHECK(solved == 150);
}

TEST_CASE("grid oracle agrees with literal enumeration on tiny instances") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 25; ++trial) {
    auto signal = testutil::random_signal(rng, 5);
    auto graph = testutil::random_graph(rng, 2, 2);
    const double dp = oracle::grid_dp_cost(signal, graph, 1e-2);
    const double full = oracle::enumerate_cost(signal, graph, 1e-2);
    CHECK(std::fabs(dp - full) <= 1e-9 * (1.0 + std::fabs(full)));
  }
}

TEST_CASE("offset equivariance: shifted signals shift the means only") {
  std::mt19937_64 rng(107);
  const double offsets[] = {1.0, -3.0, 10.0};
  for (int trial = 0; trial < 60; ++trial) {
    const auto signal = testutil::random_real_signal(rng);
    const auto graph = testutil::random_graph(rng);
    const auto base = solve(signal, graph);
    const double offset = offsets[trial % 3];
    auto shifted = signal;
    for (auto& z : shifted.samples) z += offset;
    const auto moved = solve(shifted, graph);
    CHECK(moved.boundaries == base.boundaries);
    CHECK(moved.segment_states == base.segment_states);
    CHECK(moved.edge_trace == base.edge_trace);
    REQUIRE(moved.segment_means.size() == base.segment_means.size());
    for (std::size_t i = 0; i < base.segment_means.size(); ++i)
      CHECK(moved.segment_means[i] ==
            doctest::Approx(base.segment_means[i] + offset).epsilon(1e-12));
  }
}

TEST_CASE("scale equivariance with matched gap and penalty scaling") {
  std::mt19937_64 rng(109);
  const double scales[] = {2.0, 0.5, 4.0};
  for (int trial = 0; trial < 60; ++trial) {
    const auto signal = testutil::random_signal(rng);
    const auto graph = testutil::random_graph(rng);
    const auto base = solve(signal, graph);
    const double alpha = scales[trial % 3];
    auto scaled_signal = signal;
    for (auto& z : scaled_signal.samples) z *= alpha;
    auto scaled_graph = graph;
    for (auto& e : scaled_graph.edges) {
      e.gap *= alpha;
      e.penalty *= alpha * alpha;
    }
    SolveOptions scaled_options;
    scaled_options.domain_margin = alpha;  // margin is in signal units
    const auto moved = solve(scaled_signal, scaled_graph, scaled_options);
    CHECK(moved.boundaries == base.boundaries);
    CHECK(moved.segment_states == base.segment_states);
    CHECK(moved.edge_trace == base.edge_trace);
    REQUIRE(moved.segment_means.size() == base.segment_means.size());
    for (std::size_t i = 0; i < base.segment_means.size(); ++i)
      CHECK(moved.segment_means[i] ==
            doctest::Approx(base.segment_means[i] * alpha).epsilon(1e-12));
  }
}

TEST_CASE("raising all penalties never adds changepoints (empirical)") {
  std::mt19937_64 rng(113);
  for (int trial = 0; trial < 80; ++trial) {
    const auto signal = testutil::random_signal(rng);
    const auto graph = testutil::random_graph(rng);
    const auto base = solve(signal, graph);
    for (double factor : {2.0, 10.0}) {
      auto heavier = graph;
      for (auto& e : heavier.edges) e.penalty *= factor;
      const auto seg = solve(signal, heavier);
      CHECK(seg.boundaries.size() <= base.boundaries.size());
    }
  }
}

TEST_CASE("pruning does not change results") {
  std::mt19937_64 rng(127);
  for (int trial = 0; trial < 40; ++trial) {
    const auto signal = testutil::random_signal(rng);
    const auto graph = testutil::random_graph(rng);
    SolveOptions no_prune;
    no_prune.prune = false;
    const auto a = solve(signal, graph);
    const auto b = solve(signal, graph, no_prune);
    CHECK(a.boundaries == b.boundaries);
    CHECK(a.segment_states == b.segment_states);
    CHECK(a.total_cost == doctest::Approx(b.total_cost).epsilon(1e-12));
  }
}

TEST_CASE("binding optima at the gap-feasibility boundary decode correctly") {
  // A drifting baseline with small beats and a large gap puts the optimal
  // final mean exactly at domain_hi - gap, where the down-change candidate's
  // feasible region closes. The stay path bounds the optimum from above.
  NoisyEcgParams p;
  p.n = 5400;
  p.seed = 5;
  p.noise = 6.0;
  p.baseline_wander = 40.0;
  p.amplitude = 5.0;
  const auto synth = synth_noisy_ecg(p);
  const auto graph = testutil::ar_cycle(80.0, 10000.0);
  const auto seg = solve(synth.signal, graph);
  check_segmentation_valid(synth.signal, graph, seg);

  double sum = 0.0;
  for (double z : synth.signal.samples) sum += z;
  const double mean = sum / synth.signal.n();
  double sse = 0.0;
  for (double z : synth.signal.samples) sse += (z - mean) * (z - mean);
  CHECK(seg.total_cost <= sse * (1.0 + 1e-9));
}

TEST_CASE("run_forward plus backtrack equals solve for a pinned end choice") {
  const auto signal = testutil::make_signal({0, 0, 0, 5, 5, 5});
  const auto graph = testutil::ar_cycle(1.0, 1.0);
  const auto state = run_forward(signal, graph);
  const auto m = global_min(state.final_cost(1));  // vertex R
  const auto seg = backtrack(state, EndChoice{1, m.argmin});
  CHECK(seg.boundaries == std::vector<int>{3});
  CHECK(seg.total_cost == doctest::Approx(1.0));
}
