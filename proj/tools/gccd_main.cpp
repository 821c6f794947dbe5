#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gccd/io.hpp"
#include "gccd/learn.hpp"
#include "gccd/metrics.hpp"
#include "gccd/solver.hpp"
#include "gccd/synth.hpp"
#include "gccd/types.hpp"

namespace {

// Start/end restrictions accept vertex names or numeric ids, comma separated.
std::vector<int> parse_states(const std::string& names,
                              const gccd::ConstraintGraph& g,
                              const char* what) {
  std::vector<int> out;
  if (names.empty() || names == "any") return out;
  std::size_t pos = 0;
  while (pos <= names.size()) {
    const std::size_t comma = names.find(',', pos);
    const std::string token =
        names.substr(pos, comma == std::string::npos ? std::string::npos
                                                     : comma - pos);
    if (!token.empty()) {
      if (const gccd::Vertex* v = g.find_vertex_by_name(token)) {
        out.push_back(v->id);
      } else {
        try {
          const int id = std::stoi(token);
          if (g.find_vertex(id) == nullptr) throw std::invalid_argument(token);
          out.push_back(id);
        } catch (const std::exception&) {
          throw gccd::ParseError(std::string(what) + " state \"" + token +
                                 "\" is not a vertex of the graph");
        }
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int run_solve(const std::string& signal_path, const std::string& graph_path,
              const std::string& output, const std::string& start,
              const std::string& end, const std::string& peak_name) {
  const gccd::Signal signal = gccd::read_signal(signal_path);
  const gccd::ConstraintGraph graph = gccd::read_graph(graph_path);

  gccd::SolveOptions options;
  options.start_states = parse_states(start, graph, "start");
  options.end_states = parse_states(end, graph, "end");

  const gccd::Segmentation seg = gccd::solve(signal, graph, options);
  gccd::write_segmentation(output + ".segments", seg, graph);

  std::vector<int> peaks;
  if (const gccd::Vertex* v = graph.find_vertex_by_name(peak_name))
    peaks = gccd::extract_peaks(seg, v->id);
  gccd::write_annotations(output + ".peaks", peaks);

  std::cout << "wrote " << output << ".segments and " << output << ".peaks ("
            << peaks.size() << " peaks, cost "
            << gccd::format_double_exact(seg.total_cost) << ")\n";
  return 0;
}

int run_learn(const std::string& signal_path, const std::string& labels_path,
              const std::string& initial_path, bool default_init,
              const gccd::LearnConfig& config, int band_halfwidth, int folds,
              std::uint64_t seed, const std::string& peak_name,
              const std::string& output) {
  const gccd::Signal signal = gccd::read_signal(signal_path);
  const gccd::LabelSet labels =
      gccd::read_labels(labels_path, signal.n(), band_halfwidth);

  gccd::ConstraintGraph initial;
  if (default_init || initial_path.empty())
    initial = gccd::initial_graph(config);
  else
    initial = gccd::read_graph(initial_path);

  const gccd::Vertex* peak = initial.find_vertex_by_name(peak_name);
  if (peak == nullptr)
    throw gccd::ParseError("peak state \"" + peak_name +
                           "\" is not a vertex of the initial graph");

  const gccd::LearnResult result =
      gccd::learn(signal, labels, initial, config, peak->id);
  gccd::write_graph(output + ".graph", result.graph);
  {
    std::ofstream trace(output + ".trace");
    trace << gccd::format_trace(result.trace);
  }

  if (folds > 0) {
    std::ofstream report(output + ".folds");
    report << "fold train_regions val_regions train_error val_error iterations\n";
    const auto splits = gccd::split_folds(labels, folds, seed);
    for (std::size_t f = 0; f < splits.size(); ++f) {
      const gccd::FoldSplit& split = splits[f];
      const gccd::LearnResult fold_result =
          gccd::learn(signal, split.train, initial, config, peak->id);
      const int val_error =
          gccd::label_error(signal, fold_result.graph, split.validation, peak->id)
              .total();
      report << f << " " << split.train.regions.size() << " "
             << split.validation.regions.size() << " "
             << fold_result.trace.entries.back().error << " " << val_error
             << " " << fold_result.trace.entries.size() - 1 << "\n";
    }
  }

  std::cout << "wrote " << output << ".graph and " << output << ".trace (final error "
            << result.trace.entries.back().error << " after "
            << result.trace.entries.size() - 1 << " accepted edits)\n";
  return 0;
}

int run_eval(const std::string& annotations_path,
             const std::string& detections_path, double tolerance_ms,
             double rate, const std::string& method) {
  const std::vector<int> annotations = gccd::read_annotations(annotations_path);
  const std::vector<int> detections = gccd::read_annotations(detections_path);
  const int tolerance =
      static_cast<int>(std::lround(tolerance_ms / 1000.0 * rate));
  const gccd::MatchResult match =
      gccd::match_detections(annotations, detections, tolerance);
  std::cout << "# tp " << match.tp << " fp " << match.fp << " fn " << match.fn
            << " tolerance_samples " << tolerance << "\n";
  std::cout << gccd::format_metrics_table(
      {gccd::make_row(method, match.tp, match.fp, match.fn)});
  return 0;
}

int run_plot_data(const std::string& segmentation_path,
                  const std::string& signal_path) {
  const gccd::SegmentationFile file = gccd::read_segmentation(segmentation_path);
  const gccd::Signal signal = gccd::read_signal(signal_path);
  std::cout << gccd::format_plot_data(file, signal);
  return 0;
}

int run_synth(const std::string& kind, const std::string& output, int n,
              std::uint64_t seed, double noise, double wander, double amplitude,
              int period, int width, double rate) {
  gccd::SynthResult result;
  if (kind == "pulse-train") {
    gccd::PulseTrainParams p;
    p.n = n;
    p.seed = seed;
    p.noise = noise;
    p.baseline_wander = wander;
    if (amplitude > 0) p.amplitude = amplitude;
    if (period > 0) p.period = period;
    if (width > 0) p.width = width;
    p.rate = rate;
    result = gccd::synth_pulse_train(p);
  } else if (kind == "noisy-ecg") {
    gccd::NoisyEcgParams p;
    p.n = n;
    p.seed = seed;
    p.noise = noise;
    p.baseline_wander = wander;
    if (amplitude > 0) p.amplitude = amplitude;
    if (period > 0) p.period = period;
    p.rate = rate;
    result = gccd::synth_noisy_ecg(p);
  } else {
    throw gccd::ParseError("unknown synth kind \"" + kind +
                           "\" (expected pulse-train or noisy-ecg)");
  }
  gccd::write_signal(output + ".signal", result.signal);
  gccd::write_annotations(output + ".annotations", result.annotations);
  std::cout << "wrote " << output << ".signal (" << result.signal.n()
            << " samples) and " << output << ".annotations ("
            << result.annotations.size() << " peaks)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-constrained changepoint detection for R-peak delineation"};
  app.require_subcommand(1);

  // solve
  std::string signal_path, graph_path, output = "out";
  std::string start_states, end_states, peak_name = "R";
  auto* solve_cmd =
      app.add_subcommand("solve", "optimal segmentation under a constraint graph");
  solve_cmd->add_option("signal", signal_path, "signal file")->required();
  solve_cmd->add_option("graph", graph_path, "constraint graph file")->required();
  solve_cmd->add_option("-o,--output", output,
                        "output base (writes BASE.segments, BASE.peaks)");
  solve_cmd->add_option("--start", start_states, "allowed start states (default any)");
  solve_cmd->add_option("--end", end_states, "allowed end states (default any)");
  solve_cmd->add_option("--peak-state", peak_name, "peak state name (default R)");

  // learn
  std::string labels_path, initial_path;
  bool default_init = false;
  gccd::LearnConfig config;
  int band_halfwidth = 36;  // 100 ms at 360 Hz
  int folds = 0;
  std::uint64_t seed = 1;
  auto* learn_cmd =
      app.add_subcommand("learn", "greedy constraint-graph structure search");
  learn_cmd->add_option("signal", signal_path, "signal file")->required();
  learn_cmd->add_option("labels", labels_path, "label file (bands or peak indexes)")
      ->required();
  learn_cmd->add_option("initial", initial_path, "initial graph file");
  learn_cmd->add_flag("--default-init", default_init,
                      "start from the two-node A/R cycle");
  learn_cmd->add_option("--g0", config.initial_gap, "initial gap (default 100)");
  learn_cmd->add_option("--lambda0", config.initial_penalty,
                        "initial penalty (default 1e5)");
  learn_cmd->add_option("--penalty-step", config.penalty_step,
                        "multiplicative penalty step (default 2)");
  learn_cmd->add_option("--gap-step", config.gap_step,
                        "multiplicative gap step (default 2)");
  learn_cmd->add_option("--max-iter", config.max_iterations,
                        "accepted-iteration cap (default 50)");
  learn_cmd->add_option("--threads", config.threads,
                        "candidate evaluation threads (0 = auto)");
  learn_cmd->add_option("--band-halfwidth", band_halfwidth,
                        "half width when converting peak labels to bands");
  learn_cmd->add_option("--folds", folds, "also report k-fold cross-validation");
  learn_cmd->add_option("--seed", seed, "fold split seed");
  learn_cmd->add_option("--peak-state", peak_name, "peak state name (default R)");
  learn_cmd->add_option("-o,--output", output,
                        "output base (writes BASE.graph, BASE.trace[, BASE.folds])");

  // eval
  std::string annotations_path, detections_path, method = "GCCD";
  double tolerance_ms = 150.0, rate = 360.0;
  auto* eval_cmd = app.add_subcommand("eval", "score detections against annotations");
  eval_cmd->add_option("annotations", annotations_path, "gold peak index file")
      ->required();
  eval_cmd->add_option("detections", detections_path, "detected peak index file")
      ->required();
  eval_cmd->add_option("--tolerance-ms", tolerance_ms,
                       "match window in milliseconds (default 150)");
  eval_cmd->add_option("--rate", rate, "sampling rate in Hz (default 360)");
  eval_cmd->add_option("--method", method, "row label for the metrics table");

  // plot-data
  std::string segmentation_path;
  auto* plot_cmd =
      app.add_subcommand("plot-data", "emit per-sample overlay table for plotting");
  plot_cmd->add_option("segmentation", segmentation_path, "segmentation file")
      ->required();
  plot_cmd->add_option("signal", signal_path, "signal file")->required();

  // synth
  std::string kind;
  int n = 360, period = 0, width = 0;
  double noise = 0.0, wander = 0.0, amplitude = 0.0;
  double synth_rate = 360.0;
  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic fixtures");
  synth_cmd->add_option("kind", kind, "pulse-train or noisy-ecg")->required();
  synth_cmd->add_option("-o,--output", output,
                        "output base (writes BASE.signal, BASE.annotations)");
  synth_cmd->add_option("--n", n, "number of samples");
  synth_cmd->add_option("--seed", seed, "random seed");
  synth_cmd->add_option("--noise", noise, "gaussian noise sigma");
  synth_cmd->add_option("--baseline-wander", wander, "baseline wander amplitude");
  synth_cmd->add_option("--amplitude", amplitude,
                        "peak amplitude (default: 5 pulse-train, 200 noisy-ecg)");
  synth_cmd->add_option("--period", period, "samples per beat/pulse block");
  synth_cmd->add_option("--width", width, "pulse width (pulse-train only)");
  synth_cmd->add_option("--rate", synth_rate, "sampling rate in Hz");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (solve_cmd->parsed())
      return run_solve(signal_path, graph_path, output, start_states, end_states,
                       peak_name);
    if (learn_cmd->parsed())
      return run_learn(signal_path, labels_path, initial_path, default_init,
                       config, band_halfwidth, folds, seed, peak_name, output);
    if (eval_cmd->parsed())
      return run_eval(annotations_path, detections_path, tolerance_ms, rate,
                      method);
    if (plot_cmd->parsed()) return run_plot_data(segmentation_path, signal_path);
    if (synth_cmd->parsed())
      return run_synth(kind, output, n, seed, noise, wander, amplitude, period,
                       width, synth_rate);
  } catch (const gccd::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const gccd::InfeasibleModel& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
