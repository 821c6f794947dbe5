#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gccd {

// A metric whose denominator is zero cannot be reported.
struct UndefinedMetric : std::runtime_error {
  explicit UndefinedMetric(const std::string& name)
      : std::runtime_error("undefined metric: " + name), metric(name) {}
  std::string metric;
};

struct DetectionMatch {
  int annotation = 0;  // index into the annotation list
  int detection = 0;   // index into the detection list
  int offset = 0;      // detection sample - annotation sample
};

struct MatchResult {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  std::vector<DetectionMatch> matches;
};

// Greedy nearest-neighbor matching within +-tolerance samples, walking
// annotations left to right (nearest unmatched detection wins, ties to the
// left). Unmatched annotations count as FN, unmatched detections as FP.
MatchResult match_detections(const std::vector<int>& annotations,
                             const std::vector<int>& detections,
                             int tolerance);

struct Metrics {
  double sen = 0.0;  // 100 * TP / (TP + FN)
  double ppr = 0.0;  // 100 * TP / (TP + FP)
  double der = 0.0;  // 100 * (FN + FP) / (TP + FN)
};

Metrics compute_metrics(const MatchResult& result);
Metrics compute_metrics(int tp, int fp, int fn);

// One table row; metric strings so undefined entries can read "n/a".
struct MetricsRow {
  std::string method;
  std::string sen, ppr, der;
};

MetricsRow make_row(const std::string& method, int tp, int fp, int fn);
std::string format_metrics_table(const std::vector<MetricsRow>& rows);

}  // namespace gccd
