#include "gccd/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace gccd {

MatchResult match_detections(const std::vector<int>& annotations,
                             const std::vector<int>& detections,
                             int tolerance) {
  MatchResult result;
  std::vector<bool> taken(detections.size(), false);

  std::size_t lo = 0;  // detections before this can no longer match
  for (std::size_t a = 0; a < annotations.size(); ++a) {
    const int target = annotations[a];
    while (lo < detections.size() && detections[lo] < target - tolerance) ++lo;
    int best = -1;
    for (std::size_t d = lo; d < detections.size(); ++d) {
      if (detections[d] > target + tolerance) break;
      if (taken[d]) continue;
      if (best < 0 || std::abs(detections[d] - target) <
                          std::abs(detections[best] - target))
        best = static_cast<int>(d);
      // equal distance keeps the earlier detection
    }
    if (best >= 0) {
      taken[best] = true;
      result.matches.push_back(
          DetectionMatch{static_cast<int>(a), best, detections[best] - target});
    }
  }
  result.tp = static_cast<int>(result.matches.size());
  result.fn = static_cast<int>(annotations.size()) - result.tp;
  result.fp = static_cast<int>(detections.size()) - result.tp;
  return result;
}

Metrics compute_metrics(int tp, int fp, int fn) {
  if (tp + fn == 0) throw UndefinedMetric("Sen");
  if (tp + fp == 0) throw UndefinedMetric("PPR");
  Metrics m;
  m.sen = 100.0 * tp / (tp + fn);
  m.ppr = 100.0 * tp / (tp + fp);
  m.der = 100.0 * (fn + fp) / (tp + fn);
  return m;
}

Metrics compute_metrics(const MatchResult& result) {
  return compute_metrics(result.tp, result.fp, result.fn);
}

namespace {

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

MetricsRow make_row(const std::string& method, int tp, int fp, int fn) {
  MetricsRow row;
  row.method = method;
  row.sen = tp + fn > 0 ? percent(100.0 * tp / (tp + fn)) : "n/a";
  row.ppr = tp + fp > 0 ? percent(100.0 * tp / (tp + fp)) : "n/a";
  row.der = tp + fn > 0 ? percent(100.0 * (fn + fp) / (tp + fn)) : "n/a";
  return row;
}

std::string format_metrics_table(const std::vector<MetricsRow>& rows) {
  std::string out = "method Sen(%) PPR(%) DER(%)\n";
  for (const auto& r : rows)
    out += r.method + " " + r.sen + " " + r.ppr + " " + r.der + "\n";
  return out;
}

}  // namespace gccd
