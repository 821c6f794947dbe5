#include "gccd/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gccd {
namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  return out;
}

bool skippable(const std::string& line) {
  for (char ch : line) {
    if (ch == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(ch))) return false;
  }
  return true;  // blank
}

[[noreturn]] void fail(const std::string& origin, int line_no,
                       const std::string& what) {
  throw ParseError(origin + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double(const std::string& origin, int line_no,
                    const std::string& token) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(token, &pos);
    if (pos != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    fail(origin, line_no, "expected a number, got \"" + token + "\"");
  }
}

int parse_int(const std::string& origin, int line_no, const std::string& token) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(token, &pos);
    if (pos != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    fail(origin, line_no, "expected an integer, got \"" + token + "\"");
  }
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

}  // namespace

std::string format_double_exact(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Signal read_signal(const std::string& path) {
  auto in = open_input(path);
  Signal s;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    if (!header_seen) {
      for (const auto& tok : tokens(line)) {
        if (tok.rfind("rate=", 0) == 0)
          s.rate = parse_double(path, line_no, tok.substr(5));
        else if (tok.rfind("id=", 0) == 0)
          s.id = tok.substr(3);
        else
          fail(path, line_no, "unexpected header token \"" + tok + "\"");
      }
      if (!(s.rate > 0.0)) fail(path, line_no, "header must set rate > 0");
      header_seen = true;
      continue;
    }
    const double z = parse_double(path, line_no, line);
    if (!std::isfinite(z)) fail(path, line_no, "samples must be finite");
    s.samples.push_back(z);
  }
  if (!header_seen) throw ParseError(path + ": missing \"rate= id=\" header");
  if (s.samples.empty()) throw ParseError(path + ": no samples");
  return s;
}

void write_signal(const std::string& path, const Signal& signal) {
  auto out = open_output(path);
  out << "rate=" << format_double_exact(signal.rate) << " id=" << signal.id
      << "\n";
  for (double z : signal.samples) out << format_double_exact(z) << "\n";
}

ConstraintGraph parse_graph(const std::string& text, const std::string& origin) {
  ConstraintGraph g;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto tok = tokens(line);
    if (tok[0] == "vertex") {
      if (tok.size() != 3) fail(origin, line_no, "expected: vertex <id> <name>");
      g.vertices.push_back(
          Vertex{parse_int(origin, line_no, tok[1]), tok[2]});
    } else if (tok[0] == "edge") {
      if (tok.size() != 7)
        fail(origin, line_no,
             "expected: edge <id> <source> <target> <up|down> <gap> <penalty>");
      Edge e;
      e.id = parse_int(origin, line_no, tok[1]);
      e.source = parse_int(origin, line_no, tok[2]);
      e.target = parse_int(origin, line_no, tok[3]);
      if (tok[4] == "up")
        e.direction = Direction::up;
      else if (tok[4] == "down")
        e.direction = Direction::down;
      else
        fail(origin, line_no, "direction must be up or down");
      e.gap = parse_double(origin, line_no, tok[5]);
      e.penalty = parse_double(origin, line_no, tok[6]);
      g.edges.push_back(e);
    } else {
      fail(origin, line_no, "unknown record \"" + tok[0] + "\"");
    }
  }
  std::string problems;
  for (const auto& v : validate_graph(g))
    if (v.hard) problems += " [" + v.rule + "]";
  if (!problems.empty())
    throw ParseError(origin + ": invalid graph:" + problems);
  return g;
}

std::string format_graph(const ConstraintGraph& g) {
  std::string out;
  for (const auto& v : g.vertices)
    out += "vertex " + std::to_string(v.id) + " " + v.name + "\n";
  for (const auto& e : g.edges)
    out += "edge " + std::to_string(e.id) + " " + std::to_string(e.source) +
           " " + std::to_string(e.target) + " " + to_string(e.direction) + " " +
           format_double_exact(e.gap) + " " + format_double_exact(e.penalty) +
           "\n";
  return out;
}

ConstraintGraph read_graph(const std::string& path) {
  auto in = open_input(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str(), path);
}

void write_graph(const std::string& path, const ConstraintGraph& g) {
  open_output(path) << format_graph(g);
}

std::vector<int> read_annotations(const std::string& path) {
  auto in = open_input(path);
  std::vector<int> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto tok = tokens(line);
    if (tok.size() != 1) fail(path, line_no, "expected one peak index per line");
    const int idx = parse_int(path, line_no, tok[0]);
    if (idx < 1) fail(path, line_no, "peak indexes are 1-based");
    if (!out.empty() && idx < out.back())
      fail(path, line_no, "peak indexes must be sorted ascending");
    out.push_back(idx);
  }
  return out;
}

void write_annotations(const std::string& path, const std::vector<int>& peaks) {
  auto out = open_output(path);
  for (int p : peaks) out << p << "\n";
}

LabelSet bands_from_peaks(const std::vector<int>& peaks, int n_samples,
                          int band_halfwidth) {
  LabelSet labels;
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    LabelRegion r;
    r.start = std::max(1, peaks[i] - band_halfwidth);
    r.end = std::min(n_samples, peaks[i] + band_halfwidth);
    // truncate at the midpoints between neighboring peaks so bands never
    // overlap even at short RR intervals
    if (i > 0) r.start = std::max(r.start, (peaks[i - 1] + peaks[i]) / 2 + 1);
    if (i + 1 < peaks.size())
      r.end = std::min(r.end, (peaks[i] + peaks[i + 1]) / 2);
    if (r.start <= r.end) labels.regions.push_back(r);
  }
  validate_labels(labels, n_samples);
  return labels;
}

LabelSet read_labels(const std::string& path, int n_samples,
                     int band_halfwidth) {
  auto in = open_input(path);
  LabelSet labels;
  std::vector<int> peaks;
  bool band_form = false, peak_form = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto tok = tokens(line);
    if (tok.size() == 2) {
      band_form = true;
      labels.regions.push_back(LabelRegion{parse_int(path, line_no, tok[0]),
                                           parse_int(path, line_no, tok[1])});
    } else if (tok.size() == 1) {
      peak_form = true;
      peaks.push_back(parse_int(path, line_no, tok[0]));
    } else {
      fail(path, line_no, "expected \"start end\" or a single peak index");
    }
    if (band_form && peak_form)
      fail(path, line_no, "cannot mix band and peak-index label lines");
  }
  if (peak_form) return bands_from_peaks(peaks, n_samples, band_halfwidth);
  validate_labels(labels, n_samples);
  return labels;
}

std::string format_segmentation(const Segmentation& seg,
                                const ConstraintGraph& g) {
  std::string out;
  out += "n_samples " + std::to_string(seg.n_samples) + "\n";
  out += "total_cost " + format_double_exact(seg.total_cost) + "\n";
  for (std::size_t i = 0; i < seg.segment_means.size(); ++i) {
    const int start = i == 0 ? 1 : seg.boundaries[i - 1] + 1;
    const int end = i == seg.segment_means.size() - 1 ? seg.n_samples
                                                      : seg.boundaries[i];
    const Vertex* v = g.find_vertex(seg.segment_states[i]);
    out += "segment " + std::to_string(start) + " " + std::to_string(end) +
           " " + format_double_exact(seg.segment_means[i]) + " " +
           std::to_string(seg.segment_states[i]) + " " +
           (v != nullptr ? v->name : "?") + "\n";
  }
  for (std::size_t k = 0; k < seg.boundaries.size(); ++k)
    out += "change " + std::to_string(seg.boundaries[k]) + " " +
           std::to_string(seg.edge_trace[k]) + "\n";
  return out;
}

void write_segmentation(const std::string& path, const Segmentation& seg,
                        const ConstraintGraph& g) {
  open_output(path) << format_segmentation(seg, g);
}

SegmentationFile read_segmentation(const std::string& path) {
  auto in = open_input(path);
  SegmentationFile file;
  std::string line;
  int line_no = 0;
  std::vector<int> starts, ends;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto tok = tokens(line);
    if (tok[0] == "n_samples" && tok.size() == 2) {
      file.seg.n_samples = parse_int(path, line_no, tok[1]);
    } else if (tok[0] == "total_cost" && tok.size() == 2) {
      file.seg.total_cost = parse_double(path, line_no, tok[1]);
    } else if (tok[0] == "segment" && tok.size() == 6) {
      starts.push_back(parse_int(path, line_no, tok[1]));
      ends.push_back(parse_int(path, line_no, tok[2]));
      file.seg.segment_means.push_back(parse_double(path, line_no, tok[3]));
      file.seg.segment_states.push_back(parse_int(path, line_no, tok[4]));
      file.state_names.push_back(tok[5]);
    } else if (tok[0] == "change" && tok.size() == 3) {
      file.seg.boundaries.push_back(parse_int(path, line_no, tok[1]));
      file.seg.edge_trace.push_back(parse_int(path, line_no, tok[2]));
    } else {
      fail(path, line_no, "unknown record \"" + tok[0] + "\"");
    }
  }
  if (file.seg.segment_means.empty()) throw ParseError(path + ": no segments");
  if (file.seg.boundaries.size() + 1 != file.seg.segment_means.size())
    throw ParseError(path + ": segment and change rows disagree");
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const int expected_start = i == 0 ? 1 : file.seg.boundaries[i - 1] + 1;
    const int expected_end = i + 1 == starts.size() ? file.seg.n_samples
                                                    : file.seg.boundaries[i];
    if (starts[i] != expected_start || ends[i] != expected_end)
      throw ParseError(path + ": segment rows do not partition the signal");
  }
  return file;
}

std::string format_plot_data(const SegmentationFile& file, const Signal& signal) {
  if (file.seg.n_samples != signal.n())
    throw ParseError("segmentation covers " +
                     std::to_string(file.seg.n_samples) + " samples but signal has " +
                     std::to_string(signal.n()));
  std::string out = "index sample mean state\n";
  std::size_t segment = 0;
  for (int i = 1; i <= signal.n(); ++i) {
    while (segment < file.seg.boundaries.size() &&
           i > file.seg.boundaries[segment])
      ++segment;
    out += std::to_string(i) + " " + format_double_exact(signal.samples[i - 1]) +
           " " + format_double_exact(file.seg.segment_means[segment]) + " " +
           file.state_names[segment] + "\n";
  }
  return out;
}

}  // namespace gccd
