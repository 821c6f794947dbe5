#pragma once

#include <string>
#include <vector>

#include "gccd/types.hpp"

namespace gccd {

// All formats are plain text, one record per line, written with enough
// digits to round-trip doubles exactly. Lines starting with '#' and blank
// lines are ignored on input. Parse failures throw ParseError naming the
// file.

// SignalFile: header "rate=<Hz> id=<record>", then one sample per line.
Signal read_signal(const std::string& path);
void write_signal(const std::string& path, const Signal& signal);

// GraphFile: "vertex <id> <name>" and
// "edge <id> <source> <target> <up|down> <gap> <penalty>" lines.
ConstraintGraph parse_graph(const std::string& text, const std::string& origin);
std::string format_graph(const ConstraintGraph& g);
ConstraintGraph read_graph(const std::string& path);
void write_graph(const std::string& path, const ConstraintGraph& g);

// AnnotationFile: one 1-based R-peak sample index per line, sorted.
std::vector<int> read_annotations(const std::string& path);
void write_annotations(const std::string& path, const std::vector<int>& peaks);

// Labels: "start end" coverage bands, or bare peak indexes converted to
// +-band_halfwidth windows truncated at the midpoints between neighbors.
LabelSet read_labels(const std::string& path, int n_samples, int band_halfwidth);
LabelSet bands_from_peaks(const std::vector<int>& peaks, int n_samples,
                          int band_halfwidth);

// Segmentation file: segment and change rows plus the state names needed
// by plot-data.
struct SegmentationFile {
  Segmentation seg;
  std::vector<std::string> state_names;  // one per segment
};

std::string format_segmentation(const Segmentation& seg, const ConstraintGraph& g);
void write_segmentation(const std::string& path, const Segmentation& seg,
                        const ConstraintGraph& g);
SegmentationFile read_segmentation(const std::string& path);

// Plot table: "index sample mean state" rows, one per sample.
std::string format_plot_data(const SegmentationFile& seg, const Signal& signal);

std::string format_double_exact(double v);  // %.17g

}  // namespace gccd
