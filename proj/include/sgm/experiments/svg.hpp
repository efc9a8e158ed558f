#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace sgm::experiments {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    /// Draw as a histogram staircase; x holds the bin edges (one more than y).
    bool steps = false;
    /// Thin, translucent, unlabeled; for path bundles.
    bool faint = false;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
};

/// Standalone SVG document. Non-positive values are dropped on a log axis.
std::string render_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series);

/// IoError if the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& content);

} // namespace sgm::experiments
