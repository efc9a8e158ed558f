#include "sgm/experiments/svg.hpp"

#include "sgm/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace sgm::experiments {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v)
    {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    void settle()
    {
        if (lo > hi) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-12) {
            const double pad = std::max(1e-12, std::abs(lo) * 0.05 + 0.5);
            lo -= pad;
            hi += pad;
        }
    }
};

} // namespace

std::string render_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series)
{
    auto ty = [&](double v) { return spec.log_y ? (v > 0.0 ? std::log10(v) : std::nan("")) : v; };

    Range xr, yr;
    for (const auto& s : series) {
        for (double v : s.x) xr.add(v);
        for (double v : s.y) yr.add(ty(v));
        if (s.steps && !spec.log_y) yr.add(0.0);
    }
    xr.settle();
    yr.settle();

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + (v - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double v) { return kTop + ph - (v - yr.lo) / (yr.hi - yr.lo) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(spec.title) << "</text>\n";
    svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\""
        << num(ph) << "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (int i = 0; i <= 5; ++i) {
        const double xv = xr.lo + (xr.hi - xr.lo) * i / 5.0;
        const double yv = yr.lo + (yr.hi - yr.lo) * i / 5.0;
        svg << "<line x1=\"" << num(px(xv)) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(px(xv))
            << "\" y2=\"" << num(kTop + ph + 4) << "\" stroke=\"#333\"/>"
            << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(kTop + ph + 16) << "\" text-anchor=\"middle\">"
            << tick_label(xv) << "</text>\n";
        svg << "<line x1=\"" << num(kLeft - 4) << "\" y1=\"" << num(py(yv)) << "\" x2=\"" << num(kLeft)
            << "\" y2=\"" << num(py(yv)) << "\" stroke=\"#333\"/>"
            << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">"
            << tick_label(spec.log_y ? std::pow(10.0, yv) : yv) << "</text>\n";
    }
    svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
        << escape(spec.x_label) << "</text>\n";
    svg << "<text transform=\"translate(16 " << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(spec.y_label + (spec.log_y ? " (log)" : "")) << "</text>\n";

    std::size_t legend = 0;
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* colour = kPalette[si % kPalette.size()];
        std::ostringstream pts;
        bool open = false;
        auto emit = [&](double x, double y) {
            if (!std::isfinite(x) || !std::isfinite(y)) {
                open = false;
                return;
            }
            pts << (open ? " L" : " M") << num(px(x)) << ' ' << num(py(y));
            open = true;
        };
        if (s.steps) {
            const double base = spec.log_y ? yr.lo : std::max(yr.lo, 0.0);
            for (std::size_t i = 0; i < s.y.size() && i + 1 < s.x.size(); ++i) {
                const double y = ty(s.y[i]);
                const double v = std::isfinite(y) ? y : base;
                emit(s.x[i], v);
                emit(s.x[i + 1], v);
            }
        } else {
            for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) emit(s.x[i], ty(s.y[i]));
        }
        const std::string d = pts.str();
        if (!d.empty()) {
            svg << "<path d=\"" << d.substr(1) << "\" fill=\"none\" stroke=\"" << colour << '"'
                << (s.faint ? " stroke-width=\"0.6\" stroke-opacity=\"0.35\"" : " stroke-width=\"1.6\"") << "/>\n";
        }
        if (!s.faint && !s.label.empty()) {
            const double ly = kTop + 10 + 16.0 * static_cast<double>(legend++);
            svg << "<line x1=\"" << num(kWidth - kRight + 10) << "\" y1=\"" << num(ly) << "\" x2=\""
                << num(kWidth - kRight + 28) << "\" y2=\"" << num(ly) << "\" stroke=\"" << colour
                << "\" stroke-width=\"2\"/><text x=\"" << num(kWidth - kRight + 32) << "\" y=\"" << num(ly + 4)
                << "\">" << escape(s.label) << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

} // namespace sgm::experiments
