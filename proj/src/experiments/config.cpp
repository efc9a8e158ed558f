#include "sgm/experiments/config.hpp"

#include "sgm/errors.hpp"
#include "sgm/philox.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace sgm::experiments {

namespace {

constexpr std::uint32_t kDataStream = 0xDA7A0001u;

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_list(const std::vector<double>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_double(values[i]);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& text)
{
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ConfigError("config key '" + key + "': expected a finite number, got '" + text + "'");
    }
    return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text)
{
    errno = 0;
    char* end = nullptr;
    if (text.empty() || text.front() == '-' || text.front() == '+') {
        throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + text + "'");
    }
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (end != text.c_str() + text.size() || errno == ERANGE) {
        throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + text + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text)
{
    if (text == "true") return true;
    if (text == "false") return false;
    throw ConfigError("config key '" + key + "': expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::vector<double> broadcast(const std::vector<double>& values, std::size_t dim)
{
    return values.size() == 1 ? std::vector<double>(dim, values.front()) : values;
}

} // namespace

std::string to_string(DataKind kind)
{
    return kind == DataKind::gaussian ? "gaussian" : "line_y_equals_x";
}

void ExperimentConfig::validate() const
{
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("T must be > 0");
    if (steps == 0) throw ConfigError("N must be >= 1");
    if (n_paths == 0) throw ConfigError("n_paths must be >= 1");
    if (n_paths > 0xFFFFFFFFull) throw ConfigError("n_paths must fit in 32 bits");
    if (dim == 0) throw ConfigError("d must be >= 1");
    if (!(eps_score >= 0.0)) throw ConfigError("eps_score must be >= 0");
    if (plot_paths == 0) throw ConfigError("plot.paths must be >= 1");
    if (histogram_bins == 0) throw ConfigError("plot.bins must be >= 1");
    if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
    if (data == DataKind::gaussian) {
        for (const auto* list : {&data_mean, &data_var}) {
            if (list->size() != 1 && list->size() != dim) {
                throw ConfigError("data.mean and data.var need 1 or d entries");
            }
        }
        for (double v : data_var) {
            if (!(v >= kVarFloor)) throw ConfigError("data.var entries must be >= var_floor (1e-6)");
        }
    } else {
        if (n_points == 0) throw ConfigError("data.n_points must be >= 1");
        if (!(var_floor >= kVarFloor)) throw ConfigError("data.var_floor must be >= 1e-6");
    }
    for (double t : bound_horizons) {
        if (!(t > 0.0)) throw ConfigError("bound.T_grid entries must be > 0");
    }
    for (double e : bound_eps) {
        if (!(e >= 0.0)) throw ConfigError("bound.eps_grid entries must be >= 0");
    }
    if (!(bound_fixed_horizon > 0.0)) throw ConfigError("bound.T_fixed must be > 0");
    if (!(c_score >= 0.0) || !(c_init >= 0.0)) throw ConfigError("bound constants must be >= 0");
}

GaussianSpec ExperimentConfig::gaussian_data() const
{
    if (data != DataKind::gaussian) {
        throw ConfigError("this stage needs Gaussian data (data = gaussian)");
    }
    return GaussianSpec(broadcast(data_mean, dim), broadcast(data_var, dim));
}

ScoreModel ExperimentConfig::exact_score() const
{
    if (data == DataKind::gaussian) return ScoreModel::exact(gaussian_data());
    return ScoreModel::exact(DiagonalSegmentLaw{dim, 2.0, var_floor});
}

InitialLaw ExperimentConfig::data_law() const
{
    if (data == DataKind::gaussian) return gaussian_data();
    return line_dataset(n_points, dim, var_floor, master_seed);
}

std::string serialize(const ExperimentConfig& c)
{
    std::ostringstream out;
    out << "T = " << format_double(c.horizon) << '\n'
        << "N = " << c.steps << '\n'
        << "n_paths = " << c.n_paths << '\n'
        << "d = " << c.dim << '\n'
        << "data = " << to_string(c.data) << '\n'
        << "data.mean = " << format_list(c.data_mean) << '\n'
        << "data.var = " << format_list(c.data_var) << '\n'
        << "data.n_points = " << c.n_points << '\n'
        << "data.var_floor = " << format_double(c.var_floor) << '\n'
        << "eps_score = " << format_double(c.eps_score) << '\n'
        << "perturbation = " << to_string(c.perturbation) << '\n'
        << "master_seed = " << c.master_seed << '\n'
        << "out_dir = " << c.out_dir << '\n'
        << "emit_svg = " << (c.emit_svg ? "true" : "false") << '\n'
        << "bound.T_grid = " << format_list(c.bound_horizons) << '\n'
        << "bound.eps_grid = " << format_list(c.bound_eps) << '\n'
        << "bound.T_fixed = " << format_double(c.bound_fixed_horizon) << '\n'
        << "bound.c_score = " << format_double(c.c_score) << '\n'
        << "bound.c_init = " << format_double(c.c_init) << '\n'
        << "plot.paths = " << c.plot_paths << '\n'
        << "plot.bins = " << c.histogram_bins << '\n';
    return out.str();
}

ExperimentConfig parse_config(std::string_view text)
{
    ExperimentConfig c;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(stripped).substr(0, eq));
        const std::string value = trim(std::string_view(stripped).substr(eq + 1));
        if (!seen.insert(key).second) {
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        if (key == "T") c.horizon = parse_double(key, value);
        else if (key == "N") c.steps = parse_unsigned(key, value);
        else if (key == "n_paths") c.n_paths = parse_unsigned(key, value);
        else if (key == "d") c.dim = parse_unsigned(key, value);
        else if (key == "data") {
            if (value == "gaussian") c.data = DataKind::gaussian;
            else if (value == "line_y_equals_x") c.data = DataKind::line_y_equals_x;
            else throw ConfigError("config key 'data': expected gaussian or line_y_equals_x");
        }
        else if (key == "data.mean") c.data_mean = parse_list(key, value);
        else if (key == "data.var") c.data_var = parse_list(key, value);
        else if (key == "data.n_points") c.n_points = parse_unsigned(key, value);
        else if (key == "data.var_floor") c.var_floor = parse_double(key, value);
        else if (key == "eps_score") c.eps_score = parse_double(key, value);
        else if (key == "perturbation") {
            try {
                c.perturbation = parse_perturbation(value);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("config key 'perturbation': ") + e.what());
            }
        }
        else if (key == "master_seed") c.master_seed = parse_unsigned(key, value);
        else if (key == "out_dir") c.out_dir = value;
        else if (key == "emit_svg") c.emit_svg = parse_bool(key, value);
        else if (key == "bound.T_grid") c.bound_horizons = parse_list(key, value);
        else if (key == "bound.eps_grid") c.bound_eps = parse_list(key, value);
        else if (key == "bound.T_fixed") c.bound_fixed_horizon = parse_double(key, value);
        else if (key == "bound.c_score") c.c_score = parse_double(key, value);
        else if (key == "bound.c_init") c.c_init = parse_double(key, value);
        else if (key == "plot.paths") c.plot_paths = parse_unsigned(key, value);
        else if (key == "plot.bins") c.histogram_bins = parse_unsigned(key, value);
        else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

SampleSet line_dataset(std::size_t n_points, std::size_t dim, double var_floor, std::uint64_t master_seed)
{
    const NormalStream rng(master_seed, kDataStream);
    SampleSet out{dim, std::vector<double>(n_points * dim)};
    std::vector<double> jitter(dim);
    const double sd = std::sqrt(var_floor);
    for (std::size_t i = 0; i < n_points; ++i) {
        const auto row = static_cast<std::uint32_t>(i);
        const double s = -2.0 + 4.0 * rng.uniform(row, 0, 0);
        rng.fill(row, 1, jitter);
        for (std::size_t j = 0; j < dim; ++j) out.values[i * dim + j] = s + sd * jitter[j];
    }
    return out;
}

} // namespace sgm::experiments
