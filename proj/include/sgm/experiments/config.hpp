#pragma once

#include "sgm/gaussian.hpp"
#include "sgm/score.hpp"
#include "sgm/simulate.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sgm::experiments {

enum class DataKind { gaussian, line_y_equals_x };

/// Everything that determines an experiment's output. Flat `key = value` text form:
///
///   # comment
///   T = 5
///   data.mean = 2, 2
///
/// One assignment per line, `#` starts a comment, lists are comma separated, booleans are
/// true/false. Unknown keys, duplicate keys and malformed values raise ConfigError.
struct ExperimentConfig {
    double horizon = 5.0;                 // T
    std::size_t steps = 500;              // N
    std::size_t n_paths = 10000;
    std::size_t dim = 1;                  // d
    DataKind data = DataKind::gaussian;
    std::vector<double> data_mean{2.0};   // length d, or 1 to broadcast
    std::vector<double> data_var{4.0};
    std::size_t n_points = 10000;         // line_y_equals_x only
    double var_floor = kVarFloor;         // line_y_equals_x jitter
    double eps_score = 0.2;
    Perturbation perturbation = Perturbation::constant_offset;
    std::uint64_t master_seed = 20241018;
    std::string out_dir = "out";
    bool emit_svg = true;
    std::vector<double> bound_horizons{0.5, 1.0, 2.0, 4.0, 8.0};
    std::vector<double> bound_eps{0.1, 0.2, 0.4};
    double bound_fixed_horizon = 2.0;
    double c_score = 1.0;
    double c_init = 1.0;
    std::size_t plot_paths = 50;
    std::size_t histogram_bins = 60;

    /// Throws ConfigError when a field is out of range or inconsistent with d.
    void validate() const;

    /// Gaussian data law with broadcast mean/var. Throws ConfigError for non-Gaussian data.
    GaussianSpec gaussian_data() const;
    /// Exact score model of the configured data law.
    ScoreModel exact_score() const;
    /// Initial law of the forward process: the Gaussian, or the drawn y = x point cloud.
    InitialLaw data_law() const;

    TimeGrid grid() const { return TimeGrid(horizon, steps); }

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

std::string to_string(DataKind kind);

/// Text form with every key, in a fixed order, doubles at 17 significant digits.
std::string serialize(const ExperimentConfig& config);
/// Parses and validates. Missing keys keep their defaults.
ExperimentConfig parse_config(std::string_view text);
/// Reads a config file; IoError if it cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);

/// The y = x dataset: s ~ Uniform[-2, 2] in every coordinate plus N(0, var_floor) jitter,
/// drawn deterministically from master_seed.
SampleSet line_dataset(std::size_t n_points, std::size_t dim, double var_floor, std::uint64_t master_seed);

} // namespace sgm::experiments
