#pragma once

#include "sgm/experiments/config.hpp"
#include "sgm/metrics.hpp"
#include "sgm/simulate.hpp"
#include "sgm/steppers.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace sgm::experiments {

struct RunOptions {
    /// Worker threads for simulation and estimators; 0 = OpenMP default. Never changes output.
    int threads = 0;
};

enum class ScoreKind { exact, perturbed };
enum class InitKind { true_qT, standard_gaussian };

std::string to_string(ScoreKind kind);
std::string to_string(InitKind kind);
/// Throw ConfigError for unknown names.
ScoreKind parse_score_kind(const std::string& name);
InitKind parse_init_kind(const std::string& name);

/// Top-level tables written by run_all, in stage order.
inline constexpr std::array<const char*, 6> kTableNames{
    "trajectories_forward.csv", "trajectories_reverse.csv", "reconstruction_histograms.csv",
    "cumulative_kl.csv",        "drift_mismatch.csv",       "bound_report.csv"};

struct ForwardResult {
    SampleSet initial;
    SampleSet terminal;
};

struct RecoveryRow {
    std::string sampler;      // e.g. "ddpm_exact"
    std::size_t coordinate = 0;
    double w2_original = 0.0; // empirical W2 against the persisted original samples
    double w2_target = 0.0;   // against the closed-form data quantiles; Gaussian data only, else w2_original
    double mean = 0.0;
    double var = 0.0;
};

struct ReverseResult {
    std::vector<RecoveryRow> recovery;
    /// Terminal samples keyed like the recovery rows' sampler names.
    std::vector<std::pair<std::string, SampleSet>> outputs;
};

struct KlResult {
    std::vector<double> time;         // N + 1
    std::vector<double> kl_formula;   // N + 1, leading 0
    std::vector<double> kl_mc;
    std::vector<double> kl_mc_stderr;
    std::vector<double> mean_sq_mismatch; // N
};

struct BoundRow {
    std::string sweep; // horizon_exact, horizon_perturbed or eps
    double horizon = 0.0;
    double eps = 0.0;
    BoundReport report;
    double sample_fit_tv = 0.0;
    double histogram_tv = 0.0;
};

/// Forward OU noising of the data law. Writes trajectories_forward.csv (plot.paths paths,
/// N + 1 rows each), samples/forward_initial.csv, samples/forward_terminal.csv.
ForwardResult run_forward(const ExperimentConfig& config, const RunOptions& options = {});

/// Reverse sampling with the EM and DDPM steppers for every requested score kind. true_qT
/// reads samples/forward_terminal.csv and throws IoError when it is missing.
/// Writes trajectories_reverse.csv, reconstruction_histograms.csv, samples/reverse_<sampler>.csv
/// and samples/recovery_summary.csv.
ReverseResult run_reverse(const ExperimentConfig& config, const std::vector<ScoreKind>& kinds, InitKind init,
                          const RunOptions& options = {});

/// Girsanov KL between the perturbed-score (P, generating) and exact-score (Q) EM path laws started
/// at q_T. Writes cumulative_kl.csv and drift_mismatch.csv.
KlResult run_kl(const ExperimentConfig& config, const RunOptions& options = {});

/// Composite TV bound against the measured TV of gamma-initialized DDPM samplers. Gaussian data
/// only (ConfigError otherwise). Writes bound_report.csv.
std::vector<BoundRow> run_bound_report(const ExperimentConfig& config, const RunOptions& options = {});

/// Every stage in order plus config.used. Errors keep their type and gain the stage name.
/// The bound stage is skipped for non-Gaussian data.
void run_all(const ExperimentConfig& config, const RunOptions& options = {});

} // namespace sgm::experiments
