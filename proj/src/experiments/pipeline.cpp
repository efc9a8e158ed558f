#include "sgm/experiments/pipeline.hpp"

#include "sgm/drift.hpp"
#include "sgm/errors.hpp"
#include "sgm/experiments/csv.hpp"
#include "sgm/experiments/svg.hpp"
#include "sgm/girsanov.hpp"
#include "sgm/score.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <utility>

namespace sgm::experiments {

namespace fs = std::filesystem;

namespace {

// Stream ids keep the stages' draws disjoint under one master seed.
constexpr std::uint32_t kForwardStream = 1;
constexpr std::uint32_t kKlStream = 20;
constexpr std::uint32_t kBoundStream = 100;
constexpr std::uint64_t kTvSeedSalt = 0x7E57u;

std::uint32_t reverse_stream(ScoreKind kind, InitKind init, Scheme scheme)
{
    return 10u + 4u * static_cast<std::uint32_t>(init) + 2u * static_cast<std::uint32_t>(kind) +
           (scheme == Scheme::ddpm ? 1u : 0u);
}

SimulationOptions sim_options(const RunOptions& options, std::uint32_t stream)
{
    SimulationOptions out;
    out.threads = options.threads;
    out.stream = stream;
    return out;
}

fs::path out_path(const ExperimentConfig& config, const std::string& name)
{
    return fs::path(config.out_dir) / name;
}

std::vector<double> column(const SampleSet& samples, std::size_t j)
{
    std::vector<double> out(samples.rows());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = samples.values[i * samples.dim + j];
    return out;
}

std::vector<std::string> trajectory_header(const std::vector<std::string>& lead, std::size_t dim)
{
    auto header = lead;
    for (std::size_t j = 0; j < dim; ++j) header.push_back("x" + std::to_string(j));
    return header;
}

void write_trajectory_rows(CsvWriter& csv, const std::vector<std::string>& prefix, const PathBatch& batch,
                           std::vector<PlotSeries>* plot)
{
    for (std::size_t p = 0; p < batch.size(); ++p) {
        const Trajectory& path = batch.paths[p];
        PlotSeries series;
        series.faint = true;
        for (std::size_t k = 0; k <= path.steps(); ++k) {
            auto cells = prefix;
            cells.push_back(format_number(p));
            cells.push_back(format_number(k));
            cells.push_back(format_number(batch.grid.time(k)));
            for (double v : path.state(k)) cells.push_back(format_number(v));
            csv.row(cells);
            series.x.push_back(batch.grid.time(k));
            series.y.push_back(path.state(k)[0]);
        }
        if (plot != nullptr) plot->push_back(std::move(series));
    }
}

void maybe_plot(const ExperimentConfig& config, const std::string& name, const PlotSpec& spec,
                const std::vector<PlotSeries>& series)
{
    if (!config.emit_svg) return;
    write_text_file(out_path(config, "plots/" + name), render_plot(spec, series));
}

ScoreModel make_score(const ExperimentConfig& config, ScoreKind kind, const TimeGrid& grid, double eps)
{
    ScoreModel exact = config.exact_score();
    if (kind == ScoreKind::exact) return exact;
    return perturbed_score(exact, eps, config.perturbation, config.master_seed, grid.step_size());
}

GaussianSpec moment_fit(const SampleSet& samples)
{
    std::vector<double> mean(samples.dim), var(samples.dim);
    for (std::size_t j = 0; j < samples.dim; ++j) {
        const auto col = column(samples, j);
        const MeanEstimate m = mean_with_stderr(col);
        std::vector<double> sq(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) sq[i] = (col[i] - m.value) * (col[i] - m.value);
        mean[j] = m.value;
        var[j] = std::max(kVarFloor, pairwise_sum(sq) / static_cast<double>(std::max<std::size_t>(1, col.size() - 1)));
    }
    return GaussianSpec(mean, var);
}

double tv_between(const GaussianSpec& p, const GaussianSpec& q, std::uint64_t seed)
{
    return std::min(1.0, std::max(0.0, gaussian_tv(p, q, 200000, seed).value));
}

SampleSet original_samples(const ExperimentConfig& config, const RunOptions& options)
{
    const fs::path persisted = out_path(config, "samples/forward_initial.csv");
    if (fs::exists(persisted)) return read_samples(persisted);
    return sample_initial(config.data_law(), config.n_paths, config.master_seed,
                          sim_options(options, kForwardStream));
}

struct Histogram {
    std::vector<double> edges;
    std::vector<double> density;
};

Histogram histogram(std::span<const double> values, double lo, double hi, std::size_t bins)
{
    Histogram h;
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(lo + width * static_cast<double>(b));
    std::vector<std::size_t> counts(bins, 0);
    for (double v : values) {
        if (v < lo || v > hi) continue;
        const auto b = std::min(bins - 1, static_cast<std::size_t>((v - lo) / width));
        ++counts[b];
    }
    for (std::size_t c : counts) {
        h.density.push_back(static_cast<double>(c) / (static_cast<double>(values.size()) * width));
    }
    return h;
}

template <class Error>
[[noreturn]] void rethrow_in_stage(const char* stage, const Error& e)
{
    throw Error(std::string(stage) + ": " + e.what());
}

template <class F>
void in_stage(const char* stage, F&& body)
{
    try {
        body();
    } catch (const ConfigError& e) {
        rethrow_in_stage(stage, e);
    } catch (const IoError& e) {
        rethrow_in_stage(stage, e);
    } catch (const NumericError& e) {
        rethrow_in_stage(stage, e);
    } catch (const std::invalid_argument& e) {
        rethrow_in_stage(stage, e);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(stage) + ": " + e.what());
    }
}

} // namespace

std::string to_string(ScoreKind kind)
{
    return kind == ScoreKind::exact ? "exact" : "perturbed";
}

std::string to_string(InitKind kind)
{
    return kind == InitKind::true_qT ? "true_qT" : "standard_gaussian";
}

ScoreKind parse_score_kind(const std::string& name)
{
    if (name == "exact") return ScoreKind::exact;
    if (name == "perturbed") return ScoreKind::perturbed;
    throw ConfigError("unknown score kind '" + name + "' (exact, perturbed)");
}

InitKind parse_init_kind(const std::string& name)
{
    if (name == "true_qT") return InitKind::true_qT;
    if (name == "standard_gaussian") return InitKind::standard_gaussian;
    throw ConfigError("unknown init kind '" + name + "' (true_qT, standard_gaussian)");
}

ForwardResult run_forward(const ExperimentConfig& config, const RunOptions& options)
{
    config.validate();
    const TimeGrid grid = config.grid();
    const InitialLaw law = config.data_law();
    const DriftField drift = DriftField::ou(config.dim);
    const SimulationOptions sim = sim_options(options, kForwardStream);

    ForwardResult result;
    result.initial = sample_initial(law, config.n_paths, config.master_seed, sim);
    result.terminal = simulate_terminal(law, drift, grid, config.n_paths, config.master_seed, Scheme::forward, sim);

    // paths 0 .. m-1 of the full batch: counter-based draws make the prefix identical
    const std::size_t shown = std::min(config.plot_paths, config.n_paths);
    const PathBatch batch = simulate_batch(law, drift, grid, shown, config.master_seed, Scheme::forward, sim);

    CsvWriter csv(out_path(config, "trajectories_forward.csv"), trajectory_header({"path", "step", "time"}, config.dim));
    std::vector<PlotSeries> plot;
    write_trajectory_rows(csv, {}, batch, &plot);
    csv.close();
    write_samples(out_path(config, "samples/forward_initial.csv"), result.initial);
    write_samples(out_path(config, "samples/forward_terminal.csv"), result.terminal);

    maybe_plot(config, "trajectories_forward.svg", {"Forward OU trajectories", "t", "x0", false}, plot);
    return result;
}

ReverseResult run_reverse(const ExperimentConfig& config, const std::vector<ScoreKind>& kinds, InitKind init,
                          const RunOptions& options)
{
    config.validate();
    if (kinds.empty()) throw ConfigError("run_reverse needs at least one score kind");
    const TimeGrid grid = config.grid();

    InitialLaw start = GaussianSpec::standard(config.dim);
    if (init == InitKind::true_qT) {
        const fs::path terminal = out_path(config, "samples/forward_terminal.csv");
        if (!fs::exists(terminal)) {
            throw IoError("missing forward artifact " + terminal.string() + " (run the forward stage first)");
        }
        SampleSet samples = read_samples(terminal);
        if (samples.dim != config.dim) throw IoError(terminal.string() + " has the wrong dimension");
        start = std::move(samples);
    }

    const SampleSet original = original_samples(config, options);
    if (original.dim != config.dim) throw IoError("forward_initial.csv has the wrong dimension");
    const GaussianSpec* target = nullptr;
    GaussianSpec data_gaussian = GaussianSpec::standard(config.dim);
    if (config.data == DataKind::gaussian) {
        data_gaussian = config.gaussian_data();
        target = &data_gaussian;
    }

    ReverseResult result;
    CsvWriter trajectories(out_path(config, "trajectories_reverse.csv"),
                           trajectory_header({"sampler", "path", "step", "time"}, config.dim));
    std::vector<PlotSeries> path_plot;
    const std::size_t shown = std::min(config.plot_paths, config.n_paths);

    for (ScoreKind kind : kinds) {
        const DriftField drift = DriftField::reverse(make_score(config, kind, grid, config.eps_score), grid);
        for (Scheme scheme : {Scheme::em, Scheme::ddpm}) {
            const std::string name = to_string(scheme) + "_" + to_string(kind);
            const SimulationOptions sim = sim_options(options, reverse_stream(kind, init, scheme));

            SampleSet out = simulate_terminal(start, drift, grid, config.n_paths, config.master_seed, scheme, sim);
            const PathBatch batch = simulate_batch(start, drift, grid, shown, config.master_seed, scheme, sim);
            const bool plotted = path_plot.empty();
            write_trajectory_rows(trajectories, {name}, batch, plotted ? &path_plot : nullptr);

            for (std::size_t j = 0; j < config.dim; ++j) {
                auto rec = column(out, j);
                auto orig = column(original, j);
                const std::size_t m = std::min(rec.size(), orig.size());
                RecoveryRow row;
                row.sampler = name;
                row.coordinate = j;
                row.w2_original = empirical_w2_1d(std::span(orig).first(m), std::span(rec).first(m));
                row.w2_target = target != nullptr
                                    ? empirical_w2_to_gaussian_1d(rec, target->mean()[j], target->var()[j])
                                    : row.w2_original;
                const GaussianSpec fit = moment_fit(SampleSet{1, rec});
                row.mean = fit.mean()[0];
                row.var = fit.var()[0];
                result.recovery.push_back(row);
            }
            write_samples(out_path(config, "samples/reverse_" + name + ".csv"), out);
            result.outputs.emplace_back(name, std::move(out));
        }
    }
    trajectories.close();
    for (auto& s : path_plot) s.x = std::vector<double>(s.x.rbegin(), s.x.rend()); // plot against forward time
    maybe_plot(config, "trajectories_reverse.svg",
               {"Reverse trajectories (" + result.outputs.front().first + ")", "forward time T - t", "x0", false},
               path_plot);

    CsvWriter summary(out_path(config, "samples/recovery_summary.csv"),
                      {"sampler", "init", "coordinate", "w2_original", "w2_target", "mean", "var"});
    for (const auto& row : result.recovery) {
        summary.row({row.sampler, to_string(init), format_number(row.coordinate), format_number(row.w2_original),
                     format_number(row.w2_target), format_number(row.mean), format_number(row.var)});
    }
    summary.close();

    CsvWriter hist(out_path(config, "reconstruction_histograms.csv"),
                   {"series", "coordinate", "bin_left", "bin_right", "density"});
    std::vector<PlotSeries> hist_plot;
    for (std::size_t j = 0; j < config.dim; ++j) {
        const auto orig = column(original, j);
        const auto [lo_it, hi_it] = std::minmax_element(orig.begin(), orig.end());
        double lo = *lo_it;
        double hi = *hi_it;
        if (hi - lo < 1e-9) lo -= 0.5, hi += 0.5;

        auto emit = [&](const std::string& series, std::span<const double> values) {
            const Histogram h = histogram(values, lo, hi, config.histogram_bins);
            for (std::size_t b = 0; b < h.density.size(); ++b) {
                hist.row({series, format_number(j), format_number(h.edges[b]), format_number(h.edges[b + 1]),
                          format_number(h.density[b])});
            }
            if (j == 0) hist_plot.push_back({series, h.edges, h.density, true, false});
        };
        emit("original", orig);
        for (const auto& [name, samples] : result.outputs) emit(name, column(samples, j));
    }
    hist.close();
    maybe_plot(config, "reconstruction_histograms.svg", {"Original vs recovered (x0)", "x0", "density", false},
               hist_plot);
    return result;
}

KlResult run_kl(const ExperimentConfig& config, const RunOptions& options)
{
    config.validate();
    const TimeGrid grid = config.grid();

    InitialLaw start = GaussianSpec::standard(config.dim);
    if (config.data == DataKind::gaussian) {
        start = forward_marginal(config.gaussian_data(), config.horizon);
    } else {
        const fs::path terminal = out_path(config, "samples/forward_terminal.csv");
        if (!fs::exists(terminal)) {
            throw IoError("missing forward artifact " + terminal.string() + " (run the forward stage first)");
        }
        start = read_samples(terminal);
    }

    const DriftField exact = DriftField::reverse(make_score(config, ScoreKind::exact, grid, 0.0), grid);
    const DriftField perturbed =
        DriftField::reverse(make_score(config, ScoreKind::perturbed, grid, config.eps_score), grid);
    const PathBatch batch = simulate_batch(start, perturbed, grid, config.n_paths, config.master_seed, Scheme::em,
                                           sim_options(options, kKlStream));

    const KlEstimate formula = kl_drift_formula(batch, perturbed, exact, options.threads);
    const KlEstimate mc = kl_monte_carlo(batch, perturbed, exact, options.threads);

    KlResult result;
    result.mean_sq_mismatch = mean_squared_drift_mismatch(batch, perturbed, exact, options.threads);
    result.time.push_back(0.0);
    result.kl_formula.push_back(0.0);
    result.kl_mc.push_back(0.0);
    result.kl_mc_stderr.push_back(0.0);
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        result.time.push_back(grid.time(k + 1));
        result.kl_formula.push_back(formula.per_step_profile[k]);
        result.kl_mc.push_back(mc.per_step_profile[k]);
        result.kl_mc_stderr.push_back(mc.profile_std_error[k]);
    }

    CsvWriter kl(out_path(config, "cumulative_kl.csv"), {"step", "time", "kl_formula", "kl_mc", "kl_mc_stderr"});
    for (std::size_t k = 0; k <= grid.steps(); ++k) {
        kl.row({format_number(k), format_number(result.time[k]), format_number(result.kl_formula[k]),
                format_number(result.kl_mc[k]), format_number(result.kl_mc_stderr[k])});
    }
    kl.close();

    CsvWriter mismatch(out_path(config, "drift_mismatch.csv"), {"step", "time", "mean_sq_mismatch"});
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        mismatch.row({format_number(k), format_number(grid.time(k)), format_number(result.mean_sq_mismatch[k])});
    }
    mismatch.close();

    maybe_plot(config, "cumulative_kl.svg", {"Cumulative path KL", "t", "KL", false},
               {{"drift formula", result.time, result.kl_formula},
                {"Monte Carlo", result.time, result.kl_mc}});
    std::vector<double> step_times(result.time.begin(), result.time.end() - 1);
    maybe_plot(config, "drift_mismatch.svg", {"Drift mismatch", "t", "E|b - b'|^2", false},
               {{"mean squared mismatch", step_times, result.mean_sq_mismatch}});
    return result;
}

std::vector<BoundRow> run_bound_report(const ExperimentConfig& config, const RunOptions& options)
{
    config.validate();
    const GaussianSpec q0 = config.gaussian_data();
    const GaussianSpec gamma = GaussianSpec::standard(config.dim);
    const double kl_q_gamma = gaussian_kl(q0, gamma);
    // every row keeps the configured step size; the horizon sets the step count
    const double h = config.horizon / static_cast<double>(config.steps);

    struct Plan {
        const char* sweep;
        double horizon;
        double eps;
    };
    std::vector<Plan> plans;
    for (double t : config.bound_horizons) plans.push_back({"horizon_exact", t, 0.0});
    for (double t : config.bound_horizons) plans.push_back({"horizon_perturbed", t, config.eps_score});
    for (double e : config.bound_eps) plans.push_back({"eps", config.bound_fixed_horizon, e});

    std::vector<BoundRow> rows;
    for (std::size_t r = 0; r < plans.size(); ++r) {
        const Plan& plan = plans[r];
        const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(plan.horizon / h)));
        const TimeGrid grid(plan.horizon, steps);
        const ScoreKind kind = plan.eps > 0.0 ? ScoreKind::perturbed : ScoreKind::exact;
        const ScoreModel score = make_score(config, kind, grid, plan.eps);
        const std::uint64_t tv_seed = config.master_seed ^ (kTvSeedSalt + r);

        const GaussianSpec law = propagate_gaussian(gamma, score, grid, Scheme::ddpm);
        const SampleSet out = simulate_terminal(gamma, DriftField::reverse(score, grid), grid, config.n_paths,
                                                config.master_seed, Scheme::ddpm,
                                                sim_options(options, kBoundStream + static_cast<std::uint32_t>(r)));

        BoundRow row;
        row.sweep = plan.sweep;
        row.horizon = plan.horizon;
        row.eps = plan.eps;
        row.report = with_measurement(
            composite_tv_bound(plan.horizon, plan.eps, kl_q_gamma, config.c_score, config.c_init),
            tv_between(q0, law, tv_seed));
        row.sample_fit_tv = tv_between(q0, moment_fit(out), tv_seed);
        row.histogram_tv = histogram_tv_1d(column(out, 0), q0.mean()[0], q0.var()[0], config.histogram_bins);
        rows.push_back(row);
    }

    CsvWriter csv(out_path(config, "bound_report.csv"),
                  {"sweep", "T", "eps", "score_term", "init_term", "bound", "measured_tv", "satisfied",
                   "sample_fit_tv", "histogram_tv"});
    for (const auto& row : rows) {
        csv.row({row.sweep, format_number(row.horizon), format_number(row.eps),
                 format_number(row.report.tv_score_term), format_number(row.report.tv_init_term),
                 format_number(row.report.tv_total_bound), format_number(row.report.measured_tv),
                 row.report.satisfied ? "1" : "0", format_number(row.sample_fit_tv),
                 format_number(row.histogram_tv)});
    }
    csv.close();

    std::vector<PlotSeries> plot;
    for (const char* sweep : {"horizon_exact", "horizon_perturbed"}) {
        PlotSeries measured{std::string("measured TV, ") + sweep, {}, {}};
        PlotSeries bound{std::string("bound, ") + sweep, {}, {}};
        for (const auto& row : rows) {
            if (row.sweep != sweep) continue;
            measured.x.push_back(row.horizon);
            measured.y.push_back(row.report.measured_tv);
            bound.x.push_back(row.horizon);
            bound.y.push_back(row.report.tv_total_bound);
        }
        plot.push_back(std::move(measured));
        plot.push_back(std::move(bound));
    }
    maybe_plot(config, "bound_report.svg", {"Composite TV bound vs measured TV", "T", "TV", true}, plot);
    return rows;
}

void run_all(const ExperimentConfig& config, const RunOptions& options)
{
    in_stage("config", [&] { config.validate(); });
    in_stage("forward", [&] { run_forward(config, options); });
    in_stage("reverse", [&] { run_reverse(config, {ScoreKind::exact, ScoreKind::perturbed}, InitKind::true_qT, options); });
    in_stage("kl", [&] { run_kl(config, options); });
    if (config.data == DataKind::gaussian) {
        in_stage("bound", [&] { run_bound_report(config, options); });
    }
    in_stage("config.used", [&] {
        // out_dir is left out so reruns into different directories stay byte-identical
        std::istringstream full(serialize(config));
        std::string text;
        for (std::string line; std::getline(full, line);) {
            if (line.rfind("out_dir", 0) != 0) text += line + '\n';
        }
        write_text_file(out_path(config, "config.used"), text);
    });
}

} // namespace sgm::experiments
