#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mscgarch/bayes.hpp"
#include "mscgarch/error.hpp"
#include "mscgarch/evaluation.hpp"
#include "mscgarch/filter.hpp"
#include "mscgarch/io.hpp"
#include "mscgarch/model.hpp"
#include "mscgarch/stability.hpp"
#include "mscgarch/stats.hpp"

// Subcommand implementations shared by the command-line tool and the
// integration tests. Each command is a pure function of (config, inputs).
namespace mscgarch::app {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
    std::optional<fs::path> spec;
    std::optional<fs::path> input;
    std::optional<fs::path> spec_cgarch;
    std::optional<fs::path> spec_garch;
    fs::path out_dir = ".";
    std::uint64_t seed = 1;
    std::size_t T = 300;
    double h_init = 1.0;
    double delta = kDefaultDelta;
    std::size_t grid_size = 33;
    std::size_t iters = 2000;
    std::optional<std::size_t> burnin;
    std::size_t chains = 1;
    double holdout = 0.0;
    bool prices = false;
    bool demean = false;
    std::string model = "mscgarch";  // mscgarch | msgarch | both

    [[nodiscard]] std::size_t effective_burnin() const { return burnin.value_or(default_burnin(iters)); }
};

inline const fs::path& need(const std::optional<fs::path>& p, const char* flag) {
    if (!p) throw Error(ErrorCategory::invalid_argument, std::string("missing required option ") + flag);
    return *p;
}

/// Load --input as a return series (converting prices, demeaning if asked).
inline ReturnsSeries load_returns(const RunConfig& cfg) {
    const io::SeriesData data = io::read_series_csv(need(cfg.input, "--input"));
    ReturnsSeries s;
    if (cfg.prices) {
        s = prices_to_returns(data.values, data.labels);
    } else {
        s.r = data.values;
        s.timestamps = data.labels;
    }
    if (cfg.demean) s.r = demean(s.r);
    return s;
}

inline GibbsConfig gibbs_config(const RunConfig& cfg, ModelKind kind) {
    GibbsConfig g;
    g.n_iter = cfg.iters;
    g.n_burnin = cfg.effective_burnin();
    g.grid_size = cfg.grid_size;
    g.seed = cfg.seed;
    g.model = kind;
    return g;
}

inline std::vector<ModelKind> requested_models(const std::string& model) {
    if (model == "mscgarch") return {ModelKind::ms_cgarch};
    if (model == "msgarch") return {ModelKind::ms_garch};
    if (model == "both") return {ModelKind::ms_cgarch, ModelKind::ms_garch};
    throw Error(ErrorCategory::invalid_argument, "unknown --model \"" + model + "\" (mscgarch|msgarch|both)");
}

inline const char* file_tag(ModelKind m) { return m == ModelKind::ms_cgarch ? "mscgarch" : "msgarch"; }

/// simulate -> simulation.csv
inline fs::path cmd_simulate(const RunConfig& cfg) {
    const ModelSpec spec = io::load_spec(need(cfg.spec, "--spec"));
    const SimulationOutput sim = simulate(spec, cfg.T, cfg.seed, cfg.h_init);
    const fs::path out = cfg.out_dir / "simulation.csv";
    auto f = io::open_out(out);
    io::write_simulation_csv(f, sim);
    return out;
}

struct FitResult {
    std::vector<std::vector<PosteriorDraws>> chains;  // per requested model
    std::vector<ModelKind> models;
    json summary;
};

/// Gibbs estimation of each requested model on y.
inline FitResult fit_models(std::span<const double> y, const RunConfig& cfg) {
    FitResult res;
    res.models = requested_models(cfg.model);
    json models = json::array();
    for (ModelKind m : res.models) {
        res.chains.push_back(run_chains(y, PriorSpec::defaults(), gibbs_config(cfg, m), cfg.chains));
        models.push_back(io::posterior_summary_json(res.chains.back(), cfg.delta));
    }
    res.summary = json{{"n_obs", y.size()}, {"seed", cfg.seed}, {"grid_size", cfg.grid_size}, {"models", std::move(models)}};
    return res;
}

/// fit -> posterior.csv (+ posterior_msgarch.csv with --model both), summary.json,
/// spec_<model>.json holding the posterior-mean plug-in spec.
inline json cmd_fit(const RunConfig& cfg) {
    const ReturnsSeries s = load_returns(cfg);
    FitResult res = fit_models(s.r, cfg);
    for (std::size_t i = 0; i < res.models.size(); ++i) {
        const fs::path post = i == 0 ? cfg.out_dir / "posterior.csv"
                                     : cfg.out_dir / (std::string("posterior_") + file_tag(res.models[i]) + ".csv");
        auto f = io::open_out(post);
        io::write_posterior_csv(f, res.chains[i]);
        io::save_spec(cfg.out_dir / (std::string("spec_") + file_tag(res.models[i]) + ".json"),
                      posterior_mean_spec(res.chains[i]));
    }
    io::write_text(cfg.out_dir / "summary.json", res.summary.dump(2) + "\n");
    return res.summary;
}

/// forecast -> forecasts.csv
inline fs::path cmd_forecast(const RunConfig& cfg) {
    const ModelSpec spec = io::load_spec(need(cfg.spec, "--spec"));
    const ReturnsSeries s = load_returns(cfg);
    const FilterRun run = run_filter(spec, s.r);
    const fs::path out = cfg.out_dir / "forecasts.csv";
    auto f = io::open_out(out);
    io::write_forecasts_csv(f, s.r, run);
    return out;
}

/// stability -> JSON report (also stability.json).
inline json cmd_stability(const RunConfig& cfg) {
    const ModelSpec spec = io::load_spec(need(cfg.spec, "--spec"));
    json report = io::to_json(analyze_stability(spec, cfg.delta));
    io::write_text(cfg.out_dir / "stability.json", report.dump(2) + "\n");
    return report;
}

/// evaluate -> comparison.json, comparison.csv, comparison_series.csv.
///
/// Uses --spec-cgarch/--spec-garch when both are given, otherwise fits both
/// models on the training window first. With --holdout f the last fraction f
/// of the series is scored out of sample.
inline json cmd_evaluate(const RunConfig& cfg) {
    require(cfg.holdout >= 0.0 && cfg.holdout < 1.0, "--holdout must lie in [0,1)");
    const ReturnsSeries s = load_returns(cfg);
    const std::span<const double> y(s.r);
    const auto n_train = static_cast<std::size_t>(std::floor((1.0 - cfg.holdout) * static_cast<double>(y.size())));
    require(n_train >= 1 && n_train <= y.size(), "holdout leaves no training data");
    const std::size_t eval_start = cfg.holdout > 0.0 ? n_train : 0;
    require(eval_start < y.size(), "holdout leaves no evaluation data");
    const std::span<const double> train = y.first(n_train);

    std::optional<ModelSpec> cgarch, garch;
    std::string plug_in = "given";
    if (cfg.spec_cgarch && cfg.spec_garch) {
        cgarch = io::load_spec(*cfg.spec_cgarch);
        garch = io::load_spec(*cfg.spec_garch);
    } else {
        RunConfig fit_cfg = cfg;
        fit_cfg.model = "both";
        FitResult res = fit_models(train, fit_cfg);
        cgarch = posterior_mean_spec(res.chains[0]);
        garch = posterior_mean_spec(res.chains[1]);
        plug_in = "posterior_mean";
        io::save_spec(cfg.out_dir / "spec_mscgarch.json", *cgarch);
        io::save_spec(cfg.out_dir / "spec_msgarch.json", *garch);
    }

    const Comparison c = compare_models(y, *cgarch, *garch, default_h_init(train), eval_start);
    json j = io::comparison_json(c, cfg.holdout > 0.0 ? "holdout" : "in_sample", plug_in);
    io::write_text(cfg.out_dir / "comparison.json", j.dump(2) + "\n");
    {
        auto f = io::open_out(cfg.out_dir / "comparison.csv");
        io::write_comparison_csv(f, c);
    }
    {
        auto f = io::open_out(cfg.out_dir / "comparison_series.csv");
        io::write_comparison_series_csv(f, y, c);
    }
    return j;
}

}  // namespace mscgarch::app
