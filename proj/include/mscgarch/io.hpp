#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "mscgarch/bayes.hpp"
#include "mscgarch/error.hpp"
#include "mscgarch/evaluation.hpp"
#include "mscgarch/filter.hpp"
#include "mscgarch/model.hpp"
#include "mscgarch/stability.hpp"
#include "mscgarch/stats.hpp"

namespace mscgarch::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Number formatting: shortest representation that round-trips.
// ---------------------------------------------------------------------------

inline std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\"");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n\"");
    return s.substr(first, last - first + 1);
}

inline bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::io, "cannot open input file " + path.string());
    return in;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorCategory::io, "cannot open output file " + path.string());
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
    if (!out) throw Error(ErrorCategory::io, "failed writing " + path.string());
}

// ---------------------------------------------------------------------------
// Model spec JSON
// ---------------------------------------------------------------------------

inline json to_json(const RegimeParams& p) {
    return json{{"a0", p.a0}, {"a1", p.a1}, {"a2", p.a2}, {"b0", p.b0},
                {"b1", p.b1}, {"b2", p.b2}, {"gamma", p.gamma}};
}

inline json to_json(const ModelSpec& spec) {
    json regimes = json::array();
    for (const auto& r : spec.regimes()) regimes.push_back(to_json(r));
    json rows = json::array();
    const auto& p = spec.transition();
    for (std::size_t i = 0; i < p.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < p.size(); ++j) row.push_back(p(i, j));
        rows.push_back(std::move(row));
    }
    return json{{"regimes", std::move(regimes)}, {"transition", std::move(rows)}};
}

inline double number_field(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw Error(ErrorCategory::parse, std::string("spec: missing field \"") + key + "\"");
    if (!it->is_number()) throw Error(ErrorCategory::parse, std::string("spec: field \"") + key + "\" is not a number");
    return it->get<double>();
}

/// Parse {"regimes":[{a0,a1,a2,b0,b1,b2,gamma},...],"transition":[[...],...]}.
/// Structural problems are parse errors; out-of-range values fail validation.
inline ModelSpec spec_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCategory::parse, "spec: top level must be an object");
    if (!j.contains("regimes") || !j["regimes"].is_array())
        throw Error(ErrorCategory::parse, "spec: \"regimes\" must be an array");
    if (!j.contains("transition") || !j["transition"].is_array())
        throw Error(ErrorCategory::parse, "spec: \"transition\" must be an array of rows");
    for (const auto& [key, _] : j.items())
        if (key != "regimes" && key != "transition") throw Error(ErrorCategory::parse, "spec: unknown field \"" + key + "\"");

    std::vector<RegimeParams> regimes;
    for (const auto& r : j["regimes"]) {
        if (!r.is_object()) throw Error(ErrorCategory::parse, "spec: each regime must be an object");
        for (const auto& [key, _] : r.items()) {
            bool known = false;
            for (std::size_t i = 0; i < kParamsPerRegime; ++i) known = known || key == param_stem(i);
            if (!known) throw Error(ErrorCategory::parse, "spec: unknown regime field \"" + key + "\"");
        }
        RegimeParams p;
        for (std::size_t i = 0; i < kParamsPerRegime; ++i) param_ref(p, i) = number_field(r, param_stem(i));
        regimes.push_back(p);
    }
    std::vector<std::vector<double>> rows;
    for (const auto& row : j["transition"]) {
        if (!row.is_array()) throw Error(ErrorCategory::parse, "spec: transition rows must be arrays");
        std::vector<double> values;
        for (const auto& v : row) {
            if (!v.is_number()) throw Error(ErrorCategory::parse, "spec: transition entries must be numbers");
            values.push_back(v.get<double>());
        }
        rows.push_back(std::move(values));
    }
    return ModelSpec(std::move(regimes), TransitionMatrix::from_rows(rows));
}

inline ModelSpec spec_from_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCategory::parse, std::string("spec: malformed JSON: ") + e.what());
    }
    return spec_from_json(j);
}

/// Canonical text: keys sorted, two-space indent, trailing newline.
inline std::string spec_to_string(const ModelSpec& spec) { return to_json(spec).dump(2) + "\n"; }

inline ModelSpec load_spec(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return spec_from_string(ss.str());
}

inline void save_spec(const std::filesystem::path& path, const ModelSpec& spec) {
    write_text(path, spec_to_string(spec));
}

// ---------------------------------------------------------------------------
// Series CSV
// ---------------------------------------------------------------------------

struct SeriesData {
    std::vector<std::string> labels;  // first column when the file has two or more
    std::vector<double> values;       // last column
};

/// Accepts bare values or (label, ..., value) rows, with an optional header
/// on the first line. NaN and infinities are rejected.
inline SeriesData parse_series_csv(std::istream& in) {
    SeriesData out;
    std::string line;
    std::size_t lineno = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view view = trim(line);
        if (view.empty()) continue;
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = view.find(',', start);
            fields.push_back(view.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        double v = 0.0;
        if (!parse_double(fields.back(), v)) {
            if (!seen_data && out.values.empty() && lineno == 1) continue;  // header
            throw Error(ErrorCategory::parse, "csv: line " + std::to_string(lineno) + ": cannot parse value \"" +
                                                  std::string(trim(fields.back())) + "\"");
        }
        if (!std::isfinite(v)) {
            throw Error(ErrorCategory::parse, "csv: line " + std::to_string(lineno) + ": non-finite value");
        }
        if (fields.size() >= 2) out.labels.emplace_back(trim(fields.front()));
        out.values.push_back(v);
        seen_data = true;
    }
    if (out.values.empty()) throw Error(ErrorCategory::parse, "csv: no data rows");
    if (!out.labels.empty() && out.labels.size() != out.values.size())
        throw Error(ErrorCategory::parse, "csv: inconsistent column layout");
    return out;
}

inline SeriesData read_series_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    try {
        return parse_series_csv(in);
    } catch (const Error& e) {
        throw Error(e.category(), path.string() + ": " + e.what());
    }
}

inline void write_series_csv(std::ostream& out, std::span<const double> values, std::span<const std::string> labels,
                             const std::string& value_name) {
    const bool with_labels = !labels.empty();
    out << (with_labels ? "date," : "") << value_name << "\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (with_labels) out << labels[i] << ",";
        out << fmt(values[i]) << "\n";
    }
}

// ---------------------------------------------------------------------------
// Outputs
// ---------------------------------------------------------------------------

/// t,y,z,H_1..H_K with 1-based regime labels.
inline void write_simulation_csv(std::ostream& out, const SimulationOutput& sim) {
    const auto k = sim.H.cols();
    out << "t,y,z";
    for (Eigen::Index j = 0; j < k; ++j) out << ",H_" << j + 1;
    out << "\n";
    for (std::size_t t = 0; t < sim.y.size(); ++t) {
        out << t + 1 << "," << fmt(sim.y[t]) << "," << sim.z[t] + 1;
        for (Eigen::Index j = 0; j < k; ++j) out << "," << fmt(sim.H(static_cast<Eigen::Index>(t), j));
        out << "\n";
    }
}

/// t,y,y_squared,var_forecast,alpha_1..alpha_K,H_1..H_K.
inline void write_forecasts_csv(std::ostream& out, std::span<const double> y, const FilterRun& run) {
    require(y.size() == run.forecasts.size(), "write_forecasts_csv: length mismatch");
    const std::size_t k = run.forecasts.empty() ? 0 : static_cast<std::size_t>(run.forecasts.front().alpha_pred.size());
    out << "t,y,y_squared,var_forecast";
    for (std::size_t j = 0; j < k; ++j) out << ",alpha_" << j + 1;
    for (std::size_t j = 0; j < k; ++j) out << ",H_" << j + 1;
    out << "\n";
    for (std::size_t t = 0; t < y.size(); ++t) {
        const ForecastRecord& f = run.forecasts[t];
        out << f.t << "," << fmt(y[t]) << "," << fmt(y[t] * y[t]) << "," << fmt(f.var_forecast);
        for (std::size_t j = 0; j < k; ++j) out << "," << fmt(f.alpha_pred(static_cast<Eigen::Index>(j)));
        for (std::size_t j = 0; j < k; ++j) out << "," << fmt(f.per_regime[j].H);
        out << "\n";
    }
}

/// One row per retained iteration: chain,iter, then one column per parameter.
inline void write_posterior_csv(std::ostream& out, const std::vector<PosteriorDraws>& chains) {
    require(!chains.empty(), "write_posterior_csv: no chains");
    const auto cols = parameter_columns(chains.front().model);
    out << "chain,iter";
    for (const auto& c : cols) out << "," << c.name;
    out << "\n";
    for (std::size_t ch = 0; ch < chains.size(); ++ch) {
        const PosteriorDraws& d = chains[ch];
        for (std::size_t r = 0; r < d.retained(); ++r) {
            out << ch + 1 << "," << d.n_burnin + r + 1;
            for (const auto& c : cols) {
                const double v = c.is_eta ? d.eta_draws(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c.regime))
                                          : d.theta_draws(static_cast<Eigen::Index>(r),
                                                          static_cast<Eigen::Index>(c.regime * kParamsPerRegime + c.param));
                out << "," << fmt(v);
            }
            out << "\n";
        }
    }
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline json to_json(const StabilityReport& r) {
    json j{{"rho", r.rho},
           {"stable", r.stable},
           {"bound", optional_number(r.bound)},
           {"delta", r.delta},
           {"M", to_json(r.M)},
           {"pi", to_json(r.pi)},
           {"Omega", to_json(r.Omega)},
           {"threshold_convention", r.threshold_convention},
           {"rho_method", r.rho_method}};
    if (r.condition_number) j["condition_number"] = *r.condition_number;
    return j;
}

inline json to_json(const DescriptiveStats& s) {
    return json{{"mean", s.mean},         {"std", s.std}, {"skewness", optional_number(s.skewness)},
                {"max", s.max},           {"min", s.min}, {"kurtosis", optional_number(s.kurtosis)}};
}

/// Per-model posterior table: mean / std / quantiles for each reported parameter.
inline json posterior_summary_json(const std::vector<PosteriorDraws>& chains, double delta = kDefaultDelta) {
    require(!chains.empty(), "posterior_summary_json: no chains");
    json params = json::array();
    for (const ParamSummary& s : summarize(chains)) {
        json p{{"name", s.name}, {"mean", s.mean}, {"std", s.std}, {"q025", s.q025}, {"q50", s.q50}, {"q975", s.q975}};
        if (s.rhat) p["rhat"] = *s.rhat;
        params.push_back(std::move(p));
    }
    std::size_t draws = 0, relabels = 0;
    std::vector<std::size_t> edge(2 * kParamsPerRegime, 0);
    for (const auto& c : chains) {
        draws += c.retained();
        relabels += c.relabels;
        for (std::size_t i = 0; i < edge.size(); ++i) edge[i] += c.grid_edge_hits[i];
    }
    json edges = json::object();
    for (const auto& col : parameter_columns(chains.front().model))
        if (!col.is_eta) edges[col.name] = edge[col.regime * kParamsPerRegime + col.param];

    const ModelSpec mean_spec = posterior_mean_spec(chains);
    return json{{"model", model_name(chains.front().model)},
                {"parameters", std::move(params)},
                {"chains", chains.size()},
                {"iterations", chains.front().n_iter},
                {"burnin", chains.front().n_burnin},
                {"retained_draws", draws},
                {"relabels", relabels},
                {"grid_edge_hits", std::move(edges)},
                {"stability_at_posterior_mean", to_json(analyze_stability(mean_spec, delta))}};
}

inline json to_json(const EvalReport& r) { return json{{"rmse", r.rmse}, {"mae", r.mae}, {"n", r.n}}; }

inline json comparison_json(const Comparison& c, const std::string& evaluation, const std::string& plug_in) {
    return json{{"evaluation", evaluation},
                {"eval_start", c.eval_start + 1},
                {"parameters", plug_in},
                {"models", json{{c.garch.model_name, to_json(c.garch)}, {c.cgarch.model_name, to_json(c.cgarch)}}},
                {"winner", json{{"rmse", c.rmse_winner()}, {"mae", c.mae_winner()}}}};
}

/// Metric rows, model columns.
inline void write_comparison_csv(std::ostream& out, const Comparison& c) {
    out << "metric," << c.garch.model_name << "," << c.cgarch.model_name << "\n";
    out << "RMSE," << fmt(c.garch.rmse) << "," << fmt(c.cgarch.rmse) << "\n";
    out << "MAE," << fmt(c.garch.mae) << "," << fmt(c.cgarch.mae) << "\n";
}

/// Tidy per-period data behind the forecast plots.
inline void write_comparison_series_csv(std::ostream& out, std::span<const double> y, const Comparison& c) {
    out << "t,y_squared,var_ms_garch,var_ms_cgarch,abs_err_ms_garch,abs_err_ms_cgarch,evaluated\n";
    for (std::size_t t = 0; t < y.size(); ++t) {
        const double y2 = y[t] * y[t];
        out << t + 1 << "," << fmt(y2) << "," << fmt(c.var_garch[t]) << "," << fmt(c.var_cgarch[t]) << ","
            << fmt(std::abs(c.var_garch[t] - y2)) << "," << fmt(std::abs(c.var_cgarch[t] - y2)) << ","
            << (t >= c.eval_start ? 1 : 0) << "\n";
    }
}

inline json error_json(const Error& e) {
    return json{{"error", json{{"category", std::string(category_name(e.category()))}, {"message", e.what()}}}};
}

}  // namespace mscgarch::io
