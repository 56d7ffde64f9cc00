#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mscgarch/error.hpp"
#include "mscgarch/filter.hpp"
#include "mscgarch/model.hpp"

namespace mscgarch {

/// Accuracy of one-step variance forecasts against squared observations.
struct EvalReport {
    std::string model_name;
    double rmse = 0.0;
    double mae = 0.0;
    std::size_t n = 0;
    std::vector<double> per_t_abs_error;
};

/// e_t = var_forecast_t - y_t^2; rmse = sqrt(mean e^2), mae = mean |e|.
/// Forecast t must be built from observations before t.
inline EvalReport forecast_errors(std::span<const double> var_forecast, std::span<const double> y,
                                  std::string model_name = {}) {
    require(var_forecast.size() == y.size(), "forecast_errors: forecast and observation lengths differ");
    require(!y.empty(), "forecast_errors: empty series");
    EvalReport r;
    r.model_name = std::move(model_name);
    r.n = y.size();
    r.per_t_abs_error.reserve(y.size());
    double sq = 0.0;
    double ab = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        const double e = var_forecast[t] - y[t] * y[t];
        sq += e * e;
        ab += std::abs(e);
        r.per_t_abs_error.push_back(std::abs(e));
    }
    r.rmse = std::sqrt(sq / static_cast<double>(r.n));
    r.mae = ab / static_cast<double>(r.n);
    return r;
}

struct Comparison {
    EvalReport cgarch;
    EvalReport garch;
    std::vector<double> var_cgarch;  // full-length forecasts, for plotting
    std::vector<double> var_garch;
    std::size_t eval_start = 0;

    [[nodiscard]] std::string rmse_winner() const { return cgarch.rmse <= garch.rmse ? cgarch.model_name : garch.model_name; }
    [[nodiscard]] std::string mae_winner() const { return cgarch.mae <= garch.mae ? cgarch.model_name : garch.model_name; }
};

/// Filter the whole series under both specs and score forecasts from
/// eval_start on. eval_start = 0 reproduces in-sample evaluation.
inline Comparison compare_models(std::span<const double> y, const ModelSpec& spec_cgarch, const ModelSpec& spec_garch,
                                 double H_init, std::size_t eval_start = 0) {
    require(eval_start < y.size(), "compare_models: evaluation window is empty");
    Comparison c;
    c.eval_start = eval_start;
    c.var_cgarch = variance_forecasts(run_filter(spec_cgarch, y, H_init));
    c.var_garch = variance_forecasts(run_filter(spec_garch, y, H_init));
    const auto tail = [&](const std::vector<double>& v) {
        return std::span<const double>(v).subspan(eval_start);
    };
    c.cgarch = forecast_errors(tail(c.var_cgarch), y.subspan(eval_start), "MS-CGARCH");
    c.garch = forecast_errors(tail(c.var_garch), y.subspan(eval_start), "MS-GARCH");
    return c;
}

inline Comparison compare_models(std::span<const double> y, const ModelSpec& spec_cgarch, const ModelSpec& spec_garch) {
    return compare_models(y, spec_cgarch, spec_garch, default_h_init(y), 0);
}

}  // namespace mscgarch
