#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mscgarch/error.hpp"
#include "mscgarch/model.hpp"

namespace mscgarch {

/// Snapshot of the forward recursion before observation t is seen.
///
/// alpha_pred and H describe time t (functions of I_{t-1} only); alpha_filt
/// holds p(Z_{t-1} | I_{t-1}) for the most recently absorbed observation
/// (the stationary law before any data).
struct FilterState {
    std::size_t t = 1;
    Eigen::VectorXd alpha_pred;
    Eigen::VectorXd alpha_filt;
    Eigen::VectorXd H;
    std::vector<VarianceStep> components;
    double loglik = 0.0;
};

struct ForecastRecord {
    std::size_t t = 1;
    double var_forecast = 0.0;
    Eigen::VectorXd alpha_pred;
    std::vector<VarianceStep> per_regime;
};

inline double log_normal_density(double y, double variance) noexcept {
    return -0.5 * (std::log(2.0 * std::numbers::pi) + std::log(variance) + y * y / variance);
}

/// Default H_0 for filtering and estimation: the sample variance of the series.
inline double default_h_init(std::span<const double> y) {
    const std::size_t n = y.size();
    if (n < 2) return 1.0;
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(n - 1);
    return var > 0.0 ? var : 1.0;
}

/// State before the first observation: alpha = stationary law, H_1 from
/// H_0 = H_init with y_0 = 0 (so w = 0 and H_1 = b0 + b2 H_init).
inline FilterState filter_init(const ModelSpec& spec, double H_init) {
    require(std::isfinite(H_init) && H_init > 0.0, "filter_init: H_init must be positive");
    const std::size_t k = spec.size();
    FilterState s;
    s.t = 1;
    s.alpha_pred = spec.transition().stationary();
    s.alpha_filt = s.alpha_pred;
    s.H.resize(static_cast<Eigen::Index>(k));
    s.components.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        s.components[j] = detail::variance_step(spec.regime(j), 0.0, H_init);
        s.H(static_cast<Eigen::Index>(j)) = s.components[j].H;
    }
    return s;
}

/// Absorb y_t: Bayes-update the regime probabilities, add log f(y_t | I_{t-1})
/// and advance all regime variances to t + 1. Densities are combined in log
/// space with a max shift.
inline FilterState filter_step(const FilterState& state, const ModelSpec& spec, double y_t) {
    require(std::isfinite(y_t), "filter_step: observation must be finite");
    const auto k = static_cast<Eigen::Index>(spec.size());
    require(state.alpha_pred.size() == k && state.H.size() == k, "filter_step: state/spec size mismatch");

    Eigen::VectorXd log_joint(k);
    double max_log = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < k; ++j) {
        const double a = state.alpha_pred(j);
        log_joint(j) = a > 0.0 ? std::log(a) + log_normal_density(y_t, state.H(j))
                               : -std::numeric_limits<double>::infinity();
        if (log_joint(j) > max_log) max_log = log_joint(j);
    }
    if (!std::isfinite(max_log)) {
        throw Error(ErrorCategory::numeric, "filter_step: mixture density vanished at t=" + std::to_string(state.t));
    }
    double sum = 0.0;
    Eigen::VectorXd filt(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        filt(j) = std::exp(log_joint(j) - max_log);
        sum += filt(j);
    }
    filt /= sum;

    FilterState next;
    next.t = state.t + 1;
    next.loglik = state.loglik + max_log + std::log(sum);
    next.alpha_filt = filt;
    next.alpha_pred = spec.transition().matrix().transpose() * filt;
    next.alpha_pred /= next.alpha_pred.sum();
    next.H.resize(k);
    next.components.resize(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        next.components[ju] = detail::variance_step(spec.regime(ju), y_t, state.H(j));
        next.H(j) = next.components[ju].H;
    }
    return next;
}

/// One-step conditional variance Var(y_t | I_{t-1}) = sum_j alpha_j H_{t,j}.
inline ForecastRecord forecast_one_step(const FilterState& state, const ModelSpec& spec) {
    require(state.alpha_pred.size() == static_cast<Eigen::Index>(spec.size()),
            "forecast_one_step: state/spec size mismatch");
    ForecastRecord r;
    r.t = state.t;
    r.var_forecast = state.alpha_pred.dot(state.H);
    r.alpha_pred = state.alpha_pred;
    r.per_regime = state.components;
    return r;
}

struct FilterRun {
    std::vector<FilterState> states;        // states[t] = state after absorbing y_{t+1}
    std::vector<ForecastRecord> forecasts;  // forecasts[t] built from I_{t} only (0-based t)
    double loglik = 0.0;
};

inline FilterRun run_filter(const ModelSpec& spec, std::span<const double> y, double H_init) {
    require(!y.empty(), "run_filter: series must be non-empty");
    FilterRun run;
    run.states.reserve(y.size());
    run.forecasts.reserve(y.size());
    FilterState state = filter_init(spec, H_init);
    for (std::size_t t = 0; t < y.size(); ++t) {
        run.forecasts.push_back(forecast_one_step(state, spec));
        try {
            state = filter_step(state, spec, y[t]);
        } catch (const Error& e) {
            throw Error(e.category(), std::string(e.what()) + " (observation index " + std::to_string(t + 1) + ")");
        }
        run.states.push_back(state);
    }
    run.loglik = state.loglik;
    return run;
}

inline FilterRun run_filter(const ModelSpec& spec, std::span<const double> y) {
    return run_filter(spec, y, default_h_init(y));
}

inline std::vector<double> variance_forecasts(const FilterRun& run) {
    std::vector<double> out;
    out.reserve(run.forecasts.size());
    for (const auto& f : run.forecasts) out.push_back(f.var_forecast);
    return out;
}

}  // namespace mscgarch
