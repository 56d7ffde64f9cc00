#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mscgarch/error.hpp"
#include "mscgarch/filter.hpp"
#include "mscgarch/markov.hpp"
#include "mscgarch/model.hpp"
#include "mscgarch/rng.hpp"

namespace mscgarch {

// ---------------------------------------------------------------------------
// Priors and configuration
// ---------------------------------------------------------------------------

struct Interval {
    double lo;
    double hi;
};

/// Independent uniform priors on every regime parameter and Beta priors on
/// the diagonal transition probabilities.
struct PriorSpec {
    /// theta_bounds[k][i]: interval for parameter i (a0 a1 a2 b0 b1 b2 gamma) of regime k.
    std::vector<std::array<Interval, kParamsPerRegime>> theta_bounds;
    /// eta_beta[k] = (c_kk1, c_kk2): Beta(c_kk1 + n_kk, c_kk2 + n_k,other).
    std::vector<std::pair<double, double>> eta_beta;

    [[nodiscard]] std::size_t regimes() const noexcept { return theta_bounds.size(); }

    void validate() const {
        require(!theta_bounds.empty() && theta_bounds.size() == eta_beta.size(),
                "prior: theta bounds and beta hyperparameters must cover the same regimes");
        for (const auto& regime : theta_bounds) {
            for (std::size_t i = 0; i < kParamsPerRegime; ++i) {
                const Interval& iv = regime[i];
                require(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo < iv.hi,
                        std::string("prior: interval for ") + param_stem(i) + " must satisfy lo < hi");
                const bool strictly_positive = i == 0 || i == 3 || i == 6;
                require(strictly_positive ? iv.lo > 0.0 : iv.lo >= 0.0,
                        std::string("prior: interval for ") + param_stem(i) + " leaves the parameter space");
            }
        }
        for (const auto& [c1, c2] : eta_beta) require(c1 > 0.0 && c2 > 0.0, "prior: beta hyperparameters must be positive");
    }

    static PriorSpec defaults(std::size_t k = 2) {
        PriorSpec p;
        const std::array<Interval, kParamsPerRegime> bounds = {
            Interval{0.001, 10.0}, Interval{0.0, 1.0}, Interval{0.0, 1.0}, Interval{0.001, 10.0},
            Interval{0.0, 1.0},    Interval{0.0, 1.0}, Interval{0.01, 10.0}};
        p.theta_bounds.assign(k, bounds);
        p.eta_beta.assign(k, {1.0, 1.0});
        return p;
    }
};

enum class ModelKind { ms_cgarch, ms_garch };

inline const char* model_name(ModelKind m) { return m == ModelKind::ms_cgarch ? "MS-CGARCH" : "MS-GARCH"; }

struct GibbsConfig {
    std::size_t n_iter = 2000;
    std::size_t n_burnin = 400;
    std::size_t grid_size = 33;
    std::uint64_t seed = 1;
    std::uint64_t chain = 0;  // selects the RNG stream
    bool identification = true;
    bool keep_paths = false;
    ModelKind model = ModelKind::ms_cgarch;
    std::optional<std::vector<RegimeParams>> initial_theta;
    std::optional<std::pair<double, double>> initial_eta;

    void validate() const {
        require(n_iter > n_burnin, "gibbs: n_iter must exceed n_burnin");
        require(grid_size >= 16, "gibbs: grid size must be at least 16");
    }
};

/// Burn-in of 20% of the iterations.
inline std::size_t default_burnin(std::size_t n_iter) { return n_iter / 5; }

// ---------------------------------------------------------------------------
// Parameter layout
// ---------------------------------------------------------------------------

/// Which parameters the sampler moves. The MS-GARCH baseline ties b to a and
/// ignores gamma.
inline bool is_free(ModelKind m, std::size_t param) { return m == ModelKind::ms_cgarch || param < 3; }

inline constexpr double kTiedGamma = 1.0;

inline void tie_components(RegimeParams& p) {
    p.b0 = p.a0;
    p.b1 = p.a1;
    p.b2 = p.a2;
    p.gamma = kTiedGamma;
}

/// One reported column: either theta(regime, param) or eta(regime).
struct ParamColumn {
    std::string name;
    bool is_eta = false;
    std::size_t regime = 0;
    std::size_t param = 0;
};

/// Reporting order: a0k a1k a2k b0k b1k b2k for each regime, then gamma_k,
/// then eta_kk.
inline std::vector<ParamColumn> parameter_columns(ModelKind m, std::size_t k = 2) {
    std::vector<ParamColumn> cols;
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t i = 0; i < 6; ++i)
            if (is_free(m, i)) cols.push_back({std::string(param_stem(i)) + std::to_string(r + 1), false, r, i});
    if (m == ModelKind::ms_cgarch)
        for (std::size_t r = 0; r < k; ++r) cols.push_back({"gamma" + std::to_string(r + 1), false, r, 6});
    for (std::size_t r = 0; r < k; ++r)
        cols.push_back({"eta" + std::to_string(r + 1) + std::to_string(r + 1), true, r, 0});
    return cols;
}

// ---------------------------------------------------------------------------
// Block 1: regime path (forward filtering, backward sampling)
// ---------------------------------------------------------------------------

/// Filtered probabilities p(z_t | Y_t) for t = 1..T as a T x K matrix.
inline Eigen::MatrixXd filtered_probabilities(const ModelSpec& spec, std::span<const double> y, double H_init) {
    const auto k = static_cast<Eigen::Index>(spec.size());
    Eigen::MatrixXd filt(static_cast<Eigen::Index>(y.size()), k);
    FilterState state = filter_init(spec, H_init);
    for (std::size_t t = 0; t < y.size(); ++t) {
        state = filter_step(state, spec, y[t]);
        filt.row(static_cast<Eigen::Index>(t)) = state.alpha_filt.transpose();
    }
    return filt;
}

/// p(z_t = j | z_{t+1}, Y_t) proportional to filt_t(j) * P(j, z_{t+1}).
inline Eigen::VectorXd backward_probabilities(const Eigen::VectorXd& filt_t, const Eigen::MatrixXd& p, int next) {
    Eigen::VectorXd w = filt_t.cwiseProduct(p.col(next));
    const double s = w.sum();
    if (!(s > 0.0)) return Eigen::VectorXd::Zero(filt_t.size());
    return w / s;
}

inline std::vector<int> sample_states(const ModelSpec& spec, std::span<const double> y, double H_init, Rng& rng) {
    require(!y.empty(), "sample_states: empty series");
    const std::size_t k = spec.size();
    const std::size_t T = y.size();
    std::vector<int> z(T, 0);
    if (k == 1) return z;

    const Eigen::MatrixXd filt = filtered_probabilities(spec, y, H_init);
    const Eigen::MatrixXd& p = spec.transition().matrix();
    Eigen::VectorXd last = filt.row(static_cast<Eigen::Index>(T - 1)).transpose();
    z[T - 1] = draw_categorical(rng, last, k);
    for (std::size_t t = T - 1; t-- > 0;) {
        const Eigen::VectorXd probs =
            backward_probabilities(filt.row(static_cast<Eigen::Index>(t)).transpose(), p, z[t + 1]);
        if (!(probs.sum() > 0.0)) {
            throw Error(ErrorCategory::numeric,
                        "sample_states: zero backward mass at observation index " + std::to_string(t + 1));
        }
        z[t] = draw_categorical(rng, probs, k);
    }
    return z;
}

// ---------------------------------------------------------------------------
// Block 2: transition probabilities (conjugate Beta)
// ---------------------------------------------------------------------------

/// counts(i, j) = number of t with z_{t-1} = i, z_t = j.
inline Eigen::MatrixXd transition_counts(std::span<const int> z, std::size_t k) {
    Eigen::MatrixXd n = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t t = 1; t < z.size(); ++t) n(z[t - 1], z[t]) += 1.0;
    return n;
}

/// Draw (eta_11, eta_22) from Beta(c_11 + n_11, c_12 + n_12) and
/// Beta(c_22 + n_22, c_21 + n_21). Two regimes only.
inline Eigen::Vector2d sample_transition(std::span<const int> z, const PriorSpec& prior, Rng& rng) {
    require(prior.regimes() == 2, "sample_transition: only two-regime chains are supported");
    require(z.size() >= 2, "sample_transition: path must have at least two points");
    const Eigen::MatrixXd n = transition_counts(z, 2);
    constexpr double eps = 1e-12;
    Eigen::Vector2d eta;
    eta(0) = beta_draw(rng, prior.eta_beta[0].first + n(0, 0), prior.eta_beta[0].second + n(0, 1));
    eta(1) = beta_draw(rng, prior.eta_beta[1].first + n(1, 1), prior.eta_beta[1].second + n(1, 0));
    // Keep the chain irreducible even if a draw rounds to an endpoint.
    for (Eigen::Index i = 0; i < 2; ++i) eta(i) = std::clamp(eta(i), eps, 1.0 - eps);
    return eta;
}

// ---------------------------------------------------------------------------
// Block 3: Griddy Gibbs on each regime parameter
// ---------------------------------------------------------------------------

/// Sum of log f(y_t | theta_k, z_t = k, Y_{t-1}) over the t assigned to regime k.
/// The regime's variance is rebuilt from H_0 = H_init, y_0 = 0 over the whole
/// series, since it does not depend on the regime path.
inline double regime_conditional_loglik(const RegimeParams& params, int regime, std::span<const double> y,
                                        std::span<const int> z, double H_init) {
    double h = H_init;
    double y_prev = 0.0;
    double ll = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        h = detail::variance_step(params, y_prev, h).H;
        if (z[t] == regime) ll += log_normal_density(y[t], h);
        y_prev = y[t];
    }
    return ll;
}

/// Complete-data log likelihood sum_t log f(y_t | theta, z_t, Y_{t-1}).
inline double complete_data_loglik(const ModelSpec& spec, std::span<const double> y, std::span<const int> z,
                                   double H_init) {
    require(y.size() == z.size(), "complete_data_loglik: series and path lengths differ");
    double ll = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k)
        ll += regime_conditional_loglik(spec.regime(k), static_cast<int>(k), y, z, H_init);
    return ll;
}

/// Unnormalised grid density integrated by the trapezoidal rule.
struct GridCdf {
    std::vector<double> nodes;
    std::vector<double> cdf;  // cdf[0] = 0, nondecreasing
};

inline GridCdf grid_cdf(std::vector<double> nodes, std::span<const double> log_density) {
    require(nodes.size() == log_density.size() && nodes.size() >= 2, "grid_cdf: need matching grids of size >= 2");
    double max_log = -std::numeric_limits<double>::infinity();
    for (double v : log_density)
        if (!std::isnan(v)) max_log = std::max(max_log, v);
    if (!std::isfinite(max_log)) {
        throw Error(ErrorCategory::numeric, "griddy gibbs: conditional posterior is zero on every grid point");
    }
    GridCdf g;
    g.nodes = std::move(nodes);
    g.cdf.assign(g.nodes.size(), 0.0);
    double prev = std::isnan(log_density[0]) ? 0.0 : std::exp(log_density[0] - max_log);
    for (std::size_t i = 1; i < g.nodes.size(); ++i) {
        const double cur = std::isnan(log_density[i]) ? 0.0 : std::exp(log_density[i] - max_log);
        g.cdf[i] = g.cdf[i - 1] + 0.5 * (prev + cur) * (g.nodes[i] - g.nodes[i - 1]);
        prev = cur;
    }
    return g;
}

/// Linear-interpolation inverse of the grid CDF for u in [0, cdf.back()].
inline double invert_grid_cdf(const GridCdf& g, double u) {
    const auto it = std::lower_bound(g.cdf.begin() + 1, g.cdf.end(), u);
    if (it == g.cdf.end()) return g.nodes.back();
    const auto i = static_cast<std::size_t>(it - g.cdf.begin());
    const double span = g.cdf[i] - g.cdf[i - 1];
    const double frac = span > 0.0 ? (u - g.cdf[i - 1]) / span : 1.0;
    return g.nodes[i - 1] + std::clamp(frac, 0.0, 1.0) * (g.nodes[i] - g.nodes[i - 1]);
}

inline std::vector<double> uniform_grid(Interval iv, std::size_t g) {
    std::vector<double> nodes(g);
    const double step = (iv.hi - iv.lo) / static_cast<double>(g - 1);
    for (std::size_t i = 0; i < g; ++i) nodes[i] = iv.lo + step * static_cast<double>(i);
    nodes.back() = iv.hi;
    return nodes;
}

struct GriddyDraw {
    double value;
    bool edge_hit;  // landed in the first or last grid cell
};

/// Draw one regime parameter from its conditional posterior on a uniform grid
/// spanning its prior interval. With tie set (MS-GARCH baseline) the matching
/// b-coefficient follows the a-coefficient.
inline GriddyDraw griddy_gibbs_update(const RegimeParams& current, int regime, std::size_t param,
                                      std::span<const double> y, std::span<const int> z, double H_init,
                                      Interval bounds, std::size_t grid_size, Rng& rng, bool tie = false) {
    require(grid_size >= 2, "griddy_gibbs_update: grid too small");
    require(y.size() == z.size(), "griddy_gibbs_update: series and path lengths differ");
    std::vector<double> nodes = uniform_grid(bounds, grid_size);
    std::vector<double> logpost(grid_size);
    RegimeParams trial = current;
    for (std::size_t g = 0; g < grid_size; ++g) {
        param_ref(trial, param) = nodes[g];
        if (tie) tie_components(trial);
        logpost[g] = regime_conditional_loglik(trial, regime, y, z, H_init);
    }
    const GridCdf cdf = grid_cdf(std::move(nodes), logpost);
    const double u = uniform01(rng) * cdf.cdf.back();
    const double x = invert_grid_cdf(cdf, u);
    const double step = cdf.nodes[1] - cdf.nodes[0];
    const bool edge = x <= cdf.nodes.front() + step || x >= cdf.nodes.back() - step;
    return {std::clamp(x, bounds.lo, bounds.hi), edge};
}

// ---------------------------------------------------------------------------
// The sampler
// ---------------------------------------------------------------------------

struct PosteriorDraws {
    ModelKind model = ModelKind::ms_cgarch;
    Eigen::MatrixXd theta_draws;  // retained x (7K), regime-major, order a0 a1 a2 b0 b1 b2 gamma
    Eigen::MatrixXd eta_draws;    // retained x K diagonal transition probabilities
    std::vector<std::vector<int>> z_draws;
    std::vector<std::size_t> grid_edge_hits;  // per theta column, over all iterations
    std::size_t n_iter = 0;
    std::size_t n_burnin = 0;
    std::size_t relabels = 0;

    [[nodiscard]] std::size_t retained() const noexcept { return static_cast<std::size_t>(theta_draws.rows()); }

    /// Draws of one reported column.
    [[nodiscard]] Eigen::VectorXd column(const ParamColumn& c) const {
        if (c.is_eta) return eta_draws.col(static_cast<Eigen::Index>(c.regime));
        return theta_draws.col(static_cast<Eigen::Index>(c.regime * kParamsPerRegime + c.param));
    }
};

inline double clamp_to(Interval iv, double v) { return std::clamp(v, iv.lo, iv.hi); }

/// Data-scaled starting point: regime 1 high-volatility, regime 2 low.
inline std::vector<RegimeParams> default_initial_theta(std::span<const double> y, const PriorSpec& prior) {
    const double s2 = default_h_init(y);
    std::vector<RegimeParams> theta = {RegimeParams{s2, 0.3, 0.2, 0.4 * s2, 0.1, 0.2, 1.0},
                                       RegimeParams{0.3 * s2, 0.1, 0.2, 0.15 * s2, 0.05, 0.2, 1.0}};
    for (std::size_t k = 0; k < theta.size(); ++k)
        for (std::size_t i = 0; i < kParamsPerRegime; ++i)
            param_ref(theta[k], i) = clamp_to(prior.theta_bounds[k][i], param_value(theta[k], i));
    return theta;
}

/// Random starting point spread over a wide data-scaled box, for multi-chain runs.
inline std::vector<RegimeParams> dispersed_initial_theta(std::span<const double> y, const PriorSpec& prior, Rng& rng) {
    const double s2 = default_h_init(y);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto in = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    std::vector<RegimeParams> theta(2);
    for (auto& r : theta) {
        r = RegimeParams{in(0.1 * s2, 2.0 * s2), in(0.0, 0.5), in(0.0, 0.5), in(0.05 * s2, 1.0 * s2),
                         in(0.0, 0.5),           in(0.0, 0.5), in(0.2, 4.0)};
    }
    if (theta[0].a0 < theta[1].a0) std::swap(theta[0], theta[1]);
    for (std::size_t k = 0; k < theta.size(); ++k)
        for (std::size_t i = 0; i < kParamsPerRegime; ++i)
            param_ref(theta[k], i) = clamp_to(prior.theta_bounds[k][i], param_value(theta[k], i));
    return theta;
}

/// Three-block Gibbs sampler: regime path, transition diagonal, then a
/// Griddy Gibbs sweep over a0 a1 a2 b0 b1 b2 gamma of regime 1 then regime 2.
///
/// With identification on, a sweep that ends with a0 of regime 1 below a0 of
/// regime 2 swaps the regime labels (parameters, eta and path).
inline PosteriorDraws run_gibbs(std::span<const double> y, const PriorSpec& prior, const GibbsConfig& cfg) {
    cfg.validate();
    prior.validate();
    require(prior.regimes() == 2, "run_gibbs: only two-regime estimation is supported");
    require(y.size() >= 30, "run_gibbs: need at least 30 observations");
    for (double v : y) require(std::isfinite(v), "run_gibbs: series contains non-finite values");

    Rng rng = make_rng(cfg.seed, Stream::mcmc, cfg.chain);
    const double H_init = default_h_init(y);
    std::vector<RegimeParams> theta = cfg.initial_theta ? *cfg.initial_theta : default_initial_theta(y, prior);
    require(theta.size() == 2, "run_gibbs: initial theta must have two regimes");
    std::pair<double, double> eta = cfg.initial_eta.value_or(std::pair{0.9, 0.9});
    const bool tie = cfg.model == ModelKind::ms_garch;
    if (tie)
        for (auto& r : theta) tie_components(r);

    const std::size_t keep = cfg.n_iter - cfg.n_burnin;
    PosteriorDraws out;
    out.model = cfg.model;
    out.n_iter = cfg.n_iter;
    out.n_burnin = cfg.n_burnin;
    out.theta_draws.resize(static_cast<Eigen::Index>(keep), static_cast<Eigen::Index>(2 * kParamsPerRegime));
    out.eta_draws.resize(static_cast<Eigen::Index>(keep), 2);
    out.grid_edge_hits.assign(2 * kParamsPerRegime, 0);

    for (std::size_t iter = 0; iter < cfg.n_iter; ++iter) {
        try {
            const ModelSpec spec(theta, TransitionMatrix::two_state(eta.first, eta.second));
            std::vector<int> z = sample_states(spec, y, H_init, rng);
            const Eigen::Vector2d eta_draw = sample_transition(z, prior, rng);
            eta = {eta_draw(0), eta_draw(1)};

            for (std::size_t k = 0; k < 2; ++k) {
                for (std::size_t i = 0; i < kParamsPerRegime; ++i) {
                    if (!is_free(cfg.model, i)) continue;
                    const GriddyDraw d = griddy_gibbs_update(theta[k], static_cast<int>(k), i, y, z, H_init,
                                                             prior.theta_bounds[k][i], cfg.grid_size, rng, tie);
                    param_ref(theta[k], i) = d.value;
                    if (tie) tie_components(theta[k]);
                    if (d.edge_hit) ++out.grid_edge_hits[k * kParamsPerRegime + i];
                }
            }

            if (cfg.identification && theta[0].a0 < theta[1].a0) {
                std::swap(theta[0], theta[1]);
                std::swap(eta.first, eta.second);
                for (int& s : z) s = 1 - s;
                ++out.relabels;
            }

            if (iter >= cfg.n_burnin) {
                const auto row = static_cast<Eigen::Index>(iter - cfg.n_burnin);
                for (std::size_t k = 0; k < 2; ++k)
                    for (std::size_t i = 0; i < kParamsPerRegime; ++i)
                        out.theta_draws(row, static_cast<Eigen::Index>(k * kParamsPerRegime + i)) =
                            param_value(theta[k], i);
                out.eta_draws(row, 0) = eta.first;
                out.eta_draws(row, 1) = eta.second;
                if (cfg.keep_paths) out.z_draws.push_back(std::move(z));
            }
        } catch (const Error& e) {
            throw Error(e.category(), std::string(e.what()) + " (gibbs iteration " + std::to_string(iter + 1) + ")");
        }
    }
    return out;
}

/// Independent chains on separate RNG streams. Chain 0 starts from the
/// default point, the others from dispersed random points.
inline std::vector<PosteriorDraws> run_chains(std::span<const double> y, const PriorSpec& prior, GibbsConfig cfg,
                                              std::size_t n_chains) {
    require(n_chains >= 1, "run_chains: need at least one chain");
    std::vector<GibbsConfig> configs;
    for (std::size_t c = 0; c < n_chains; ++c) {
        GibbsConfig ci = cfg;
        ci.chain = c;
        if (c > 0 && !cfg.initial_theta) {
            Rng init_rng = make_rng(cfg.seed, Stream::mcmc, 1000 + c);
            ci.initial_theta = dispersed_initial_theta(y, prior, init_rng);
            std::uniform_real_distribution<double> unit(0.5, 0.99);
            ci.initial_eta = std::pair{unit(init_rng), unit(init_rng)};
        }
        configs.push_back(std::move(ci));
    }
    std::vector<std::future<PosteriorDraws>> futures;
    for (const auto& ci : configs)
        futures.push_back(std::async(std::launch::async, [&y, &prior, ci] { return run_gibbs(y, prior, ci); }));
    std::vector<PosteriorDraws> out;
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

// ---------------------------------------------------------------------------
// Posterior summaries
// ---------------------------------------------------------------------------

struct ParamSummary {
    std::string name;
    double mean = 0.0;
    double std = 0.0;
    double q025 = 0.0;
    double q50 = 0.0;
    double q975 = 0.0;
    std::optional<double> rhat;
};

inline double quantile(std::vector<double> v, double q) {
    require(!v.empty(), "quantile of empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Potential scale reduction factor over equally long chains.
inline double gelman_rubin(const std::vector<Eigen::VectorXd>& chains) {
    require(chains.size() >= 2, "gelman_rubin: need at least two chains");
    const auto n = static_cast<double>(chains.front().size());
    const auto m = static_cast<double>(chains.size());
    require(n >= 2, "gelman_rubin: chains too short");
    double grand = 0.0;
    std::vector<double> means;
    double w = 0.0;
    for (const auto& c : chains) {
        require(static_cast<double>(c.size()) == n, "gelman_rubin: chains must have equal length");
        const double mu = c.mean();
        means.push_back(mu);
        grand += mu / m;
        w += (c.array() - mu).square().sum() / (n - 1.0) / m;
    }
    double b = 0.0;
    for (double mu : means) b += (mu - grand) * (mu - grand);
    b *= n / (m - 1.0);
    if (w <= 0.0) return b <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    const double var_plus = (n - 1.0) / n * w + b / n;
    return std::sqrt(var_plus / w);
}

/// Mean, std and quantiles per reported column, pooling all chains.
inline std::vector<ParamSummary> summarize(const std::vector<PosteriorDraws>& chains) {
    require(!chains.empty(), "summarize: no chains");
    std::vector<ParamSummary> out;
    for (const ParamColumn& col : parameter_columns(chains.front().model)) {
        std::vector<double> pooled;
        std::vector<Eigen::VectorXd> per_chain;
        for (const auto& c : chains) {
            Eigen::VectorXd v = c.column(col);
            pooled.insert(pooled.end(), v.data(), v.data() + v.size());
            per_chain.push_back(std::move(v));
        }
        ParamSummary s;
        s.name = col.name;
        const auto n = static_cast<double>(pooled.size());
        for (double v : pooled) s.mean += v / n;
        double ss = 0.0;
        for (double v : pooled) ss += (v - s.mean) * (v - s.mean);
        s.std = pooled.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        s.q025 = quantile(pooled, 0.025);
        s.q50 = quantile(pooled, 0.5);
        s.q975 = quantile(pooled, 0.975);
        if (chains.size() > 1) s.rhat = gelman_rubin(per_chain);
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<ParamSummary> summarize(const PosteriorDraws& draws) {
    return summarize(std::vector<PosteriorDraws>{draws});
}

/// Plug-in spec at the posterior mean (pooled over chains).
inline ModelSpec posterior_mean_spec(const std::vector<PosteriorDraws>& chains) {
    require(!chains.empty(), "posterior_mean_spec: no chains");
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(chains.front().theta_draws.cols());
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(2);
    double n = 0.0;
    for (const auto& c : chains) {
        theta += c.theta_draws.colwise().sum().transpose();
        eta += c.eta_draws.colwise().sum().transpose();
        n += static_cast<double>(c.retained());
    }
    theta /= n;
    eta /= n;
    std::vector<RegimeParams> regimes(2);
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t i = 0; i < kParamsPerRegime; ++i)
            param_ref(regimes[k], i) = theta(static_cast<Eigen::Index>(k * kParamsPerRegime + i));
        if (chains.front().model == ModelKind::ms_garch) tie_components(regimes[k]);
    }
    return ModelSpec(std::move(regimes), TransitionMatrix::two_state(eta(0), eta(1)));
}

inline ModelSpec posterior_mean_spec(const PosteriorDraws& draws) {
    return posterior_mean_spec(std::vector<PosteriorDraws>{draws});
}

}  // namespace mscgarch
