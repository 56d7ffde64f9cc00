#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mscgarch/error.hpp"
#include "mscgarch/markov.hpp"
#include "mscgarch/rng.hpp"

namespace mscgarch {

/// One regime: two GARCH(1,1) components blended by a logistic-type weight.
///
///   h1 = a0 + a1 y_{t-1}^2 + a2 H_{t-1}
///   h2 = b0 + b1 y_{t-1}^2 + b2 H_{t-1}
///   H  = w h1 + (1 - w) h2,   w = (1 - e^{-gamma |y_{t-1}|}) / (1 + e^{-gamma |y_{t-1}|})
struct RegimeParams {
    double a0 = 1.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double b0 = 1.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double gamma = 1.0;

    /// Throws unless a0, b0, gamma > 0 and a1, a2, b1, b2 >= 0 (all finite).
    void validate() const {
        const double all[] = {a0, a1, a2, b0, b1, b2, gamma};
        for (double v : all) require(std::isfinite(v), "regime parameters must be finite");
        require(a0 > 0.0 && b0 > 0.0, "a0 and b0 must be strictly positive");
        require(a1 >= 0.0 && a2 >= 0.0 && b1 >= 0.0 && b2 >= 0.0,
                "a1, a2, b1, b2 must be nonnegative");
        require(gamma > 0.0, "gamma must be strictly positive");
    }

    friend bool operator==(const RegimeParams&, const RegimeParams&) = default;
};

/// Number of free parameters per regime, in sweep/storage order a0 a1 a2 b0 b1 b2 gamma.
inline constexpr std::size_t kParamsPerRegime = 7;

inline double& param_ref(RegimeParams& p, std::size_t i) {
    switch (i) {
        case 0: return p.a0;
        case 1: return p.a1;
        case 2: return p.a2;
        case 3: return p.b0;
        case 4: return p.b1;
        case 5: return p.b2;
        default: return p.gamma;
    }
}

inline double param_value(RegimeParams p, std::size_t i) { return param_ref(p, i); }

inline const char* param_stem(std::size_t i) {
    static constexpr const char* stems[] = {"a0", "a1", "a2", "b0", "b1", "b2", "gamma"};
    return stems[i < kParamsPerRegime ? i : kParamsPerRegime - 1];
}

/// Full model: K regimes plus the hidden chain. Innovations are standard normal.
class ModelSpec {
public:
    ModelSpec(std::vector<RegimeParams> regimes, TransitionMatrix transition)
        : regimes_(std::move(regimes)), transition_(std::move(transition)) {
        require(regimes_.size() == transition_.size(),
                "number of regimes must match the transition matrix dimension");
        for (const auto& r : regimes_) r.validate();
    }

    [[nodiscard]] std::size_t size() const noexcept { return regimes_.size(); }
    [[nodiscard]] const std::vector<RegimeParams>& regimes() const noexcept { return regimes_; }
    [[nodiscard]] const RegimeParams& regime(std::size_t j) const { return regimes_.at(j); }
    [[nodiscard]] const TransitionMatrix& transition() const noexcept { return transition_; }

private:
    std::vector<RegimeParams> regimes_;
    TransitionMatrix transition_;
};

/// Component weight in [0, 1); equals tanh(gamma |y| / 2).
inline double weight(double gamma, double y_prev) {
    require(std::isfinite(gamma) && std::isfinite(y_prev), "weight: non-finite input");
    require(gamma > 0.0, "weight: gamma must be positive");
    const double x = gamma * std::abs(y_prev);
    const double e = std::exp(-x);
    return -std::expm1(-x) / (1.0 + e);
}

struct VarianceStep {
    double H;
    double h1;
    double h2;
    double w;
};

namespace detail {

// Hot-loop version; callers guarantee validity.
inline VarianceStep variance_step(const RegimeParams& p, double y_prev, double H_prev) noexcept {
    const double y2 = y_prev * y_prev;
    const double x = p.gamma * std::abs(y_prev);
    const double w = -std::expm1(-x) / (1.0 + std::exp(-x));
    const double h1 = p.a0 + p.a1 * y2 + p.a2 * H_prev;
    const double h2 = p.b0 + p.b1 * y2 + p.b2 * H_prev;
    return {w * h1 + (1.0 - w) * h2, h1, h2, w};
}

}  // namespace detail

/// Advance one regime's conditional variance by one period.
inline VarianceStep regime_variance_step(const RegimeParams& params, double y_prev, double H_prev) {
    require(std::isfinite(H_prev) && H_prev > 0.0, "regime_variance_step: H_prev must be positive");
    require(std::isfinite(y_prev), "regime_variance_step: y_prev must be finite");
    return detail::variance_step(params, y_prev, H_prev);
}

/// Simulated path. z holds 0-based regime indices; H is T x K.
struct SimulationOutput {
    std::vector<double> y;
    std::vector<int> z;
    Eigen::MatrixXd H;
};

/// Draw an index from a discrete distribution by inverse CDF.
template <typename Probs>
int draw_categorical(Rng& rng, const Probs& probs, std::size_t k) {
    const double u = uniform01(rng);
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < k; ++j) {
        acc += probs[static_cast<Eigen::Index>(j)];
        if (u <= acc) return static_cast<int>(j);
    }
    return static_cast<int>(k - 1);
}

/// Simulate T observations. Every regime's variance is advanced each period
/// (path-independent recursion) starting from H_0 = H_init and y_0 = 0.
inline SimulationOutput simulate(const ModelSpec& spec, std::size_t T, Rng& rng, double H_init = 1.0) {
    require(T >= 1, "simulate: T must be at least 1");
    require(std::isfinite(H_init) && H_init > 0.0, "simulate: H_init must be positive");
    const std::size_t k = spec.size();
    const Eigen::MatrixXd& p = spec.transition().matrix();

    SimulationOutput out;
    out.y.resize(T);
    out.z.resize(T);
    out.H.resize(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(k));

    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> h(k, H_init);
    double y_prev = 0.0;
    int z_prev = -1;
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t j = 0; j < k; ++j) {
            h[j] = detail::variance_step(spec.regime(j), y_prev, h[j]).H;
            out.H(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = h[j];
        }
        const int z = z_prev < 0 ? draw_categorical(rng, spec.transition().stationary(), k)
                                 : draw_categorical(rng, p.row(z_prev), k);
        const double eps = normal(rng);
        out.y[t] = eps * std::sqrt(h[static_cast<std::size_t>(z)]);
        out.z[t] = z;
        y_prev = out.y[t];
        z_prev = z;
    }
    return out;
}

inline SimulationOutput simulate(const ModelSpec& spec, std::size_t T, std::uint64_t seed, double H_init = 1.0) {
    Rng rng = make_rng(seed, Stream::simulation);
    return simulate(spec, T, rng, H_init);
}

/// The nested MS-GARCH baseline: second component set equal to the first, so
/// the weight no longer matters and H_j = a0 + a1 y^2 + a2 H_{j, t-1}.
inline ModelSpec ms_garch_spec(const ModelSpec& spec) {
    std::vector<RegimeParams> regimes = spec.regimes();
    for (auto& r : regimes) {
        r.b0 = r.a0;
        r.b1 = r.a1;
        r.b2 = r.a2;
    }
    return ModelSpec(std::move(regimes), spec.transition());
}

/// Two-regime reference process: a volatile regime and a calm, persistent one.
inline ModelSpec reference_dgp() {
    return ModelSpec({RegimeParams{2.2, 0.75, 0.15, 0.7, 0.3, 0.2, 2.0},
                      RegimeParams{0.4, 0.15, 0.1, 0.2, 0.1, 0.2, 0.5}},
                     TransitionMatrix::from_rows({{0.85, 0.15}, {0.05, 0.95}}));
}

}  // namespace mscgarch
