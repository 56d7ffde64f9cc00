#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstddef>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "mscgarch/error.hpp"
#include "mscgarch/markov.hpp"
#include "mscgarch/model.hpp"

namespace mscgarch {

inline constexpr double kDefaultDelta = 0.01;

/// Second-moment stability analysis of an MS-CGARCH spec.
///
/// E(y_t^2) obeys the componentwise recursion A_t <= Omega_dot + C A_{t-1},
/// where A_t stacks E[H_{t,m} | Z_t = k] block by block (k outer, m inner).
/// When rho(C) < 1 the limit of E(y_t^2) is bounded by Pi' (I - C)^{-1} Omega_dot.
struct StabilityReport {
    Eigen::VectorXd pi;
    double delta = kDefaultDelta;
    Eigen::VectorXd M;          // per-regime truncation thresholds
    Eigen::VectorXd Omega;      // a0m + |a1m - b1m| M_m^2
    Eigen::VectorXd u;          // b1m + (1 + delta) |a1m - b1m|
    Eigen::MatrixXd backward;   // backward(j, k) = p(Z_{t-1} = j | Z_t = k)
    Eigen::MatrixXd C;          // K^2 x K^2
    Eigen::VectorXd Omega_dot;  // Omega stacked K times
    Eigen::VectorXd Pi;         // block k = pi_k e_k
    double rho = 0.0;
    std::string rho_method = "power_iteration";
    bool stable = false;
    std::optional<double> bound;
    std::optional<double> condition_number;  // set when cond(I - C) > 1e8
    std::string threshold_convention = "per_regime";
};

/// Smallest M with weight(gamma, M) >= 1 - delta, i.e. ln((2 - delta) / delta) / gamma.
inline double truncation_threshold(double gamma, double delta) {
    require(std::isfinite(gamma) && gamma > 0.0, "truncation_threshold: gamma must be positive");
    require(std::isfinite(delta) && delta > 0.0 && delta < 1.0, "truncation_threshold: delta must lie in (0,1)");
    return std::log((2.0 - delta) / delta) / gamma;
}

/// Assemble pi, M, Omega, u, the backward transition probabilities and the
/// block matrix C. Block (row k, column j) is p(j | k) (u e_j' + diag(a2)).
/// rho and bound are left unset.
inline StabilityReport build_stability_system(const ModelSpec& spec, double delta = kDefaultDelta) {
    require(std::isfinite(delta) && delta > 0.0 && delta < 1.0, "build_stability_system: delta must lie in (0,1)");
    const auto k = static_cast<Eigen::Index>(spec.size());
    const Eigen::MatrixXd& p = spec.transition().matrix();

    StabilityReport r;
    r.delta = delta;
    r.pi = spec.transition().stationary();
    r.M.resize(k);
    r.Omega.resize(k);
    r.u.resize(k);
    Eigen::VectorXd a2(k);
    for (Eigen::Index m = 0; m < k; ++m) {
        const RegimeParams& q = spec.regime(static_cast<std::size_t>(m));
        const double gap = std::abs(q.a1 - q.b1);
        r.M(m) = truncation_threshold(q.gamma, delta);
        r.Omega(m) = q.a0 + gap * r.M(m) * r.M(m);
        r.u(m) = q.b1 + (1.0 + delta) * gap;
        a2(m) = q.a2;
    }

    r.backward.resize(k, k);
    for (Eigen::Index j = 0; j < k; ++j)
        for (Eigen::Index kk = 0; kk < k; ++kk) r.backward(j, kk) = r.pi(j) / r.pi(kk) * p(j, kk);

    const Eigen::Index n = k * k;
    r.C = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index kk = 0; kk < k; ++kk) {
        for (Eigen::Index j = 0; j < k; ++j) {
            const double b = r.backward(j, kk);
            for (Eigen::Index m = 0; m < k; ++m) {
                r.C(kk * k + m, j * k + j) += b * r.u(m);
                r.C(kk * k + m, j * k + m) += b * a2(m);
            }
        }
    }

    r.Omega_dot.resize(n);
    r.Pi = Eigen::VectorXd::Zero(n);
    for (Eigen::Index kk = 0; kk < k; ++kk) {
        r.Omega_dot.segment(kk * k, k) = r.Omega;
        r.Pi(kk * k + kk) = r.pi(kk);
    }
    return r;
}

struct SpectralRadius {
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Perron root of a nonnegative matrix by power iteration on A + I.
///
/// The shift keeps iterates strictly positive and removes periodicity.
/// Convergence is certified when the Collatz-Wielandt bounds
/// min_i (Bx)_i / x_i <= rho(B) <= max_i (Bx)_i / x_i close to within tol,
/// or when the upper bound stops moving for 20 consecutive sweeps (reducible
/// matrices, where the lower bound never closes).
inline SpectralRadius spectral_radius(const Eigen::MatrixXd& a, double tol = 1e-10, std::size_t max_iter = 20000) {
    require(a.rows() == a.cols() && a.rows() > 0, "spectral_radius: matrix must be square and non-empty");
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double v = a.data()[i];
        require(std::isfinite(v) && v >= 0.0, "spectral_radius: entries must be finite and nonnegative");
    }
    const Eigen::Index n = a.rows();
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
    double prev_upper = std::numeric_limits<double>::infinity();
    std::size_t still = 0;
    SpectralRadius out;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        Eigen::VectorXd y = a * x + x;
        double upper = 0.0;
        double lower = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double ratio = y(i) / x(i);
            upper = std::max(upper, ratio);
            lower = std::min(lower, ratio);
        }
        out.value = upper - 1.0;
        out.iterations = it;
        if (upper - lower <= tol * std::max(1.0, upper)) {
            out.value = 0.5 * (upper + lower) - 1.0;
            out.converged = true;
            break;
        }
        still = std::abs(upper - prev_upper) <= 1e-3 * tol * upper ? still + 1 : 0;
        if (still >= 20) {
            out.converged = true;
            break;
        }
        prev_upper = upper;
        x = y / y.maxCoeff();
        // Components belonging to a dominated invariant block decay
        // geometrically; keep them representable.
        for (Eigen::Index i = 0; i < n; ++i) x(i) = std::max(x(i), 1e-250);
    }
    out.value = std::max(out.value, 0.0);
    return out;
}

/// Dense fallback: largest eigenvalue modulus from a full eigendecomposition.
inline double spectral_radius_dense(const Eigen::MatrixXd& a) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    if (es.info() != Eigen::Success) throw Error(ErrorCategory::numeric, "dense eigensolver failed");
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace detail {

struct BoundSolve {
    double value;
    double condition_number;
};

inline BoundSolve solve_bound(const StabilityReport& r) {
    const Eigen::Index n = r.C.rows();
    const Eigen::MatrixXd i_minus_c = Eigen::MatrixXd::Identity(n, n) - r.C;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(i_minus_c);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-15)) {
        throw Error(ErrorCategory::numeric, "second_moment_bound: I - C is numerically singular although rho(C) < 1");
    }
    const Eigen::VectorXd x = lu.solve(r.Omega_dot);
    const double bound = r.Pi.dot(x);
    if (!std::isfinite(bound) || !(bound > 0.0)) {
        throw Error(ErrorCategory::numeric, "second_moment_bound: non-positive or non-finite bound");
    }
    return {bound, 1.0 / rcond};
}

}  // namespace detail

/// Pi' (I - C)^{-1} Omega_dot when rho(C) < 1, otherwise empty.
inline std::optional<double> second_moment_bound(const StabilityReport& report) {
    if (!(report.rho < 1.0)) return std::nullopt;
    return detail::solve_bound(report).value;
}

/// build_stability_system + spectral radius + bound.
inline StabilityReport analyze_stability(const ModelSpec& spec, double delta = kDefaultDelta) {
    StabilityReport r = build_stability_system(spec, delta);
    const SpectralRadius sr = spectral_radius(r.C);
    if (sr.converged) {
        r.rho = sr.value;
    } else {
        r.rho = spectral_radius_dense(r.C);
        r.rho_method = "dense_eigensolver";
    }
    r.stable = r.rho < 1.0;
    if (r.stable) {
        const auto solved = detail::solve_bound(r);
        r.bound = solved.value;
        if (solved.condition_number > 1e8) r.condition_number = solved.condition_number;
    }
    return r;
}

}  // namespace mscgarch
