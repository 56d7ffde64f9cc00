#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mscgarch/error.hpp"

namespace mscgarch {

/// Stationary distribution of a row-stochastic matrix: pi' P = pi', sum(pi) = 1.
///
/// Rejects chains whose stationary law is not unique (rank(P' - I) < K - 1)
/// and chains with transient states (some pi_j == 0), since both break the
/// irreducibility the model relies on.
inline Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& p) {
    const Eigen::Index k = p.rows();
    require(k >= 1 && p.cols() == k, "transition matrix must be square and non-empty");

    Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(k, k);
    Eigen::FullPivLU<Eigen::MatrixXd> rank_check(a);
    rank_check.setThreshold(1e-10);
    if (rank_check.rank() != k - 1) {
        throw Error(ErrorCategory::invalid_argument,
                    "transition matrix has no unique stationary distribution (reducible chain)");
    }

    // Replace one balance equation by the normalisation constraint.
    a.row(k - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    rhs(k - 1) = 1.0;
    Eigen::VectorXd pi = a.partialPivLu().solve(rhs);

    for (Eigen::Index j = 0; j < k; ++j) {
        if (!(pi(j) > 1e-14)) {
            throw Error(ErrorCategory::invalid_argument,
                        "transition matrix has a transient state " + std::to_string(j + 1) +
                            " (chain is not irreducible)");
        }
    }
    return pi / pi.sum();
}

/// K x K row-stochastic transition matrix, p(i, j) = P(Z_t = j | Z_{t-1} = i).
class TransitionMatrix {
public:
    explicit TransitionMatrix(Eigen::MatrixXd p) : p_(std::move(p)) {
        require(p_.rows() >= 1 && p_.rows() == p_.cols(), "transition matrix must be square, K >= 1");
        for (Eigen::Index i = 0; i < p_.rows(); ++i) {
            double row_sum = 0.0;
            for (Eigen::Index j = 0; j < p_.cols(); ++j) {
                const double v = p_(i, j);
                require(std::isfinite(v) && v >= 0.0 && v <= 1.0,
                        "transition probabilities must lie in [0,1]");
                row_sum += v;
            }
            require(std::abs(row_sum - 1.0) <= 1e-12,
                    "transition matrix row " + std::to_string(i + 1) + " does not sum to 1");
        }
        pi_ = stationary_distribution(p_);
    }

    static TransitionMatrix from_rows(const std::vector<std::vector<double>>& rows) {
        const auto k = static_cast<Eigen::Index>(rows.size());
        require(k >= 1, "transition matrix needs at least one row");
        Eigen::MatrixXd p(k, k);
        for (Eigen::Index i = 0; i < k; ++i) {
            require(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) == k,
                    "transition matrix must be square");
            for (Eigen::Index j = 0; j < k; ++j) p(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        return TransitionMatrix(std::move(p));
    }

    /// Two-state chain from its diagonal (eta_11, eta_22).
    static TransitionMatrix two_state(double stay1, double stay2) {
        Eigen::MatrixXd p(2, 2);
        p << stay1, 1.0 - stay1, 1.0 - stay2, stay2;
        return TransitionMatrix(std::move(p));
    }

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(p_.rows()); }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const {
        return p_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return p_; }
    [[nodiscard]] const Eigen::VectorXd& stationary() const noexcept { return pi_; }

private:
    Eigen::MatrixXd p_;
    Eigen::VectorXd pi_;
};

}  // namespace mscgarch
