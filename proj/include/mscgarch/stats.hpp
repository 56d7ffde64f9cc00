#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mscgarch/error.hpp"

namespace mscgarch {

/// Percentage log returns with optional date labels (label of P_t for r_t).
struct ReturnsSeries {
    std::vector<std::string> timestamps;  // empty when the input had none
    std::vector<double> r;
};

/// r_t = 100 ln(P_t / P_{t-1}).
inline std::vector<double> prices_to_returns(std::span<const double> prices) {
    require(prices.size() >= 2, "prices_to_returns: need at least two prices");
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!(std::isfinite(prices[i]) && prices[i] > 0.0)) {
            throw Error(ErrorCategory::invalid_argument,
                        "prices_to_returns: non-positive or non-finite price at index " + std::to_string(i + 1));
        }
    }
    std::vector<double> r(prices.size() - 1);
    for (std::size_t t = 1; t < prices.size(); ++t) r[t - 1] = 100.0 * std::log(prices[t] / prices[t - 1]);
    return r;
}

inline ReturnsSeries prices_to_returns(std::span<const double> prices, std::span<const std::string> labels) {
    ReturnsSeries out;
    out.r = prices_to_returns(prices);
    if (!labels.empty()) {
        require(labels.size() == prices.size(), "prices_to_returns: label count differs from price count");
        out.timestamps.assign(labels.begin() + 1, labels.end());
    }
    return out;
}

inline std::vector<double> demean(std::span<const double> y) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    std::vector<double> out(y.begin(), y.end());
    for (double& v : out) v -= mean;
    return out;
}

/// Skewness and kurtosis are standardized central moments (kurtosis is not
/// excess: 3 for a Gaussian). Both are empty for a constant series.
struct DescriptiveStats {
    double mean = 0.0;
    double std = 0.0;  // n - 1 denominator
    std::optional<double> skewness;
    std::optional<double> kurtosis;
    double max = 0.0;
    double min = 0.0;
};

inline DescriptiveStats descriptive_stats(std::span<const double> x) {
    require(x.size() >= 4, "descriptive_stats: need at least four observations");
    const auto n = static_cast<double>(x.size());
    DescriptiveStats s;
    for (double v : x) s.mean += v;
    s.mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    s.std = std::sqrt(m2 / (n - 1.0));
    m2 /= n;
    m3 /= n;
    m4 /= n;
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    s.min = *lo;
    s.max = *hi;
    if (s.max > s.min && m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2);
    } else {
        s.std = 0.0;
    }
    return s;
}

}  // namespace mscgarch
