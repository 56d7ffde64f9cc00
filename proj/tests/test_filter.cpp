#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "mscgarch/filter.hpp"
#include "test_helpers.hpp"

using namespace mscgarch;
using Catch::Approx;

namespace {

// Independent oracle: per-regime variances by direct formula, then the
// likelihood as an explicit sum over all K^T regime paths.
std::vector<std::vector<double>> oracle_variances(const ModelSpec& spec, const std::vector<double>& y, double h0) {
    std::vector<std::vector<double>> H(y.size(), std::vector<double>(spec.size()));
    for (std::size_t j = 0; j < spec.size(); ++j) {
        const RegimeParams& p = spec.regime(j);
        double h = h0, prev = 0.0;
        for (std::size_t t = 0; t < y.size(); ++t) {
            const double w = std::tanh(p.gamma * std::abs(prev) / 2.0);
            h = w * (p.a0 + p.a1 * prev * prev + p.a2 * h) + (1.0 - w) * (p.b0 + p.b1 * prev * prev + p.b2 * h);
            H[t][j] = h;
            prev = y[t];
        }
    }
    return H;
}

double enumerate_likelihood(const ModelSpec& spec, const std::vector<double>& y, double h0) {
    const auto H = oracle_variances(spec, y, h0);
    const std::size_t k = spec.size();
    const std::size_t T = y.size();
    std::size_t n_paths = 1;
    for (std::size_t t = 0; t < T; ++t) n_paths *= k;
    const auto phi = [](double x, double v) { return std::exp(-x * x / (2.0 * v)) / std::sqrt(2.0 * std::numbers::pi * v); };
    double total = 0.0;
    for (std::size_t code = 0; code < n_paths; ++code) {
        std::size_t c = code;
        double prob = 1.0;
        std::size_t prev = 0;
        for (std::size_t t = 0; t < T; ++t) {
            const std::size_t z = c % k;
            c /= k;
            prob *= t == 0 ? spec.transition().stationary()(static_cast<Eigen::Index>(z)) : spec.transition()(prev, z);
            prob *= phi(y[t], H[t][z]);
            prev = z;
        }
        total += prob;
    }
    return total;
}

}  // namespace

TEST_CASE("filter_init", "[filter]") {
    const ModelSpec one({RegimeParams{1.0, 0.1, 0.1, 0.5, 0.1, 0.3, 1.0}}, TransitionMatrix::from_rows({{1.0}}));
    const FilterState s1 = filter_init(one, 2.0);
    CHECK(s1.alpha_pred.size() == 1);
    CHECK(s1.alpha_pred(0) == 1.0);
    CHECK(s1.H(0) == Approx(0.5 + 0.3 * 2.0));  // y_0 = 0 => H_1 = b0 + b2 H_0
    CHECK(s1.loglik == 0.0);

    const FilterState s2 = filter_init(reference_dgp(), 1.0);
    CHECK(s2.alpha_pred(0) == Approx(0.25).epsilon(1e-12));
    CHECK(s2.alpha_pred(1) == Approx(0.75).epsilon(1e-12));

    Eigen::Matrix3d p;
    p << 0.2, 0.5, 0.3, 0.5, 0.1, 0.4, 0.3, 0.4, 0.3;
    const RegimeParams r{1.0, 0.1, 0.1, 1.0, 0.1, 0.1, 1.0};
    const FilterState s3 = filter_init(ModelSpec({r, r, r}, TransitionMatrix(p)), 1.0);
    for (int j = 0; j < 3; ++j) CHECK(s3.alpha_pred(j) == Approx(1.0 / 3.0).epsilon(1e-12));

    CHECK_THROWS_AS(filter_init(one, 0.0), Error);
}

TEST_CASE("filter_step: single regime adds the Gaussian log density", "[filter]") {
    const ModelSpec one({RegimeParams{1.0, 0.1, 0.1, 0.5, 0.1, 0.3, 1.0}}, TransitionMatrix::from_rows({{1.0}}));
    const FilterState s0 = filter_init(one, 2.0);
    const FilterState s1 = filter_step(s0, one, 0.7);
    const double v = s0.H(0);
    CHECK(s1.loglik == Approx(-0.5 * std::log(2.0 * std::numbers::pi * v) - 0.49 / (2.0 * v)).epsilon(1e-14));
    CHECK(s1.alpha_pred(0) == 1.0);
    CHECK(s1.t == 2);
}

TEST_CASE("filter_step: equal densities propagate through P", "[filter]") {
    const RegimeParams r{1.0, 0.1, 0.1, 1.0, 0.1, 0.1, 1.0};
    const ModelSpec spec({r, r}, TransitionMatrix::two_state(0.85, 0.95));
    FilterState s = filter_init(spec, 1.0);
    s.alpha_pred << 0.5, 0.5;
    const FilterState next = filter_step(s, spec, 0.3);
    CHECK(next.alpha_filt(0) == Approx(0.5).epsilon(1e-14));
    CHECK(next.alpha_pred(0) == Approx(0.45).epsilon(1e-14));
    CHECK(next.alpha_pred(1) == Approx(0.55).epsilon(1e-14));
}

TEST_CASE("filter likelihood matches path enumeration", "[filter][oracle]") {
    Rng rng = make_rng(21, Stream::test);
    SECTION("T = 8, one spec") {
        const ModelSpec spec = testing::random_two_regime_spec(rng);
        const SimulationOutput sim = simulate(spec, 8, rng);
        const double h0 = 0.9;
        const double brute = enumerate_likelihood(spec, sim.y, h0);
        const FilterRun run = run_filter(spec, sim.y, h0);
        CHECK(std::exp(run.loglik) == Approx(brute).epsilon(1e-10));
    }
    SECTION("random specs, T <= 10") {
        for (int rep = 0; rep < 20; ++rep) {
            const ModelSpec spec = testing::random_two_regime_spec(rng);
            const std::size_t T = 2 + static_cast<std::size_t>(rep % 9);
            const SimulationOutput sim = simulate(spec, T, rng);
            const double brute = enumerate_likelihood(spec, sim.y, 1.0);
            const FilterRun run = run_filter(spec, sim.y, 1.0);
            CHECK(std::abs(std::exp(run.loglik) - brute) / brute < 1e-10);
        }
    }
}

TEST_CASE("forecast_one_step", "[filter]") {
    const RegimeParams r{1.0, 0.1, 0.1, 1.0, 0.1, 0.1, 1.0};
    const ModelSpec spec({r, r}, TransitionMatrix::two_state(0.85, 0.95));
    FilterState s = filter_init(spec, 1.0);
    s.alpha_pred << 0.45, 0.55;
    s.H << 2.0, 0.5;
    CHECK(forecast_one_step(s, spec).var_forecast == Approx(1.175).epsilon(1e-14));
    s.alpha_pred << 1.0, 0.0;
    CHECK(forecast_one_step(s, spec).var_forecast == 2.0);

    const ModelSpec one({r}, TransitionMatrix::from_rows({{1.0}}));
    const FilterState s1 = filter_init(one, 3.0);
    CHECK(forecast_one_step(s1, one).var_forecast == s1.H(0));
}

TEST_CASE("run_filter: constant variance equals iid normal likelihood", "[filter]") {
    const ModelSpec spec({RegimeParams{1.7, 0.0, 0.0, 1.7, 0.0, 0.0, 1.0}}, TransitionMatrix::from_rows({{1.0}}));
    const SimulationOutput sim = simulate(spec, 400, std::uint64_t{1});
    double expected = 0.0;
    for (double y : sim.y) expected += -0.5 * std::log(2.0 * std::numbers::pi * 1.7) - y * y / (2.0 * 1.7);
    CHECK(run_filter(spec, sim.y).loglik == Approx(expected).epsilon(1e-12));
}

TEST_CASE("run_filter on the reference process", "[filter]") {
    const ModelSpec dgp = reference_dgp();
    const SimulationOutput sim = simulate(dgp, 300, std::uint64_t{17});
    const FilterRun run = run_filter(dgp, sim.y);
    CHECK(std::isfinite(run.loglik));
    REQUIRE(run.forecasts.size() == 300);
    for (std::size_t t = 0; t < 300; ++t) {
        const FilterState& s = run.states[t];
        CHECK(std::abs(s.alpha_pred.sum() - 1.0) <= 1e-12);
        CHECK(std::abs(s.alpha_filt.sum() - 1.0) <= 1e-12);
        CHECK(s.alpha_pred.minCoeff() >= 0.0);
        CHECK(s.H.minCoeff() > 0.0);
        const ForecastRecord& f = run.forecasts[t];
        CHECK(std::isfinite(f.var_forecast));
        CHECK(std::abs(f.var_forecast - f.alpha_pred.dot(Eigen::Vector2d(f.per_regime[0].H, f.per_regime[1].H))) <= 1e-12);
    }
}

TEST_CASE("run_filter: regime relabeling leaves the likelihood unchanged", "[filter][property]") {
    Rng rng = make_rng(23, Stream::test);
    for (int rep = 0; rep < 10; ++rep) {
        const ModelSpec spec = testing::random_two_regime_spec(rng);
        const ModelSpec swapped({spec.regime(1), spec.regime(0)},
                                TransitionMatrix::two_state(spec.transition()(1, 1), spec.transition()(0, 0)));
        const SimulationOutput sim = simulate(spec, 200, rng);
        CHECK(run_filter(spec, sim.y).loglik == Approx(run_filter(swapped, sim.y).loglik).epsilon(1e-12));
    }
}

TEST_CASE("run_filter: forecasts never look ahead", "[filter][property]") {
    const ModelSpec dgp = reference_dgp();
    const SimulationOutput sim = simulate(dgp, 120, std::uint64_t{29});
    const double h0 = 1.0;
    const std::vector<double> base = variance_forecasts(run_filter(dgp, sim.y, h0));
    for (std::size_t cut : {0u, 1u, 40u, 119u}) {
        std::vector<double> y = sim.y;
        for (std::size_t s = cut; s < y.size(); ++s) y[s] = 25.0 - y[s];
        const std::vector<double> f = variance_forecasts(run_filter(dgp, y, h0));
        for (std::size_t t = 0; t <= cut; ++t) CHECK(f[t] == base[t]);
    }
}

TEST_CASE("run_filter: extreme scales stay finite", "[filter]") {
    const ModelSpec spec({RegimeParams{1e-8, 0.0, 0.1, 1e-8, 0.0, 0.1, 1.0}, RegimeParams{5.0, 0.2, 0.3, 2.0, 0.1, 0.3, 0.5}},
                         TransitionMatrix::two_state(0.9, 0.9));
    std::vector<double> y;
    for (int t = 0; t < 300; ++t) y.push_back(t % 17 == 0 ? 1e3 * (t % 2 ? 1 : -1) : 1e-5 * t);
    const FilterRun run = run_filter(spec, y, 1e-8);
    CHECK(std::isfinite(run.loglik));
    for (const auto& s : run.states) {
        CHECK(std::abs(s.alpha_pred.sum() - 1.0) <= 1e-12);
        CHECK(std::isfinite(s.alpha_filt(0)));
    }
}

TEST_CASE("run_filter errors", "[filter]") {
    const ModelSpec dgp = reference_dgp();
    CHECK_THROWS_AS(run_filter(dgp, std::vector<double>{}), Error);
    std::vector<double> y{0.1, std::nan(""), 0.3};
    try {
        run_filter(dgp, y, 1.0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("index 2") != std::string::npos);
    }
}
