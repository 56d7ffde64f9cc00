#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "ks.hpp"
#include "mscgarch/bayes.hpp"
#include "test_helpers.hpp"

using namespace mscgarch;
using Catch::Approx;

TEST_CASE("parameter columns", "[bayes]") {
    const auto cg = parameter_columns(ModelKind::ms_cgarch);
    REQUIRE(cg.size() == 16);
    CHECK(cg[0].name == "a01");
    CHECK(cg[5].name == "b21");
    CHECK(cg[6].name == "a02");
    CHECK(cg[12].name == "gamma1");
    CHECK(cg[15].name == "eta22");
    const auto g = parameter_columns(ModelKind::ms_garch);
    REQUIRE(g.size() == 8);
    CHECK(g[3].name == "a02");
    CHECK(g[6].name == "eta11");
}

TEST_CASE("backward sampling probabilities", "[bayes]") {
    Eigen::VectorXd filt(2);
    filt << 0.5, 0.5;
    Eigen::MatrixXd p(2, 2);
    p << 0.85, 0.15, 0.05, 0.95;
    const Eigen::VectorXd b = backward_probabilities(filt, p, 0);
    CHECK(b(0) == Approx(0.85 / 0.90).epsilon(1e-14));
    CHECK(b(0) == Approx(0.9444).margin(1e-4));
    CHECK(b(1) == Approx(0.0556).margin(1e-4));
}

TEST_CASE("sample_states", "[bayes]") {
    Rng rng = make_rng(51, Stream::test);
    const RegimeParams r{1.0, 0.1, 0.1, 1.0, 0.1, 0.1, 1.0};
    const ModelSpec one({r}, TransitionMatrix::from_rows({{1.0}}));
    const std::vector<double> y(50, 0.3);
    for (int z : sample_states(one, y, 1.0, rng)) CHECK(z == 0);

    SECTION("identical regimes and symmetric chain give balanced labels") {
        const ModelSpec sym({r, r}, TransitionMatrix::two_state(0.8, 0.8));
        const SimulationOutput sim = simulate(sym, 100, rng);
        double ones = 0.0, total = 0.0;
        for (int rep = 0; rep < 200; ++rep) {
            for (int z : sample_states(sym, sim.y, 1.0, rng)) {
                ones += z;
                total += 1.0;
            }
        }
        CHECK(ones / total == Approx(0.5).margin(0.03));
    }

    SECTION("well separated regimes are recovered") {
        const ModelSpec dgp = reference_dgp();
        const SimulationOutput sim = simulate(dgp, 1000, std::uint64_t{52});
        const std::vector<int> z = sample_states(dgp, sim.y, 1.0, rng);
        std::size_t agree = 0;
        for (std::size_t t = 0; t < z.size(); ++t) agree += z[t] == sim.z[t];
        CHECK(static_cast<double>(agree) / 1000.0 > 0.75);
    }
}

TEST_CASE("transition draws", "[bayes]") {
    Rng rng = make_rng(53, Stream::test);
    const PriorSpec prior = PriorSpec::defaults();

    std::vector<int> z(13, 0);
    z[3] = 1;
    z[8] = 1;
    const Eigen::MatrixXd n = transition_counts(z, 2);
    CHECK(n(0, 0) == 8.0);
    CHECK(n(0, 1) == 2.0);
    CHECK(n(1, 0) == 2.0);

    SECTION("posterior mean") {
        std::vector<int> path(13, 0);
        path[11] = 1;
        path[12] = 1;
        path.push_back(0);
        path.push_back(1);
        const Eigen::MatrixXd c = transition_counts(path, 2);
        REQUIRE(c(0, 0) == 10.0);
        REQUIRE(c(0, 1) == 2.0);
        double s = 0.0;
        const int draws = 20000;
        for (int i = 0; i < draws; ++i) s += sample_transition(path, prior, rng)(0);
        CHECK(s / draws == Approx(11.0 / 14.0).margin(0.005));
    }

    SECTION("unvisited state falls back to the prior") {
        const std::vector<int> all_zero(40, 0);
        std::vector<double> d;
        for (int i = 0; i < 20000; ++i) d.push_back(sample_transition(all_zero, prior, rng)(1));
        double m = 0.0, v = 0.0;
        for (double x : d) m += x / static_cast<double>(d.size());
        for (double x : d) v += (x - m) * (x - m) / static_cast<double>(d.size() - 1);
        CHECK(m == Approx(0.5).margin(0.01));
        CHECK(v == Approx(1.0 / 12.0).margin(0.003));
    }

    SECTION("draws follow the conjugate Beta law") {
        const std::vector<int> path = simulate(reference_dgp(), 200, std::uint64_t{54}).z;
        const Eigen::MatrixXd c = transition_counts(path, 2);
        std::vector<double> x1, x2;
        for (int i = 0; i < 10000; ++i) {
            const Eigen::Vector2d e = sample_transition(path, prior, rng);
            x1.push_back(e(0));
            x2.push_back(e(1));
        }
        const double a1 = 1.0 + c(0, 0), b1 = 1.0 + c(0, 1), a2 = 1.0 + c(1, 1), b2 = 1.0 + c(1, 0);
        const double d1 = testing::ks_statistic(x1, [&](double x) { return boost::math::ibeta(a1, b1, x); });
        const double d2 = testing::ks_statistic(x2, [&](double x) { return boost::math::ibeta(a2, b2, x); });
        CHECK(testing::ks_pvalue(d1, x1.size()) > 0.001);
        CHECK(testing::ks_pvalue(d2, x2.size()) > 0.001);
    }

    SECTION("posterior concentrates at the generating value") {
        const std::vector<int> path = simulate(reference_dgp(), 20000, std::uint64_t{55}).z;
        double m = 0.0;
        for (int i = 0; i < 500; ++i) m += sample_transition(path, prior, rng)(0) / 500.0;
        CHECK(m == Approx(0.85).margin(0.02));
    }
}

TEST_CASE("ks p-value series", "[bayes][oracle]") {
    // Known quantiles of the Kolmogorov distribution
    CHECK(testing::ks_pvalue(1.3581 / std::sqrt(1e8), 100000000) == Approx(0.05).margin(1e-3));
    CHECK(testing::ks_pvalue(1.6276 / std::sqrt(1e8), 100000000) == Approx(0.01).margin(1e-3));
}

TEST_CASE("grid cdf and inversion", "[bayes]") {
    const std::vector<double> nodes = uniform_grid({0.0, 1.0}, 11);
    const std::vector<double> flat(11, 0.0);
    const GridCdf g = grid_cdf(nodes, flat);
    CHECK(g.cdf.front() == 0.0);
    CHECK(invert_grid_cdf(g, 0.3 * g.cdf.back()) == Approx(0.3).epsilon(1e-12));
    for (std::size_t i = 1; i < g.cdf.size(); ++i) CHECK(g.cdf[i] >= g.cdf[i - 1]);
    for (std::size_t i = 1; i < g.cdf.size(); ++i) CHECK(invert_grid_cdf(g, g.cdf[i]) == Approx(nodes[i]).epsilon(1e-12));

    std::vector<double> ramp;
    for (double x : nodes) ramp.push_back(std::log(1e-300 + x));
    const GridCdf r = grid_cdf(nodes, ramp);
    for (std::size_t i = 1; i < r.cdf.size(); ++i) CHECK(r.cdf[i] >= r.cdf[i - 1]);

    const std::vector<double> dead(11, -INFINITY);
    try {
        grid_cdf(nodes, dead);
        FAIL("expected numeric error");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::numeric);
    }
}

TEST_CASE("griddy inversion concentrates as the grid refines", "[bayes][property]") {
    Rng rng = make_rng(56, Stream::test);
    const double centre = 0.4137, width = 0.01;
    const auto inside_fraction = [&](std::size_t G) {
        const std::vector<double> nodes = uniform_grid({0.0, 1.0}, G);
        std::vector<double> ld;
        for (double x : nodes) ld.push_back(-0.5 * (x - centre) * (x - centre) / (width * width));
        const GridCdf g = grid_cdf(nodes, ld);
        int hit = 0;
        for (int i = 0; i < 20000; ++i) {
            const double x = invert_grid_cdf(g, uniform01(rng) * g.cdf.back());
            hit += std::abs(x - centre) <= 3.0 * width;
        }
        return hit / 20000.0;
    };
    const double coarse = inside_fraction(33);
    const double fine = inside_fraction(1025);
    CHECK(fine > 0.99);
    CHECK(fine >= coarse);
}

TEST_CASE("griddy draws stay inside the prior interval", "[bayes][property]") {
    Rng rng = make_rng(57, Stream::test);
    const ModelSpec dgp = reference_dgp();
    const SimulationOutput sim = simulate(dgp, 200, std::uint64_t{58});
    const double h0 = default_h_init(sim.y);
    const PriorSpec prior = PriorSpec::defaults();
    for (int rep = 0; rep < 20; ++rep) {
        for (std::size_t i = 0; i < kParamsPerRegime; ++i) {
            const Interval iv = prior.theta_bounds[0][i];
            const GriddyDraw d = griddy_gibbs_update(dgp.regime(0), 0, i, sim.y, sim.z, h0, iv, 33, rng);
            CHECK(d.value >= iv.lo);
            CHECK(d.value <= iv.hi);
        }
    }
}

TEST_CASE("complete-data likelihood agrees with the filter recursion", "[bayes][oracle]") {
    Rng rng = make_rng(59, Stream::test);
    for (int rep = 0; rep < 10; ++rep) {
        const ModelSpec spec = testing::random_two_regime_spec(rng);
        const SimulationOutput sim = simulate(spec, 150, rng);
        const double h0 = 1.3;
        FilterState s = filter_init(spec, h0);
        double expected = 0.0;
        for (std::size_t t = 0; t < sim.y.size(); ++t) {
            expected += log_normal_density(sim.y[t], s.H(sim.z[t]));
            s = filter_step(s, spec, sim.y[t]);
        }
        CHECK(complete_data_loglik(spec, sim.y, sim.z, h0) == Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("conditional posterior of a01 recovers the generating value", "[bayes][slow]") {
    const ModelSpec dgp = reference_dgp();
    const SimulationOutput sim = simulate(dgp, 2000, std::uint64_t{60});
    const double h0 = default_h_init(sim.y);
    Rng rng = make_rng(61, Stream::test);
    std::vector<double> draws;
    for (int i = 0; i < 400; ++i)
        draws.push_back(griddy_gibbs_update(dgp.regime(0), 0, 0, sim.y, sim.z, h0, {0.001, 10.0}, 129, rng).value);
    CHECK(quantile(draws, 0.5) == Approx(2.2).margin(0.4));
    CHECK(quantile(draws, 0.05) < 2.2);
    CHECK(quantile(draws, 0.95) > 2.2);
}

TEST_CASE("run_gibbs basics", "[bayes]") {
    const SimulationOutput sim = simulate(reference_dgp(), 150, std::uint64_t{62});
    const PriorSpec prior = PriorSpec::defaults();
    GibbsConfig cfg;
    cfg.n_iter = 40;
    cfg.n_burnin = 10;
    cfg.seed = 5;

    const PosteriorDraws a = run_gibbs(sim.y, prior, cfg);
    const PosteriorDraws b = run_gibbs(sim.y, prior, cfg);
    CHECK(a.theta_draws == b.theta_draws);
    CHECK(a.eta_draws == b.eta_draws);
    REQUIRE(a.retained() == 30);

    for (Eigen::Index r = 0; r < a.theta_draws.rows(); ++r) {
        CHECK(a.theta_draws(r, 0) >= a.theta_draws(r, 7));  // a0 ordering after relabeling
        for (std::size_t k = 0; k < 2; ++k)
            for (std::size_t i = 0; i < kParamsPerRegime; ++i) {
                const double v = a.theta_draws(r, static_cast<Eigen::Index>(k * kParamsPerRegime + i));
                CHECK(v >= prior.theta_bounds[k][i].lo);
                CHECK(v <= prior.theta_bounds[k][i].hi);
            }
        CHECK(a.eta_draws(r, 0) > 0.0);
        CHECK(a.eta_draws(r, 0) < 1.0);
    }

    cfg.seed = 6;
    CHECK(run_gibbs(sim.y, prior, cfg).theta_draws != a.theta_draws);

    cfg.model = ModelKind::ms_garch;
    const PosteriorDraws g = run_gibbs(sim.y, prior, cfg);
    for (Eigen::Index r = 0; r < g.theta_draws.rows(); ++r) {
        for (Eigen::Index k = 0; k < 2; ++k) {
            CHECK(g.theta_draws(r, k * 7 + 3) == g.theta_draws(r, k * 7 + 0));
            CHECK(g.theta_draws(r, k * 7 + 4) == g.theta_draws(r, k * 7 + 1));
            CHECK(g.theta_draws(r, k * 7 + 5) == g.theta_draws(r, k * 7 + 2));
            CHECK(g.theta_draws(r, k * 7 + 6) == kTiedGamma);
        }
    }
}

TEST_CASE("run_gibbs rejects bad input", "[bayes]") {
    const PriorSpec prior = PriorSpec::defaults();
    GibbsConfig cfg;
    cfg.n_iter = 20;
    cfg.n_burnin = 5;
    CHECK_THROWS_AS(run_gibbs(std::vector<double>(10, 0.1), prior, cfg), Error);
    std::vector<double> y = simulate(reference_dgp(), 60, std::uint64_t{1}).y;
    y[7] = INFINITY;
    CHECK_THROWS_AS(run_gibbs(y, prior, cfg), Error);
    cfg.n_burnin = 20;
    CHECK_THROWS_AS(run_gibbs(simulate(reference_dgp(), 60, std::uint64_t{1}).y, prior, cfg), Error);
    PriorSpec bad = prior;
    bad.theta_bounds[0][1] = {0.5, 0.2};
    cfg.n_burnin = 5;
    CHECK_THROWS_AS(run_gibbs(simulate(reference_dgp(), 60, std::uint64_t{1}).y, bad, cfg), Error);
}

TEST_CASE("identical regimes give exchangeable transition posteriors", "[bayes][slow]") {
    PriorSpec prior = PriorSpec::defaults();
    for (auto& regime : prior.theta_bounds) {
        regime[0] = {0.999, 1.001};
        regime[1] = {0.0, 1e-6};
        regime[2] = {0.0, 1e-6};
        regime[3] = {0.999, 1.001};
        regime[4] = {0.0, 1e-6};
        regime[5] = {0.0, 1e-6};
        regime[6] = {0.999, 1.001};
    }
    Rng rng = make_rng(63, Stream::test);
    std::normal_distribution<double> n01;
    std::vector<double> y(100);
    for (double& v : y) v = n01(rng);
    GibbsConfig cfg;
    cfg.n_iter = 1200;
    cfg.n_burnin = 200;
    cfg.seed = 9;
    const PosteriorDraws d = run_gibbs(y, prior, cfg);
    const double m1 = d.eta_draws.col(0).mean();
    const double m2 = d.eta_draws.col(1).mean();
    CHECK(std::abs(m1 - m2) < 0.1);
}

TEST_CASE("gelman-rubin", "[bayes]") {
    Rng rng = make_rng(64, Stream::test);
    std::normal_distribution<double> n01;
    std::vector<Eigen::VectorXd> same, shifted;
    for (int c = 0; c < 4; ++c) {
        Eigen::VectorXd v(2000), w(2000);
        for (Eigen::Index i = 0; i < 2000; ++i) {
            v(i) = n01(rng);
            w(i) = v(i) + 3.0 * c;
        }
        same.push_back(v);
        shifted.push_back(w);
    }
    CHECK(gelman_rubin(same) == Approx(1.0).margin(0.01));
    CHECK(gelman_rubin(shifted) > 2.0);
    CHECK_THROWS_AS(gelman_rubin({same[0]}), Error);
}

TEST_CASE("two chains agree on the reference process", "[bayes][slow]") {
    const SimulationOutput sim = simulate(reference_dgp(), 300, std::uint64_t{65});
    GibbsConfig cfg;
    cfg.n_iter = 500;
    cfg.n_burnin = 100;
    cfg.seed = 11;
    const std::vector<ParamSummary> s = summarize(run_chains(sim.y, PriorSpec::defaults(), cfg, 2));
    REQUIRE(s.size() == 16);
    for (const ParamSummary& p : s) {
        REQUIRE(p.rhat);
        INFO(p.name << " rhat " << *p.rhat);
        CHECK(*p.rhat < 1.2);
        CHECK(p.q025 <= p.q50);
        CHECK(p.q50 <= p.q975);
    }
}
