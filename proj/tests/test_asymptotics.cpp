#include "magsob/asymptotics.hpp"

#include <doctest.h>

#include <cmath>

using namespace magsob;
using fields::FieldSpec;

TEST_CASE("power-law fit recovers an exact law to machine precision") {
    std::vector<double> hs{0.1, 0.05, 0.025};
    std::vector<double> ls;
    for (double h : hs) ls.push_back(3.0 * h * h);
    auto fit = asymptotics::fit_power_law(hs, ls);
    CHECK(fit.exponent == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.prefactor == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    for (double r : fit.residuals) CHECK(std::abs(r) <= 1e-12);
}

TEST_CASE("power-law fit sees the subleading correction as an exponent shift") {
    std::vector<double> hs{0.1, 0.07, 0.05, 0.035, 0.025};
    std::vector<double> ls;
    for (double h : hs) ls.push_back(h * h * (1.0 + std::sqrt(h)));
    auto fit = asymptotics::fit_power_law(hs, ls);
    CHECK(fit.exponent > 2.0);
    CHECK(fit.exponent < 2.1);
}

TEST_CASE("power-law fit preconditions") {
    std::vector<double> two{0.1, 0.05}, ls{1.0, 2.0};
    CHECK_THROWS_AS(asymptotics::fit_power_law(two, ls), std::invalid_argument);
    std::vector<double> hs{0.1, 0.05, 0.025}, bad{1.0, -2.0, 1.0};
    CHECK_THROWS_AS(asymptotics::fit_power_law(hs, bad), std::invalid_argument);
}

TEST_CASE("localization profile endpoints") {
    auto domain = LatticeDomain::square(1.0, 65);
    auto links = lattice::zero_field_links(domain, 1.0);
    solver::SolveOptions opts;
    opts.initial_guess = solver::InitialGuess::random_seeded;
    auto res = solver::linear_ground_state(links, opts);

    std::vector<double> radii{0.0, 0.5, 10.0};
    auto prof = asymptotics::localization_profile(res, {0.0, 0.0}, radii, 2.0);
    CHECK(prof.tail_lp[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(prof.tail_inf[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(prof.tail_lp[2] == 0.0);
    CHECK(prof.tail_inf[2] == 0.0);
    // monotone in the radius
    CHECK(prof.tail_lp[1] <= prof.tail_lp[0]);
    CHECK(prof.tail_lp[2] <= prof.tail_lp[1]);
}

TEST_CASE("decay rate fit recovers a synthetic rate and flags flat tails") {
    std::vector<asymptotics::LocalizationProfile> profiles;
    for (double h : {0.1, 0.05, 0.025, 0.0125}) {
        asymptotics::LocalizationProfile prof;
        prof.h = h;
        prof.radii = {0.0, 0.5};
        prof.tail_inf = {1.0, std::exp(-std::pow(h, -0.4))};
        prof.tail_lp = prof.tail_inf;
        profiles.push_back(prof);
    }
    double rate = asymptotics::decay_rate_fit(profiles, 1);
    CHECK(rate == doctest::Approx(0.4).epsilon(0.02));

    for (auto& prof : profiles) prof.tail_inf[1] = 0.37; // constant tails
    double flat = asymptotics::decay_rate_fit(profiles, 1);
    CHECK(std::abs(flat) < 0.05);
}

TEST_CASE("trial state value dominates the true minimum and tightens as h drops") {
    auto spec = FieldSpec::radial_well(1.0, {0.0, 0.0});
    auto model = solver::model_constant(0, 4.0, 8.0, 97);
    REQUIRE(model.finest.converged);

    const double p = 4.0;
    double previous_ratio = 1e9;
    for (double h : {0.08, 0.04, 0.02}) {
        int n = 161;
        auto domain = LatticeDomain::square(1.0, n);
        auto links = lattice::build_links(domain, spec, h);
        solver::SolveOptions opts;
        opts.well_center = {0.0, 0.0};
        opts.well_field = 1.0;
        opts.num_starts = 1;
        auto res = solver::minimize_rayleigh(links, p, opts);
        REQUIRE(res.converged);

        double bound = asymptotics::trial_upper_bound(domain, spec, p, h, model.finest.psi);
        CHECK(bound >= res.lambda * (1.0 - 1e-8));

        double prediction = model.lambda * std::pow(h, 2.0 - 2.0 / p);
        double ratio = bound / prediction;
        CHECK(ratio < previous_ratio * (1.0 + 1e-9));
        previous_ratio = ratio;
        CHECK(bound <= (1.0 + 5.0 * std::sqrt(h)) * prediction);
    }
}

TEST_CASE("small constant-field sweep fits the linear law") {
    asymptotics::SweepConfig config;
    config.p = 2.0;
    config.hs = {0.08, 0.05, 0.03};
    config.nodes_per_length = 10.0;
    config.max_nodes = 201;
    config.model_lambda = 1.0; // Landau oracle for k = 0, p = 2
    auto spec = FieldSpec::radial_well(1.0, {0.0, 0.0});
    auto report = asymptotics::sweep_constant_field({-1.0, 1.0, -1.0, 1.0}, spec, config);

    REQUIRE(report.points.size() == 3);
    for (const auto& pt : report.points) CHECK(pt.converged);
    CHECK(std::abs(report.asymptotic_fit.exponent - 1.0) <= 0.05);
    CHECK(report.prefactor_ratio >= 0.9);
    CHECK(report.prefactor_ratio <= 1.1);
}

TEST_CASE("sweep preconditions") {
    asymptotics::SweepConfig config;
    config.p = 2.0;
    config.hs = {0.1, 0.05, 0.025};
    CHECK_THROWS_AS(asymptotics::sweep_vanishing_field({-1.5, 1.5, -1.5, 1.5},
                                                       FieldSpec::radial_vanishing(1.0, 1.0),
                                                       config),
                    std::invalid_argument);
    config.p = 4.0;
    CHECK_THROWS_AS(asymptotics::sweep_vanishing_field({-0.9, 0.9, -0.9, 0.9},
                                                       FieldSpec::radial_vanishing(1.0, 1.0),
                                                       config),
                    std::invalid_argument);
    CHECK_THROWS_AS(asymptotics::sweep_constant_field({-1.0, 1.0, -1.0, 1.0},
                                                      FieldSpec::radial_vanishing(1.0, 1.0),
                                                      config),
                    std::invalid_argument);
    config.hs = {0.1, 0.2, 0.05};
    CHECK_THROWS_AS(asymptotics::sweep_constant_field({-1.0, 1.0, -1.0, 1.0},
                                                      FieldSpec::radial_well(1.0, {0, 0}),
                                                      config),
                    std::invalid_argument);
}
