#include "magsob/partition.hpp"

#include "magsob/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace magsob;

namespace {

partition::PartitionSpec theorem_spec(double h) {
    partition::PartitionSpec s;
    s.alpha = 7.0 / 16.0;
    s.rho = 5.0 / 16.0;
    s.h = h;
    return s;
}

} // namespace

TEST_CASE("cutoff is one at cell centers and zero elsewhere in the plateau") {
    partition::Partition part(theorem_spec(0.1));
    for (int cx : {-1, 0, 2})
        for (int cy : {-1, 1}) {
            Vec2 center = part.cell_center({cx, cy});
            auto vals = part.eval(center);
            double own = 0.0, others = 0.0;
            for (const auto& v : vals) {
                if (v.cell == std::array<int, 2>{cx, cy})
                    own = v.chi;
                else
                    others += std::abs(v.chi);
            }
            CHECK(own == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(others == 0.0);
        }
}

TEST_CASE("squares sum to one at 1000 random points") {
    partition::Partition part(theorem_spec(0.1));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        Vec2 x{unif(rng), unif(rng)};
        CHECK(std::abs(part.sum_of_squares(x) - 1.0) <= 1e-12);
    }
}

TEST_CASE("support structure is exact") {
    partition::Partition part(theorem_spec(0.07));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int i = 0; i < 500; ++i) {
        Vec2 x{unif(rng), unif(rng)};
        for (const auto& v : part.eval(x)) {
            Vec2 c = part.cell_center(v.cell);
            double d = std::max(std::abs(x[0] - c[0]), std::abs(x[1] - c[1]));
            if (d >= part.support_half_width()) CHECK(v.chi == 0.0);
        }
    }
}

TEST_CASE("gradient budget D h^{-2 alpha} is h-uniform") {
    const double alpha = 7.0 / 16.0;
    std::mt19937_64 rng(6);

    auto measure = [&rng, alpha](double h) {
        partition::Partition part(theorem_spec(h));
        std::uniform_real_distribution<double> unif(-2.0, 2.0);
        double worst = 0.0;
        for (int i = 0; i < 4000; ++i) {
            Vec2 x{unif(rng) * part.period(), unif(rng) * part.period()};
            worst = std::max(worst, part.sum_of_grad_squares(x));
        }
        return worst * std::pow(h, 2.0 * alpha);
    };

    double d_ref = measure(1.0);
    CHECK(d_ref > 0.0);
    for (double h : {1.0, 0.3, 0.1, 0.03}) {
        double d = measure(h);
        CHECK(d <= 1.05 * d_ref);
    }
    // 1e-12-tolerance partition identity survives the translation too
    partition::PartitionSpec moved = theorem_spec(0.1);
    moved.tau = {0.013, -0.027};
    partition::Partition part(moved);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        Vec2 x{unif(rng), unif(rng)};
        CHECK(std::abs(part.sum_of_squares(x) - 1.0) <= 1e-12);
    }
}

TEST_CASE("translation selection: uniform density stays within the scan budget") {
    auto domain = LatticeDomain::square(4.0, 161);
    ScalarField f(domain);
    for (auto& v : f.values) v = 1.0;
    double r = 1.0, delta = 0.02;
    auto fractions = partition::translation_scan(r, delta, f);
    // the thickened grid covers about 4 delta / r of the plane for every
    // shift; no translation helps a uniform density
    for (double frac : fractions) CHECK(frac == doctest::Approx(4.0 * delta / r).epsilon(0.25));
}

TEST_CASE("translation selection dodges a density supported in one cell") {
    auto domain = LatticeDomain::square(4.0, 161);
    ScalarField f(domain);
    // bump well inside the first grid cell, away from all shifted grids
    for (int iy = 0; iy < domain->ny; ++iy)
        for (int ix = 0; ix < domain->nx; ++ix) {
            Vec2 p = domain->point(ix, iy);
            double dx = p[0] - 0.5, dy = p[1] - 0.5;
            double r2 = dx * dx + dy * dy;
            f.at(ix, iy) = r2 < 0.09 ? std::exp(-r2 / 0.005) : 0.0;
        }
    auto fractions = partition::translation_scan(1.0, 0.05, f);
    CHECK(fractions[0] == 0.0);

    auto [tau, best] = partition::select_translation(1.0, 0.05, f);
    CHECK(best == 0.0);
    CHECK(tau[0] == 0.0);
}

TEST_CASE("selected fraction matches an exhaustive scan and meets the bound (50 densities)") {
    auto domain = LatticeDomain::square(4.0, 65);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    std::uniform_real_distribution<double> width(0.15, 0.6);
    const double r = 1.0, delta = 0.04;
    const double bound = 3.0 * delta / (r + 2.0 * delta);

    for (int trial = 0; trial < 50; ++trial) {
        ScalarField f(domain);
        int bumps = 2 + static_cast<int>(trial % 5);
        for (int b = 0; b < bumps; ++b) {
            double cx = unif(rng), cy = unif(rng), s = width(rng);
            for (int iy = 0; iy < domain->ny; ++iy)
                for (int ix = 0; ix < domain->nx; ++ix) {
                    Vec2 p = domain->point(ix, iy);
                    double dx = p[0] - cx, dy = p[1] - cy;
                    f.at(ix, iy) += std::exp(-(dx * dx + dy * dy) / (2 * s * s));
                }
        }
        auto fractions = partition::translation_scan(r, delta, f);
        auto [tau, frac] = partition::select_translation(r, delta, f);
        double brute = *std::min_element(fractions.begin(), fractions.end());
        CHECK(frac == doctest::Approx(brute).epsilon(1e-12));
        CHECK(frac <= bound);
    }
}

TEST_CASE("Lp recovery: state inside a single plateau has zero slack") {
    auto domain = LatticeDomain::square(1.0, 129);
    partition::PartitionSpec spec = theorem_spec(0.15);
    partition::Partition part(spec);
    // support strictly inside the plateau of cell (0, 0)
    double a = part.plateau_half_width();
    WaveFunction psi(domain);
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        auto [ix, iy] = domain->nodes[i];
        Vec2 x = domain->point(ix, iy);
        double d = std::max(std::abs(x[0]), std::abs(x[1]));
        psi.values[i] = d < 0.8 * a ? std::cos(x[0]) : 0.0;
    }
    auto slack = partition::lp_recovery_check(part, psi, 4.0);
    CHECK(std::abs(slack.lower) <= 1e-12);
    // upper slack reduces to 3 h^{alpha-rho} sum ||chi psi||_p^p >= 0
    CHECK(slack.upper >= -1e-12);
}

TEST_CASE("Lp recovery at p = 2 has zero lower slack") {
    auto domain = LatticeDomain::square(1.0, 65);
    partition::Partition part(theorem_spec(0.1));
    auto psi = solver::random_state(domain, 8, 2.0);
    auto slack = partition::lp_recovery_check(part, psi, 2.0);
    CHECK(std::abs(slack.lower) <= 1e-12);
}

TEST_CASE("Lp recovery slacks are nonnegative for random states at the theorem exponents") {
    auto domain = LatticeDomain::square(1.0, 65);
    for (double h : {0.2, 0.1, 0.05}) {
        partition::Partition part(theorem_spec(h));
        for (int trial = 0; trial < 5; ++trial) {
            auto psi = solver::random_state(domain, 100 + trial, 4.0);
            auto slack = partition::lp_recovery_check(part, psi, 4.0);
            CHECK(slack.lower >= -1e-12);
            CHECK(slack.upper >= -1e-12);
        }
    }
}

TEST_CASE("IMS decomposition: trivial partition reproduces the form exactly") {
    // one cutoff equal to 1 across the whole domain: huge h^rho plateau
    auto domain = LatticeDomain::square(1.0, 33);
    partition::PartitionSpec spec;
    spec.alpha = 1.0;
    spec.rho = 1.0;
    spec.h = 25.0; // plateau half-width 25 covers the domain from cell (0,0)
    partition::Partition part(spec);
    auto links = lattice::zero_field_links(domain, 0.5);
    auto psi = solver::random_state(domain, 17, 2.0);
    auto parts = partition::ims_decompose(part, links, psi);
    double q = lattice::quadratic_form(links, psi);
    CHECK(parts.gradient_penalty == 0.0);
    CHECK(parts.localized_sum == doctest::Approx(q).epsilon(1e-12));
}

TEST_CASE("IMS identity holds within 1% at 128^2 and refines at order >= 1.8") {
    const double h = 0.1;
    auto spec = theorem_spec(h);

    auto defect_at = [&spec, h](int n) {
        auto domain = LatticeDomain::square(1.0, n);
        auto links = lattice::build_links(domain, fields::FieldSpec::power_well(1), h);
        WaveFunction psi(domain);
        for (std::size_t i = 0; i < psi.values.size(); ++i) {
            auto [ix, iy] = domain->nodes[i];
            Vec2 x = domain->point(ix, iy);
            // smooth Dirichlet state with both scales present
            psi.values[i] = std::cos(0.5 * M_PI * x[0]) * std::cos(0.5 * M_PI * x[1]) *
                            std::exp(Complex{0, 1} * (x[0] + 0.3 * x[1]));
        }
        partition::Partition part(spec);
        auto parts = partition::ims_decompose(part, links, psi);
        double q = lattice::quadratic_form(links, psi);
        return std::abs(parts.localized_sum - parts.gradient_penalty - q) / q;
    };

    double d128 = defect_at(129);
    CHECK(d128 <= 0.01);

    double d33 = defect_at(33), d65 = defect_at(65);
    double order = std::log2(d33 / d65);
    CHECK(order >= 1.8);

    // penalty bounded by the measured gradient budget
    auto domain = LatticeDomain::square(1.0, 129);
    auto links = lattice::zero_field_links(domain, h);
    auto psi = solver::random_state(domain, 3, 2.0);
    partition::Partition part(spec);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double d_measured = 0.0;
    for (int i = 0; i < 4000; ++i) {
        Vec2 x{unif(rng), unif(rng)};
        d_measured = std::max(d_measured, part.sum_of_grad_squares(x) *
                                              std::pow(h, 2.0 * spec.alpha));
    }
    auto parts = partition::ims_decompose(part, links, psi);
    double budget = d_measured * std::pow(h, 2.0 - 2.0 * spec.alpha) * lattice::norm2_sq(psi);
    CHECK(parts.gradient_penalty <= budget * 1.0001);
}

TEST_CASE("partition preconditions") {
    partition::PartitionSpec bad;
    bad.alpha = 0.3;
    bad.rho = 0.4; // alpha < rho
    bad.h = 0.1;
    CHECK_THROWS_AS(partition::Partition{bad}, std::invalid_argument);

    auto domain = LatticeDomain::square(1.0, 17);
    ScalarField f(domain);
    CHECK_THROWS_AS(partition::select_translation(1.0, 0.1, f), std::invalid_argument);
    f.values[40] = -1.0;
    CHECK_THROWS_AS(partition::select_translation(1.0, 0.1, f), std::invalid_argument);
}
