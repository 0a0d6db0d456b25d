#include "magsob/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace magsob::asymptotics {

namespace {

struct LineFit {
    double slope = 0.0, intercept = 0.0, r_squared = 1.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    if (sxx == 0) throw std::invalid_argument("fit: degenerate abscissae");
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += e * e;
    }
    f.r_squared = (syy > 0) ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
    return f;
}

// bilinear sample of a wavefunction at an arbitrary point (0 outside)
Complex sample_bilinear(const WaveFunction& psi, Vec2 p) {
    const auto& dom = *psi.domain;
    double fx = (p[0] - dom.x0) / dom.dx;
    double fy = (p[1] - dom.y0) / dom.dy;
    int ix = static_cast<int>(std::floor(fx));
    int iy = static_cast<int>(std::floor(fy));
    if (ix < -1 || iy < -1 || ix > dom.nx - 1 || iy > dom.ny - 1) return {0, 0};
    double tx = fx - ix, ty = fy - iy;
    auto value = [&dom, &psi](int jx, int jy) -> Complex {
        std::int32_t k = dom.interior_index(jx, jy);
        return k >= 0 ? psi.values[k] : Complex{0, 0};
    };
    return (1 - tx) * (1 - ty) * value(ix, iy) + tx * (1 - ty) * value(ix + 1, iy) +
           (1 - tx) * ty * value(ix, iy + 1) + tx * ty * value(ix + 1, iy + 1);
}

double smoothstep(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }

// cutoff equal to 1 on |x| <= r1, 0 on |x| >= r2
double radial_cutoff(double r, double r1, double r2) {
    if (r <= r1) return 1.0;
    if (r >= r2) return 0.0;
    return smoothstep((r2 - r) / (r2 - r1));
}

// 2-jet of the potential at x0 by Richardson central differences
struct PotentialJet {
    Vec2 a{};              // A(x0)
    double da[2][2]{};     // da[i][j] = d_j A_i
    double d2a[2][2][2]{}; // d2a[i][j][k] = d_j d_k A_i
};

PotentialJet potential_jet(const fields::FieldSpec& spec, Vec2 x0) {
    const double eps = 1e-3;
    auto a_at = [&](double sx, double sy) {
        return fields::eval_potential(spec, {x0[0] + sx, x0[1] + sy});
    };
    PotentialJet jet;
    jet.a = a_at(0, 0);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            // five-point first derivative
            auto comp = [&](double s) {
                Vec2 v = (j == 0) ? a_at(s, 0) : a_at(0, s);
                return v[i];
            };
            jet.da[i][j] = (-comp(2 * eps) + 8 * comp(eps) - 8 * comp(-eps) + comp(-2 * eps)) /
                           (12 * eps);
            // pure second derivative
            jet.d2a[i][j][j] =
                (-comp(2 * eps) + 16 * comp(eps) - 30 * comp(0) + 16 * comp(-eps) - comp(-2 * eps)) /
                (12 * eps * eps);
        }
        // mixed second derivative
        auto comp2 = [&](double sx, double sy) { return a_at(sx, sy)[i]; };
        jet.d2a[i][0][1] = jet.d2a[i][1][0] =
            (comp2(eps, eps) - comp2(eps, -eps) - comp2(-eps, eps) + comp2(-eps, -eps)) /
            (4 * eps * eps);
    }
    return jet;
}

} // namespace

SweepFit fit_power_law(std::span<const double> hs, std::span<const double> lambdas) {
    if (hs.size() != lambdas.size())
        throw std::invalid_argument("fit_power_law: length mismatch");
    if (hs.size() < 3)
        throw std::invalid_argument("fit_power_law: need at least 3 samples");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (!(hs[i] > 0) || !(lambdas[i] > 0))
            throw std::invalid_argument("fit_power_law: samples must be positive");
        lx.push_back(std::log(hs[i]));
        ly.push_back(std::log(lambdas[i]));
    }
    LineFit f = least_squares(lx, ly);
    SweepFit out;
    out.hs.assign(hs.begin(), hs.end());
    out.lambdas.assign(lambdas.begin(), lambdas.end());
    out.exponent = f.slope;
    out.prefactor = std::exp(f.intercept);
    out.r_squared = f.r_squared;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        double model = out.prefactor * std::pow(hs[i], out.exponent);
        out.residuals.push_back((lambdas[i] - model) / lambdas[i]);
    }
    return out;
}

LocalizationProfile localization_profile(const solver::RayleighResult& result, Vec2 x0,
                                         std::span<const double> radii, double p) {
    if (!result.converged)
        throw std::invalid_argument("localization_profile: requires a converged result");
    const WaveFunction& psi = result.psi;
    const auto& dom = *psi.domain;
    const double w = dom.node_weight();

    LocalizationProfile prof;
    prof.radii.assign(radii.begin(), radii.end());
    prof.center = x0;
    prof.p = p;

    double total_p = 0.0, total_inf = 0.0;
    std::vector<double> r2(psi.values.size());
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        auto [ix, iy] = dom.nodes[i];
        Vec2 x = dom.point(ix, iy);
        double ddx = x[0] - x0[0], ddy = x[1] - x0[1];
        r2[i] = ddx * ddx + ddy * ddy;
        double m = std::abs(psi.values[i]);
        total_p += std::pow(m, p);
        total_inf = std::max(total_inf, m);
    }
    total_p *= w;

    for (double radius : radii) {
        double tail_p = 0.0, tail_inf = 0.0;
        double rr = radius * radius;
        for (std::size_t i = 0; i < psi.values.size(); ++i) {
            if (r2[i] <= rr) continue;
            double m = std::abs(psi.values[i]);
            tail_p += std::pow(m, p);
            tail_inf = std::max(tail_inf, m);
        }
        tail_p *= w;
        prof.tail_lp.push_back(total_p > 0 ? std::pow(tail_p / total_p, 1.0 / p) : 0.0);
        prof.tail_inf.push_back(total_inf > 0 ? tail_inf / total_inf : 0.0);
    }
    return prof;
}

double decay_rate_fit(const std::vector<LocalizationProfile>& profiles, std::size_t radius_index) {
    std::vector<double> x, y;
    for (const auto& prof : profiles) {
        if (radius_index >= prof.tail_inf.size())
            throw std::invalid_argument("decay_rate_fit: radius index out of range");
        double tail = prof.tail_inf[radius_index];
        if (tail < 1e-14) continue;              // underflowed sample
        if (tail >= 1.0) tail = 1.0 - 1e-15;     // non-localizing sample
        double neg_log = -std::log(tail);
        if (neg_log <= 0) continue;
        x.push_back(std::log(1.0 / prof.h));
        y.push_back(std::log(neg_log));
    }
    if (x.size() < 3)
        throw std::invalid_argument("decay_rate_fit: need at least 3 usable profiles");
    return least_squares(x, y).slope;
}

double trial_upper_bound(const DomainPtr& domain, const fields::FieldSpec& spec, double p,
                         double h, const WaveFunction& model_minimizer) {
    const Vec2 x0 = fields::well_center(spec);
    const double b0 = fields::well_minimum(spec);
    const auto& dom = *domain;

    // cutoff radii from the distance to the boundary
    double dist = std::min(std::min(x0[0] - dom.x0, dom.x1 - x0[0]),
                           std::min(x0[1] - dom.y0, dom.y1 - x0[1]));
    if (dist <= 0) throw std::invalid_argument("trial_upper_bound: well on or outside the boundary");
    const double r2cut = 0.9 * dist;
    const double r1cut = 0.5 * r2cut;
    if (r2cut <= 4.0 * std::sqrt(h) * dom.dx)
        throw std::invalid_argument("trial_upper_bound: cutoff support leaves the domain");

    // quadratic Taylor gauge phi: grad(phi) = b0 A0(x - x0) - jet2(A), which
    // is curl-free because x0 is a critical point of B
    PotentialJet jet = potential_jet(spec, x0);
    auto phi_at = [&](Vec2 x) {
        double d1 = x[0] - x0[0], d2 = x[1] - x0[1];
        // target minus jet, split by polynomial order, integrated radially:
        // phi(d) = F0 . d + (1/2) d . F1 d + (1/3) quadratic part
        double f0[2] = {-jet.a[0], -jet.a[1]};
        double f1[2][2] = {{-jet.da[0][0], -jet.da[0][1]},
                           {b0 - jet.da[1][0], -jet.da[1][1]}};
        double d[2] = {d1, d2};
        double phi = f0[0] * d[0] + f0[1] * d[1];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) phi += 0.5 * f1[i][j] * d[j] * d[i];
        double quad = 0.0;
        for (int i = 0; i < 2; ++i) {
            double qi = 0.0;
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) qi += 0.5 * jet.d2a[i][j][k] * d[j] * d[k];
            quad += -qi * d[i];
        }
        return phi + quad / 3.0;
    };

    const double sqrt_h = std::sqrt(h);
    WaveFunction trial(domain);
    for (std::size_t i = 0; i < trial.values.size(); ++i) {
        auto [ix, iy] = dom.nodes[i];
        Vec2 x = dom.point(ix, iy);
        double d1 = x[0] - x0[0], d2 = x[1] - x0[1];
        double r = std::hypot(d1, d2);
        double cut = radial_cutoff(r, r1cut, r2cut);
        if (cut == 0.0) continue;
        Complex v = sample_bilinear(model_minimizer, {d1 / sqrt_h, d2 / sqrt_h});
        double arg = phi_at(x) / h;
        trial.values[i] = std::pow(h, -1.0 / p) * cut * v * Complex{std::cos(arg), std::sin(arg)};
    }

    auto links = lattice::build_links(domain, spec, h);
    double q = lattice::quadratic_form(links, trial);
    double n = lattice::lp_norm(trial, p);
    if (n == 0) throw std::invalid_argument("trial_upper_bound: trial state vanished");
    return q / (n * n);
}

namespace {

SweepReport run_sweep(const std::array<double, 4>& extent, const fields::FieldSpec& spec,
                      const SweepConfig& config, double target_exponent, double scale_power,
                      double field_scale, Vec2 x0, double strength_factor) {
    if (config.hs.size() < 3)
        throw std::invalid_argument("sweep: need at least 3 h samples");
    for (std::size_t i = 1; i < config.hs.size(); ++i)
        if (!(config.hs[i] < config.hs[i - 1]))
            throw std::invalid_argument("sweep: h samples must be decreasing");

    SweepReport report;
    report.target_exponent = target_exponent;
    report.model_prefactor = config.model_lambda * strength_factor;

    // reference radius: 2 eps with eps a quarter of the well-boundary distance
    double dist = std::min(std::min(x0[0] - extent[0], extent[1] - x0[0]),
                           std::min(x0[1] - extent[2], extent[3] - x0[1]));
    report.reference_radius = 0.5 * dist;
    std::vector<double> radii = config.radii;
    if (radii.empty())
        radii = {0.25 * dist, 0.5 * dist, 0.75 * dist};

    WaveFunction previous;
    solver::RayleighResult model_min; // minimizer for the trial bound, reused

    for (double h : config.hs) {
        // spacing tied to the localization scale
        double scale = std::pow(h / field_scale, scale_power);
        double dx_target = scale / config.nodes_per_length;
        int n = static_cast<int>(std::lround((extent[1] - extent[0]) / dx_target)) + 1;
        n = std::clamp(n, config.min_nodes, config.max_nodes) | 1;
        auto domain = LatticeDomain::rectangle(extent[0], extent[1], extent[2], extent[3], n, n);
        auto links = lattice::build_links(domain, spec, h);

        solver::SolveOptions opts = config.solve;
        opts.well_center = x0;
        opts.well_field = field_scale;
        WaveFunction warm;
        if (config.warm_start && previous.domain) {
            warm = WaveFunction(domain);
            for (std::size_t i = 0; i < warm.values.size(); ++i) {
                auto [ix, iy] = domain->nodes[i];
                warm.values[i] = sample_bilinear(previous, domain->point(ix, iy));
            }
            double nn = lattice::lp_norm(warm, config.p);
            if (nn > 0) {
                for (Complex& v : warm.values) v /= nn;
                opts.warm_start = &warm;
                opts.num_starts = 1;
            }
        }

        solver::RayleighResult r = solver::minimize_rayleigh(links, config.p, opts);

        SweepPoint pt;
        pt.h = h;
        pt.lambda = r.lambda;
        pt.converged = r.converged;
        pt.el_residual = r.el_residual;
        pt.grid_n = n;
        if (!report.points.empty() && report.points.back().converged && r.converged) {
            const SweepPoint& prev_pt = report.points.back();
            pt.exponent_running =
                std::log(r.lambda / prev_pt.lambda) / std::log(h / prev_pt.h);
        }
        if (r.converged) {
            LocalizationProfile prof = localization_profile(r, x0, radii, config.p);
            prof.h = h;
            std::size_t ref = 1; // radii[1] = 2 eps
            pt.tail_lp = prof.tail_lp[ref];
            pt.tail_inf = prof.tail_inf[ref];
            report.profiles.push_back(std::move(prof));
        }
        if (config.with_trial_bound) {
            if (!model_min.psi.domain) {
                solver::ModelConstantReport mc =
                    solver::model_constant(0, config.p, 8.0, 97, config.solve);
                model_min = std::move(mc.finest);
            }
            pt.trial_bound = trial_upper_bound(domain, spec, config.p, h, model_min.psi);
        }
        if (r.converged) previous = std::move(r.psi);
        report.points.push_back(std::move(pt));
    }

    // fits over converged points only; unconverged samples are tainted
    std::vector<double> hs, ls;
    for (const SweepPoint& pt : report.points)
        if (pt.converged) {
            hs.push_back(pt.h);
            ls.push_back(pt.lambda);
        }
    if (hs.size() >= 3) {
        report.fit = fit_power_law(hs, ls);
        std::vector<double> h3(hs.end() - 3, hs.end()), l3(ls.end() - 3, ls.end());
        report.asymptotic_fit = fit_power_law(h3, l3);
        if (report.profiles.size() >= 3) {
            try {
                report.decay_rate = decay_rate_fit(report.profiles, 1);
            } catch (const std::invalid_argument&) {
                report.decay_rate = 0.0; // too few usable tails
            }
        }
        if (report.model_prefactor > 0)
            report.prefactor_ratio = report.asymptotic_fit.prefactor / report.model_prefactor;
        report.pass = report.model_prefactor <= 0 ||
                      (std::abs(report.asymptotic_fit.exponent - target_exponent) <= 0.07 &&
                       report.prefactor_ratio >= 0.85 && report.prefactor_ratio <= 1.15);
    }
    return report;
}

} // namespace

SweepReport sweep_constant_field(const std::array<double, 4>& extent,
                                 const fields::FieldSpec& spec, const SweepConfig& config) {
    if (spec.family != fields::Family::constant_field &&
        spec.family != fields::Family::radial_well)
        throw std::invalid_argument("sweep_constant_field: field must have an interior minimum");
    if (config.p < 2) throw std::invalid_argument("sweep_constant_field: p must be >= 2");
    const double b0 = fields::well_minimum(spec);
    Vec2 x0 = fields::well_center(spec);
    if (spec.family == fields::Family::constant_field)
        x0 = {0.5 * (extent[0] + extent[1]), 0.5 * (extent[2] + extent[3])};
    const double target = 2.0 - 2.0 / config.p;
    // localization scale sqrt(h / b0); prefactor lambda^[0](p) b0^{2/p}
    return run_sweep(extent, spec, config, target, 0.5, b0, x0,
                     std::pow(b0, 2.0 / config.p));
}

SweepReport sweep_vanishing_field(const std::array<double, 4>& extent,
                                  const fields::FieldSpec& spec, const SweepConfig& config) {
    if (spec.family != fields::Family::radial_vanishing)
        throw std::invalid_argument("sweep_vanishing_field: field must vanish on a curve");
    if (!(config.p > 2))
        throw std::invalid_argument("sweep_vanishing_field: requires p > 2");
    // the zero circle must lie strictly inside the domain
    if (spec.r0 >= std::min(std::min(-extent[0], extent[1]), std::min(-extent[2], extent[3])))
        throw std::invalid_argument("sweep_vanishing_field: zero circle not inside the domain");
    const double target = 2.0 - 4.0 / (3.0 * config.p);
    // localization scale (h / gamma0)^{1/3}; prefactor lambda^[1](p) gamma0^{4/(3p)}
    return run_sweep(extent, spec, config, target, 1.0 / 3.0, spec.gamma0, {0.0, 0.0},
                     std::pow(spec.gamma0, 4.0 / (3.0 * config.p)));
}

} // namespace magsob::asymptotics
