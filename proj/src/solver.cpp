#include "magsob/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace magsob::solver {

using lattice::LinkPhases;

namespace {

double real_dot(const WaveFunction& a, const WaveFunction& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        acc += a.values[i].real() * b.values[i].real() +
               a.values[i].imag() * b.values[i].imag();
    }
    return acc * a.domain->node_weight();
}

// x^q for x >= 0 with fast paths for the exponents in the hot loops
inline double pow_abs(double x, double q) {
    if (q == 1.0) return x;
    if (q == 0.5) return std::sqrt(x);
    if (q == 0.0) return 1.0;
    if (q == 2.0) return x * x;
    if (x == 0.0) return 0.0;
    return std::pow(x, q);
}

void axpy(WaveFunction& y, double alpha, const WaveFunction& x) {
    for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] += alpha * x.values[i];
}

void scale(WaveFunction& x, double s) {
    for (Complex& v : x.values) v *= s;
}

// Upper bound for the operator norm of H (row-sum bound).
double operator_norm_bound(const LinkPhases& links) {
    const auto& dom = *links.domain;
    const double h2 = links.h * links.h;
    return 4.0 * h2 * (1.0 / (dom.dx * dom.dx) + 1.0 / (dom.dy * dom.dy));
}

// Euler-Lagrange residual ||H psi - lambda |psi|^{p-2} psi||_2 / ||H psi||_2
// for an L^p-normalized state with lambda = Q(psi). Optionally stores the
// residual vector (half the projected form gradient).
double el_residual(const WaveFunction& hpsi, const WaveFunction& psi, double lambda, double p,
                   WaveFunction* residual_vec = nullptr) {
    double num = 0.0, den = 0.0;
    const double half_q = 0.5 * (p - 2.0); // factor = |psi|^{p-2} = (|psi|^2)^{half_q}
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        double factor = pow_abs(std::norm(psi.values[i]), half_q);
        Complex r = hpsi.values[i] - lambda * factor * psi.values[i];
        if (residual_vec) residual_vec->values[i] = r;
        num += std::norm(r);
        den += std::norm(hpsi.values[i]);
    }
    return den > 0 ? std::sqrt(num / den) : 0.0;
}

// Conjugate gradient for (H - sigma) x = b; returns achieved relative
// residual. H - sigma must be positive definite.
struct CgOutcome {
    int iterations = 0;
    double rel_residual = 0.0;
    bool indefinite = false;
};

CgOutcome conjugate_gradient(const LinkPhases& links, double sigma, const WaveFunction& b,
                             WaveFunction& x, double rel_tol, int max_iter) {
    WaveFunction r = b, q(b.domain);
    // x = 0 start
    std::fill(x.values.begin(), x.values.end(), Complex{0, 0});
    WaveFunction d = r;
    double rr = real_dot(r, r);
    const double b_norm = std::sqrt(real_dot(b, b));
    CgOutcome out;
    if (b_norm == 0) return out;
    for (int it = 0; it < max_iter; ++it) {
        lattice::apply_operator(links, d, q);
        if (sigma != 0.0) axpy(q, -sigma, d);
        double dq = real_dot(d, q);
        if (dq <= 0) {
            out.indefinite = true;
            out.iterations = it;
            out.rel_residual = std::sqrt(rr) / b_norm;
            return out;
        }
        double alpha = rr / dq;
        axpy(x, alpha, d);
        axpy(r, -alpha, q);
        double rr_new = real_dot(r, r);
        out.iterations = it + 1;
        out.rel_residual = std::sqrt(rr_new) / b_norm;
        if (out.rel_residual <= rel_tol) return out;
        double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < d.values.size(); ++i)
            d.values[i] = r.values[i] + beta * d.values[i];
    }
    return out;
}

WaveFunction initial_state(const LinkPhases& links, double p, const SolveOptions& opts,
                           InitialGuess policy, std::uint64_t seed);

// Single descent run from a given L^p-normalized initial state.
RayleighResult descend(const LinkPhases& links, double p, const SolveOptions& opts,
                       WaveFunction psi) {
    const double w = psi.domain->node_weight();
    (void)w;
    RayleighResult res;
    double nrm = lattice::lp_norm(psi, p);
    if (nrm == 0) throw std::invalid_argument("minimize_rayleigh: zero initial state");
    scale(psi, 1.0 / nrm);

    WaveFunction hpsi = lattice::apply_operator(links, psi);
    double lambda = real_dot(hpsi, psi);
    double step = 1.0 / operator_norm_bound(links);

    WaveFunction grad(psi.domain), trial(psi.domain), htrial(psi.domain);
    WaveFunction prev_psi = psi, prev_grad(psi.domain);
    bool have_prev = false;

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        // Form gradient 2 H psi projected to the sphere tangent: the radial
        // part lambda |psi|^{p-2} psi is undone by the renormalization, so
        // stepping against it would stall at any eigenvector. What remains
        // is exactly the Euler-Lagrange residual direction.
        double residual = el_residual(hpsi, psi, lambda, p, &grad);
        if (residual <= opts.el_tolerance) {
            res.converged = true;
            break;
        }
        for (std::size_t i = 0; i < grad.values.size(); ++i) grad.values[i] *= 2.0;

        if (have_prev) {
            // Barzilai-Borwein trial step from the last accepted move
            double ss = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < psi.values.size(); ++i) {
                Complex s = psi.values[i] - prev_psi.values[i];
                Complex y = grad.values[i] - prev_grad.values[i];
                ss += std::norm(s);
                sy += s.real() * y.real() + s.imag() * y.imag();
            }
            if (sy > 0 && ss > 0) {
                double bb = ss / sy;
                step = std::clamp(bb, 1e-6 / operator_norm_bound(links),
                                  1e6 / operator_norm_bound(links));
            }
        }
        prev_psi = psi;
        prev_grad = grad;

        bool accepted = false;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            for (std::size_t i = 0; i < trial.values.size(); ++i)
                trial.values[i] = psi.values[i] - step * grad.values[i];
            double tn = lattice::lp_norm(trial, p);
            if (tn > 0) {
                scale(trial, 1.0 / tn);
                lattice::apply_operator(links, trial, htrial);
                double trial_lambda = real_dot(htrial, trial);
                // monotone acceptance with a small margin
                if (trial_lambda <= lambda - 1e-14 * std::abs(lambda)) {
                    psi.values.swap(trial.values);
                    hpsi.values.swap(htrial.values);
                    lambda = trial_lambda;
                    accepted = true;
                    break;
                }
            }
            step *= opts.backtrack_shrink;
        }
        if (!accepted) {
            // quotient cannot decrease along -grad at representable steps;
            // the final residual check below decides convergence
            break;
        }
        have_prev = true;
        step *= opts.backtrack_grow;
    }
    res.lambda = lambda;
    res.el_residual = el_residual(hpsi, psi, lambda, p);
    res.psi = std::move(psi);
    res.iterations = it;
    res.converged = res.el_residual <= opts.el_tolerance;
    return res;
}

WaveFunction initial_state(const LinkPhases& links, double p, const SolveOptions& opts,
                           InitialGuess policy, std::uint64_t seed) {
    switch (policy) {
        case InitialGuess::linear_ground_state: {
            SolveOptions lin = opts;
            lin.warm_start = nullptr;
            lin.initial_guess = InitialGuess::gaussian_at_well;
            lin.el_tolerance = std::max(opts.el_tolerance, 1e-7);
            return linear_ground_state(links, lin).psi;
        }
        case InitialGuess::gaussian_at_well:
            return gaussian_state(links.domain, opts.well_center, links.h, opts.well_field, p);
        case InitialGuess::random_seeded:
            return random_state(links.domain, seed, p);
    }
    throw std::invalid_argument("minimize_rayleigh: unknown initial guess policy");
}

} // namespace

WaveFunction random_state(const DomainPtr& domain, std::uint64_t seed, double p) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    WaveFunction psi(domain);
    for (Complex& v : psi.values) {
        double re = gauss(rng), im = gauss(rng);
        v = Complex{re, im};
    }
    double n = lattice::lp_norm(psi, p);
    scale(psi, 1.0 / n);
    return psi;
}

WaveFunction gaussian_state(const DomainPtr& domain, Vec2 center, double h, double b0, double p) {
    if (h <= 0 || b0 <= 0)
        throw std::invalid_argument("gaussian_state: h and b0 must be > 0");
    const double sigma2 = h / b0;
    WaveFunction psi(domain);
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        auto [ix, iy] = domain->nodes[i];
        Vec2 x = domain->point(ix, iy);
        double ddx = x[0] - center[0], ddy = x[1] - center[1];
        psi.values[i] = std::exp(-(ddx * ddx + ddy * ddy) / (2.0 * sigma2));
    }
    double n = lattice::lp_norm(psi, p);
    if (n == 0) throw std::invalid_argument("gaussian_state: state vanishes on the mask");
    scale(psi, 1.0 / n);
    return psi;
}

RayleighResult linear_ground_state(const LinkPhases& links, const SolveOptions& opts) {
    WaveFunction x;
    if (opts.warm_start) {
        x = *opts.warm_start;
        if (!x.domain || !x.domain->same_geometry(*links.domain))
            throw std::invalid_argument("linear_ground_state: warm start on a different domain");
    } else if (opts.initial_guess == InitialGuess::random_seeded) {
        x = random_state(links.domain, opts.seed, 2.0);
    } else {
        x = gaussian_state(links.domain, opts.well_center, links.h, opts.well_field, 2.0);
    }
    double nx = lattice::norm2(x);
    if (nx == 0) throw std::invalid_argument("linear_ground_state: zero initial state");
    scale(x, 1.0 / nx);

    WaveFunction hx = lattice::apply_operator(links, x);
    double rho = real_dot(hx, x);
    WaveFunction r = hx;
    axpy(r, -rho, x);
    double rnorm = lattice::norm2(r);

    const int max_outer = 200;
    const int max_cg = 2000;
    RayleighResult res;
    int total_cg = 0;
    for (int outer = 0; outer < max_outer; ++outer) {
        double h_norm = lattice::norm2(hx);
        if (rnorm <= opts.el_tolerance * std::max(h_norm, 1e-300)) {
            res.converged = true;
            break;
        }
        // Shift kept strictly below the bottom eigenvalue: lambda_1 >= rho - ||r||.
        double sigma = std::max(0.0, rho - 2.0 * rnorm);
        WaveFunction y(links.domain);
        CgOutcome cg;
        for (int guard = 0; guard < 8; ++guard) {
            cg = conjugate_gradient(links, sigma, x, y, 1e-2, max_cg);
            if (!cg.indefinite) break;
            sigma = std::max(0.0, sigma - 2.0 * rnorm * (1 << guard));
            if (sigma == 0.0) {
                cg = conjugate_gradient(links, 0.0, x, y, 1e-2, max_cg);
                break;
            }
        }
        total_cg += cg.iterations;
        if (cg.indefinite)
            throw std::runtime_error(
                "linear_ground_state: CG detected an indefinite shift after " +
                std::to_string(cg.iterations) + " iterations");
        if (cg.iterations >= max_cg && cg.rel_residual > 0.5)
            throw std::runtime_error(
                "linear_ground_state: CG stagnation, relative residual " +
                std::to_string(cg.rel_residual) + " after " +
                std::to_string(cg.iterations) + " iterations");
        double ny = lattice::norm2(y);
        if (ny == 0) throw std::runtime_error("linear_ground_state: inverse iteration collapsed");
        x = y;
        scale(x, 1.0 / ny);
        lattice::apply_operator(links, x, hx);
        rho = real_dot(hx, x);
        r = hx;
        axpy(r, -rho, x);
        rnorm = lattice::norm2(r);
        res.iterations = outer + 1;
    }
    if (!res.converged) {
        double h_norm = lattice::norm2(hx);
        res.converged = rnorm <= opts.el_tolerance * std::max(h_norm, 1e-300);
        if (!res.converged)
            throw std::runtime_error("linear_ground_state: no convergence after " +
                                     std::to_string(max_outer) + " outer iterations (" +
                                     std::to_string(total_cg) + " CG steps)");
    }
    // report with L^2 normalization (= L^p at p = 2)
    res.lambda = rho;
    res.el_residual = rnorm / std::max(lattice::norm2(hx), 1e-300);
    res.psi = std::move(x);
    return res;
}

RayleighResult minimize_rayleigh(const LinkPhases& links, double p, const SolveOptions& opts) {
    if (p < 2) throw std::invalid_argument("minimize_rayleigh: p must be >= 2");
    if (p == 2.0) {
        // |psi|^{p-2} = 1: the problem is the linear eigenvalue problem
        return linear_ground_state(links, opts);
    }

    std::vector<InitialGuess> starts;
    starts.push_back(opts.initial_guess);
    if (opts.num_starts > 1) {
        for (InitialGuess g : {InitialGuess::linear_ground_state, InitialGuess::gaussian_at_well,
                               InitialGuess::random_seeded})
            if (g != opts.initial_guess && static_cast<int>(starts.size()) < opts.num_starts)
                starts.push_back(g);
        while (static_cast<int>(starts.size()) < opts.num_starts)
            starts.push_back(InitialGuess::random_seeded);
    }

    RayleighResult best;
    bool have_best = false;
    double lo = 0.0, hi = 0.0;
    bool have_spread = false;
    int total_iterations = 0;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        WaveFunction guess;
        if (s == 0 && opts.warm_start) {
            guess = *opts.warm_start;
            if (!guess.domain || !guess.domain->same_geometry(*links.domain))
                throw std::invalid_argument("minimize_rayleigh: warm start on a different domain");
        } else {
            guess = initial_state(links, p, opts, starts[s], opts.seed + 977 * s);
        }
        SolveOptions local = opts;
        if (s > 0) {
            // exploration starts certify the value; lambda is quadratically
            // accurate in the residual, so a capped budget suffices
            local.max_iterations = std::max(2000, opts.max_iterations / 8);
        }
        RayleighResult r = descend(links, p, local, std::move(guess));
        total_iterations += r.iterations;
        if (r.converged || r.el_residual <= 1e-3) {
            if (!have_spread) {
                lo = hi = r.lambda;
                have_spread = true;
            } else {
                lo = std::min(lo, r.lambda);
                hi = std::max(hi, r.lambda);
            }
        }
        if (!have_best || (r.converged && !best.converged) ||
            (r.converged == best.converged && r.lambda < best.lambda)) {
            best = std::move(r);
            have_best = true;
        }
    }
    best.iterations = total_iterations;
    best.multistart_spread = (have_spread && lo > 0) ? (hi - lo) / lo : 0.0;
    return best;
}

ModelConstantReport model_constant(int k, double p, double truncation, int resolution,
                                   const SolveOptions& opts) {
    if (k < 0) throw std::invalid_argument("model_constant: k must be >= 0");
    if (p < 2) throw std::invalid_argument("model_constant: p must be >= 2");
    if (truncation <= 0) throw std::invalid_argument("model_constant: truncation must be > 0");
    if (resolution < 17) throw std::invalid_argument("model_constant: resolution too small");

    const fields::FieldSpec spec = fields::FieldSpec::power_well(k);
    ModelConstantReport report;
    const double trunc[2] = {truncation, 1.5 * truncation};
    const int res_base[2] = {resolution, resolution + resolution / 2};

    for (int ti = 0; ti < 2; ++ti) {
        for (int ri = 0; ri < 2; ++ri) {
            // keep the spacing tied to the base truncation so the finer
            // truncation run is also at least as fine in absolute terms
            int n = static_cast<int>(std::lround(res_base[ri] * trunc[ti] / truncation));
            n |= 1; // odd, so the well sits on a node
            auto domain = LatticeDomain::square(trunc[ti], n);
            auto links = lattice::build_links(domain, spec, 1.0);
            SolveOptions local = opts;
            local.well_center = {0.0, 0.0};
            local.well_field = std::max(1.0, fields::eval_field(spec, {1.0, 0.0}));
            RayleighResult r = minimize_rayleigh(links, p, local);
            report.values.push_back(r.lambda);
            if (ti == 1 && ri == 1) report.finest = std::move(r);
        }
    }
    report.lambda = report.values.back();
    double lo = *std::min_element(report.values.begin(), report.values.end());
    double hi = *std::max_element(report.values.begin(), report.values.end());
    report.spread = (report.lambda > 0) ? (hi - lo) / report.lambda : 0.0;
    report.truncation_converged = report.spread <= 0.05;
    return report;
}

double min_param_constant(double b, double c1, double c2, double p, double truncation,
                          int resolution, const SolveOptions& opts) {
    if (c2 == 0) throw std::invalid_argument("min_param_constant: c2 must be != 0");
    if (p < 2) throw std::invalid_argument("min_param_constant: p must be >= 2");
    // sheet potential A = (A_s, 0) with A_s(s, t) = -b t + c1 s t + c2 t^2 / 2;
    // the first component is polynomial, so GL4 edge integrals are exact.
    auto a_s = [b, c1, c2](double s, double t) {
        return -b * t + c1 * s * t + 0.5 * c2 * t * t;
    };
    auto integral = [&a_s](Vec2 from, Vec2 to) {
        constexpr double node[4] = {0.069431844202973712, 0.33000947820757187,
                                    0.66999052179242813, 0.93056815579702629};
        constexpr double weight[4] = {0.17392742256872693, 0.32607257743127307,
                                      0.32607257743127307, 0.17392742256872693};
        const double ds = to[0] - from[0], dt = to[1] - from[1];
        double acc = 0.0;
        for (int q = 0; q < 4; ++q) {
            double s = from[0] + node[q] * ds;
            double t = from[1] + node[q] * dt;
            acc += weight[q] * a_s(s, t) * ds;
        }
        return acc;
    };
    // center the grid on the zero set of B = b - c1 s - c2 t (s = 0, t = b/c2)
    const double t_center = b / c2;
    int n = resolution | 1;
    auto domain = LatticeDomain::rectangle(-truncation, truncation,
                                           t_center - truncation, t_center + truncation, n, n);
    auto links = lattice::build_links(domain, integral, 1.0);
    SolveOptions local = opts;
    local.well_center = {0.0, t_center};
    local.well_field = std::max(1.0, std::hypot(c1, c2));
    RayleighResult r = minimize_rayleigh(links, p, local);
    return r.lambda;
}

} // namespace magsob::solver
