#include "magsob/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace magsob::partition {

namespace {

// quintic smoothstep: s(0) = 0, s(1) = 1, s' = s'' = 0 at both ends
double smoothstep(double u) {
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}
double smoothstep_derivative(double u) {
    return 30.0 * u * u * (1.0 + u * (-2.0 + u));
}

} // namespace

Partition::Partition(const PartitionSpec& spec) : spec_(spec) {
    if (!(spec.alpha >= spec.rho) || !(spec.rho > 0))
        throw std::invalid_argument("Partition: requires alpha >= rho > 0");
    if (!(spec.h > 0)) throw std::invalid_argument("Partition: requires h > 0");
    plateau_ = std::pow(spec.h, spec.rho);
    transition_ = std::pow(spec.h, spec.alpha);
    support_ = plateau_ + transition_;
    period_ = 2.0 * plateau_ + transition_;
}

double Partition::profile(double x) const {
    double a = plateau_ + 0.5 * transition_; // = 1 inside
    double b = support_;                     // = 0 outside
    double ax = std::abs(x);
    if (ax <= a) return 1.0;
    if (ax >= b) return 0.0;
    return smoothstep((b - ax) / (b - a));
}

double Partition::profile_derivative(double x) const {
    double a = plateau_ + 0.5 * transition_;
    double b = support_;
    double ax = std::abs(x);
    if (ax <= a || ax >= b) return 0.0;
    double d = -smoothstep_derivative((b - ax) / (b - a)) / (b - a);
    return x >= 0 ? d : -d;
}

Vec2 Partition::cell_center(std::array<int, 2> cell) const {
    return {period_ * cell[0] + spec_.tau[0], period_ * cell[1] + spec_.tau[1]};
}

std::vector<CutoffValue> Partition::eval(Vec2 point) const {
    // candidate cells per axis whose 1D support contains the coordinate
    int lo[2], hi[2];
    for (int axis = 0; axis < 2; ++axis) {
        double u = point[axis] - spec_.tau[axis];
        lo[axis] = static_cast<int>(std::ceil((u - support_) / period_));
        hi[axis] = static_cast<int>(std::floor((u + support_) / period_));
    }
    struct Raw {
        std::array<int, 2> cell;
        double u;      // product profile
        Vec2 du;       // gradient of the product
    };
    std::vector<Raw> raw;
    double s = 0.0;
    Vec2 ds{0.0, 0.0};
    for (int cx = lo[0]; cx <= hi[0]; ++cx) {
        double ux = point[0] - spec_.tau[0] - period_ * cx;
        double px = profile(ux);
        if (px == 0.0) continue;
        double dpx = profile_derivative(ux);
        for (int cy = lo[1]; cy <= hi[1]; ++cy) {
            double uy = point[1] - spec_.tau[1] - period_ * cy;
            double py = profile(uy);
            if (py == 0.0) continue;
            double dpy = profile_derivative(uy);
            Raw r;
            r.cell = {cx, cy};
            r.u = px * py;
            r.du = {dpx * py, px * dpy};
            s += r.u * r.u;
            ds[0] += 2.0 * r.u * r.du[0];
            ds[1] += 2.0 * r.u * r.du[1];
            raw.push_back(r);
        }
    }
    std::vector<CutoffValue> out;
    if (raw.empty()) return out; // cannot happen: S >= 1 everywhere
    double sqrt_s = std::sqrt(s);
    out.reserve(raw.size());
    for (const Raw& r : raw) {
        CutoffValue v;
        v.cell = r.cell;
        v.chi = r.u / sqrt_s;
        // grad(u / sqrt(S)) = du / sqrt(S) - u dS / (2 S^{3/2})
        v.grad = {r.du[0] / sqrt_s - r.u * ds[0] / (2.0 * s * sqrt_s),
                  r.du[1] / sqrt_s - r.u * ds[1] / (2.0 * s * sqrt_s)};
        out.push_back(v);
    }
    return out;
}

double Partition::sum_of_squares(Vec2 point) const {
    double acc = 0.0;
    for (const CutoffValue& v : eval(point)) acc += v.chi * v.chi;
    return acc;
}

double Partition::sum_of_grad_squares(Vec2 point) const {
    double acc = 0.0;
    for (const CutoffValue& v : eval(point))
        acc += v.grad[0] * v.grad[0] + v.grad[1] * v.grad[1];
    return acc;
}

std::vector<std::array<int, 2>> Partition::cells_in_extent() const {
    const auto& e = spec_.extent;
    int cx_lo = static_cast<int>(std::ceil((e[0] - spec_.tau[0] - support_) / period_));
    int cx_hi = static_cast<int>(std::floor((e[1] - spec_.tau[0] + support_) / period_));
    int cy_lo = static_cast<int>(std::ceil((e[2] - spec_.tau[1] - support_) / period_));
    int cy_hi = static_cast<int>(std::floor((e[3] - spec_.tau[1] + support_) / period_));
    std::vector<std::array<int, 2>> cells;
    for (int cy = cy_lo; cy <= cy_hi; ++cy)
        for (int cx = cx_lo; cx <= cx_hi; ++cx)
            cells.push_back({cx, cy});
    return cells;
}

namespace {

double dist_to_multiples(double x, double r) {
    double m = x - r * std::round(x / r);
    return std::abs(m);
}

std::vector<double> scan_fractions(double r, double delta, const ScalarField& f,
                                   double& total_mass) {
    if (r <= 0 || delta <= 0)
        throw std::invalid_argument("select_translation: r and delta must be > 0");
    const auto& dom = *f.domain;
    const double w = dom.node_weight();
    total_mass = 0.0;
    for (double v : f.values) {
        if (v < 0) throw std::invalid_argument("select_translation: density must be >= 0");
        total_mass += v;
    }
    total_mass *= w;
    if (total_mass <= 0)
        throw std::invalid_argument("select_translation: density has no mass");

    const int jmax = static_cast<int>(std::floor(r / (2.0 * delta))) + 1;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<double> fractions(jmax + 1, 0.0);
    for (int j = 0; j <= jmax; ++j) {
        double shift = j * delta * inv_sqrt2; // per-axis component of j delta e
        double acc = 0.0;
        for (int iy = 0; iy < dom.ny; ++iy)
            for (int ix = 0; ix < dom.nx; ++ix) {
                double v = f.values[static_cast<std::size_t>(iy) * dom.nx + ix];
                if (v == 0.0) continue;
                Vec2 p = dom.point(ix, iy);
                double d1 = dist_to_multiples(p[0] - shift, r);
                double d2 = dist_to_multiples(p[1] - shift, r);
                if (std::min(d1, d2) <= delta) acc += v;
            }
        fractions[j] = acc * w / total_mass;
    }
    return fractions;
}

} // namespace

std::vector<double> translation_scan(double r, double delta, const ScalarField& f) {
    double total = 0.0;
    return scan_fractions(r, delta, f, total);
}

std::pair<Vec2, double> select_translation(double r, double delta, const ScalarField& f) {
    double total = 0.0;
    std::vector<double> fractions = scan_fractions(r, delta, f, total);
    std::size_t best = 0;
    for (std::size_t j = 1; j < fractions.size(); ++j)
        if (fractions[j] < fractions[best]) best = j; // ties keep the smallest j
    const double bound = 3.0 * delta / (r + 2.0 * delta);
    if (fractions[best] > bound)
        throw std::runtime_error("select_translation: no shift meets the 3 delta/(r+2 delta) "
                                 "budget; best fraction " + std::to_string(fractions[best]));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    double shift = best * delta * inv_sqrt2;
    return {Vec2{shift, shift}, fractions[best]};
}

RecoverySlacks lp_recovery_check(const Partition& part, const WaveFunction& psi, double p) {
    if (p < 2) throw std::invalid_argument("lp_recovery_check: p must be >= 2");
    const auto& dom = *psi.domain;
    const double w = dom.node_weight();
    double total = 0.0;     // ||psi||_p^p
    double localized = 0.0; // sum_l ||chi_l psi||_p^p
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        auto [ix, iy] = dom.nodes[i];
        double m = std::abs(psi.values[i]);
        if (m == 0.0) continue;
        double mp = std::pow(m, p);
        total += mp;
        for (const CutoffValue& v : part.eval(dom.point(ix, iy)))
            localized += std::pow(v.chi, p) * mp;
    }
    total *= w;
    localized *= w;
    const double har = std::pow(part.spec().h, part.spec().alpha - part.spec().rho);
    RecoverySlacks s;
    s.lower = total - localized;
    s.upper = (1.0 + 3.0 * har) * localized - total;
    s.empirical_c = (localized > 0) ? std::max(0.0, (total / localized - 1.0) / har) : 0.0;
    return s;
}

ImsParts ims_decompose(const Partition& part, const lattice::LinkPhases& links,
                       const WaveFunction& psi) {
    if (!links.domain || !psi.domain || !links.domain->same_geometry(*psi.domain))
        throw std::invalid_argument("ims_decompose: domain mismatch");
    const auto& dom = *psi.domain;
    const double w = dom.node_weight();
    const double h2 = links.h * links.h;

    ImsParts out;
    // gradient penalty: h^2 sum_nodes w (sum_l |grad chi_l|^2)(x) |psi|^2
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        auto [ix, iy] = dom.nodes[i];
        double g2 = part.sum_of_grad_squares(dom.point(ix, iy));
        out.gradient_penalty += g2 * std::norm(psi.values[i]);
    }
    out.gradient_penalty *= h2 * w;

    // localized quadratic forms, one cutoff at a time
    for (const auto& cell : part.cells_in_extent()) {
        WaveFunction cut(psi.domain);
        bool nonzero = false;
        for (std::size_t i = 0; i < psi.values.size(); ++i) {
            auto [ix, iy] = dom.nodes[i];
            Vec2 x = dom.point(ix, iy);
            Vec2 c = part.cell_center(cell);
            if (std::max(std::abs(x[0] - c[0]), std::abs(x[1] - c[1])) >= part.support_half_width())
                continue;
            for (const CutoffValue& v : part.eval(x)) {
                if (v.cell == cell && v.chi != 0.0) {
                    cut.values[i] = v.chi * psi.values[i];
                    nonzero = true;
                }
            }
        }
        if (nonzero) out.localized_sum += lattice::quadratic_form(links, cut);
    }
    return out;
}

} // namespace magsob::partition
