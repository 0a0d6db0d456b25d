#include "magsob/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace magsob::fields {

namespace {

double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

// B(r) along the radius for the azimuthal-gauge families, measured from the
// family's own center.
double radial_field_profile(const FieldSpec& spec, double r) {
    switch (spec.family) {
        case Family::radial_well:
            return spec.b0 * (1.0 + spec.hessian_scale * r * r);
        case Family::radial_vanishing:
            return spec.gamma0 * (spec.r0 * spec.r0 - r * r) / (2.0 * spec.r0);
        default:
            throw std::logic_error("radial_field_profile: not a radial family");
    }
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

Vec2 radial_center(const FieldSpec& spec) {
    if (spec.family == Family::radial_well) return spec.x0;
    return {0.0, 0.0}; // radial_vanishing is centered at the origin
}

bool is_radial(Family f) {
    return f == Family::radial_well || f == Family::radial_vanishing;
}

// 4-point Gauss-Legendre nodes/weights on [0,1]
constexpr double kGL4Node[4] = {0.069431844202973712, 0.33000947820757187,
                                0.66999052179242813, 0.93056815579702629};
constexpr double kGL4Weight[4] = {0.17392742256872693, 0.32607257743127307,
                                  0.32607257743127307, 0.17392742256872693};

} // namespace

FieldSpec FieldSpec::constant(double b0) {
    if (b0 <= 0) throw std::invalid_argument("constant_field: b0 must be > 0");
    FieldSpec s;
    s.family = Family::constant_field;
    s.b0 = b0;
    return s;
}

FieldSpec FieldSpec::power_well(int k) {
    if (k < 0) throw std::invalid_argument("power_well: k must be >= 0");
    FieldSpec s;
    s.family = Family::power_well;
    s.k = k;
    return s;
}

FieldSpec FieldSpec::translated_power(int k, Vec2 x0) {
    if (k < 0) throw std::invalid_argument("translated_power: k must be >= 0");
    FieldSpec s;
    s.family = Family::translated_power;
    s.k = k;
    s.x0 = x0;
    return s;
}

FieldSpec FieldSpec::radial_well(double b0, Vec2 x0, double hessian_scale) {
    if (b0 <= 0) throw std::invalid_argument("radial_well: b0 must be > 0");
    if (hessian_scale <= 0) throw std::invalid_argument("radial_well: hessian scale must be > 0");
    FieldSpec s;
    s.family = Family::radial_well;
    s.b0 = b0;
    s.x0 = x0;
    s.hessian_scale = hessian_scale;
    return s;
}

FieldSpec FieldSpec::radial_vanishing(double gamma0, double r0) {
    if (gamma0 <= 0) throw std::invalid_argument("radial_vanishing: gamma0 must be > 0");
    if (r0 <= 0) throw std::invalid_argument("radial_vanishing: r0 must be > 0");
    FieldSpec s;
    s.family = Family::radial_vanishing;
    s.gamma0 = gamma0;
    s.r0 = r0;
    return s;
}

double radial_gauge_profile(const FieldSpec& spec, double r) {
    if (!is_radial(spec.family))
        throw std::invalid_argument("radial_gauge_profile: not a radial family");
    if (r == 0.0) return 0.0;
    // a(r) = (1/r) int_0^r s B(s) ds
    auto integrand = [&spec](double s) { return s * radial_field_profile(spec, s); };
    double scale = std::max(1.0, std::abs(radial_field_profile(spec, 0.0)) * r * r);
    return integrate(integrand, 0.0, r, 1e-14 * scale) / r;
}

Vec2 eval_potential(const FieldSpec& spec, Vec2 p) {
    switch (spec.family) {
        case Family::constant_field:
            return {0.0, spec.b0 * p[0]};
        case Family::power_well:
            return {0.0, ipow(p[0], spec.k + 1) / (spec.k + 1)};
        case Family::translated_power:
            return {0.0, ipow(p[0] - spec.x0[0], spec.k + 1) / (spec.k + 1)};
        case Family::radial_well:
        case Family::radial_vanishing: {
            Vec2 c = radial_center(spec);
            double ux = p[0] - c[0], uy = p[1] - c[1];
            double r = std::hypot(ux, uy);
            if (r == 0.0) return {0.0, 0.0};
            double a = radial_gauge_profile(spec, r);
            return {-a * uy / r, a * ux / r};
        }
    }
    throw std::invalid_argument("eval_potential: unknown field family");
}

double eval_field(const FieldSpec& spec, Vec2 p) {
    switch (spec.family) {
        case Family::constant_field:
            return spec.b0;
        case Family::power_well:
            return ipow(p[0], spec.k);
        case Family::translated_power:
            return ipow(p[0] - spec.x0[0], spec.k);
        case Family::radial_well: {
            double ux = p[0] - spec.x0[0], uy = p[1] - spec.x0[1];
            return spec.b0 * (1.0 + spec.hessian_scale * (ux * ux + uy * uy));
        }
        case Family::radial_vanishing: {
            double r2 = p[0] * p[0] + p[1] * p[1];
            return spec.gamma0 * (spec.r0 * spec.r0 - r2) / (2.0 * spec.r0);
        }
    }
    throw std::invalid_argument("eval_field: unknown field family");
}

double line_integral(const FieldSpec& spec, Vec2 from, Vec2 to) {
    const double tx = to[0] - from[0], ty = to[1] - from[1];
    switch (spec.family) {
        case Family::constant_field:
            // A2 = b0 x is linear: midpoint value is exact
            return spec.b0 * 0.5 * (from[0] + to[0]) * ty;
        case Family::power_well:
        case Family::translated_power: {
            // A1 = 0 and A2 depends on x only; for an axis-aligned edge the
            // integral is A2(x) * dy. For a general segment integrate the
            // polynomial x(t)^{k+1} exactly with Gauss-Legendre of adequate
            // order (GL4 is exact through degree 7).
            if (spec.k + 1 <= 7) {
                double acc = 0.0;
                double shift = (spec.family == Family::translated_power) ? spec.x0[0] : 0.0;
                for (int q = 0; q < 4; ++q) {
                    double x = from[0] + kGL4Node[q] * tx - shift;
                    acc += kGL4Weight[q] * ipow(x, spec.k + 1) / (spec.k + 1);
                }
                return acc * ty;
            }
            break;
        }
        default:
            break;
    }
    // generic: 4-point Gauss-Legendre along the segment
    double acc = 0.0;
    for (int q = 0; q < 4; ++q) {
        Vec2 x{from[0] + kGL4Node[q] * tx, from[1] + kGL4Node[q] * ty};
        Vec2 a = eval_potential(spec, x);
        acc += kGL4Weight[q] * (a[0] * tx + a[1] * ty);
    }
    return acc;
}

Vec2 well_center(const FieldSpec& spec) {
    switch (spec.family) {
        case Family::constant_field:
            return {0.0, 0.0};
        case Family::radial_well:
            return spec.x0;
        default:
            throw std::invalid_argument("well_center: family has no point well");
    }
}

double well_minimum(const FieldSpec& spec) {
    switch (spec.family) {
        case Family::constant_field:
        case Family::radial_well:
            return spec.b0;
        default:
            throw std::invalid_argument("well_minimum: family has no point well");
    }
}

const char* family_name(Family f) {
    switch (f) {
        case Family::constant_field: return "constant_field";
        case Family::power_well: return "power_well";
        case Family::radial_well: return "radial_well";
        case Family::radial_vanishing: return "radial_vanishing";
        case Family::translated_power: return "translated_power";
    }
    return "unknown";
}

bool parse_family(const std::string& name, Family& out) {
    if (name == "constant_field") { out = Family::constant_field; return true; }
    if (name == "power_well") { out = Family::power_well; return true; }
    if (name == "radial_well") { out = Family::radial_well; return true; }
    if (name == "radial_vanishing") { out = Family::radial_vanishing; return true; }
    if (name == "translated_power") { out = Family::translated_power; return true; }
    return false;
}

WaveFunction gauge_transform(const WaveFunction& psi, const ScalarField& phi, double h) {
    if (h <= 0) throw std::invalid_argument("gauge_transform: h must be > 0");
    if (!psi.domain || !phi.domain || !psi.domain->same_geometry(*phi.domain))
        throw std::invalid_argument("gauge_transform: grid mismatch");
    WaveFunction out(psi.domain);
    const auto& dom = *psi.domain;
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        auto [ix, iy] = dom.nodes[i];
        double arg = phi.at(ix, iy) / h;
        out.values[i] = psi.values[i] * Complex{std::cos(arg), std::sin(arg)};
    }
    return out;
}

} // namespace magsob::fields
