#include "magsob/lattice.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace magsob::lattice {

namespace {

Complex unit_phase(double arg) { return {std::cos(arg), std::sin(arg)}; }

// Fill the stencil cache from the raw edge factors.
void build_stencil(LinkPhases& links) {
    const auto& dom = *links.domain;
    const int n = dom.interior_count();
    const double h2 = links.h * links.h;
    const double cx = h2 / (dom.dx * dom.dx);
    const double cy = h2 / (dom.dy * dom.dy);

    links.nb.assign(static_cast<std::size_t>(4) * n, -1);
    links.coef.assign(static_cast<std::size_t>(4) * n, Complex{0, 0});
    links.diag.assign(n, 2.0 * (cx + cy));

    for (int i = 0; i < n; ++i) {
        auto [ix, iy] = dom.nodes[i];
        // neighbor order: -x, +x, -y, +y
        links.nb[4 * i + 0] = dom.interior_index(ix - 1, iy);
        links.nb[4 * i + 1] = dom.interior_index(ix + 1, iy);
        links.nb[4 * i + 2] = dom.interior_index(ix, iy - 1);
        links.nb[4 * i + 3] = dom.interior_index(ix, iy + 1);
        if (ix > 0) links.coef[4 * i + 0] = cx * links.link_x(ix - 1, iy);
        if (ix < dom.nx - 1) links.coef[4 * i + 1] = cx * std::conj(links.link_x(ix, iy));
        if (iy > 0) links.coef[4 * i + 2] = cy * links.link_y(ix, iy - 1);
        if (iy < dom.ny - 1) links.coef[4 * i + 3] = cy * std::conj(links.link_y(ix, iy));
    }
}

void check_shared_domain(const LinkPhases& links, const WaveFunction& psi) {
    if (!links.domain || !psi.domain || !links.domain->same_geometry(*psi.domain))
        throw std::invalid_argument("lattice: domain mismatch");
}

} // namespace

LinkPhases build_links(const DomainPtr& domain, const LineIntegral& integral, double h) {
    if (h <= 0) throw std::invalid_argument("build_links: h must be > 0");
    if (!domain) throw std::invalid_argument("build_links: null domain");
    LinkPhases links;
    links.domain = domain;
    links.h = h;
    const auto& dom = *domain;
    links.ux.resize(static_cast<std::size_t>(dom.nx - 1) * dom.ny);
    links.uy.resize(static_cast<std::size_t>(dom.nx) * (dom.ny - 1));
    for (int iy = 0; iy < dom.ny; ++iy)
        for (int ix = 0; ix + 1 < dom.nx; ++ix) {
            double integ = integral(dom.point(ix, iy), dom.point(ix + 1, iy));
            links.ux[static_cast<std::size_t>(iy) * (dom.nx - 1) + ix] = unit_phase(-integ / h);
        }
    for (int iy = 0; iy + 1 < dom.ny; ++iy)
        for (int ix = 0; ix < dom.nx; ++ix) {
            double integ = integral(dom.point(ix, iy), dom.point(ix, iy + 1));
            links.uy[static_cast<std::size_t>(iy) * dom.nx + ix] = unit_phase(-integ / h);
        }
    build_stencil(links);
    return links;
}

LinkPhases build_links(const DomainPtr& domain, const fields::FieldSpec& spec, double h) {
    return build_links(domain, [&spec](Vec2 a, Vec2 b) { return fields::line_integral(spec, a, b); }, h);
}

LinkPhases zero_field_links(const DomainPtr& domain, double h) {
    return build_links(domain, [](Vec2, Vec2) { return 0.0; }, h);
}

LinkPhases apply_gauge_to_links(const LinkPhases& links, const ScalarField& phi) {
    if (!links.domain || !phi.domain || !links.domain->same_geometry(*phi.domain))
        throw std::invalid_argument("apply_gauge_to_links: domain mismatch");
    LinkPhases out;
    out.domain = links.domain;
    out.h = links.h;
    const auto& dom = *links.domain;
    out.ux.resize(links.ux.size());
    out.uy.resize(links.uy.size());
    // int_edge grad(phi) . dl = phi(head) - phi(tail), exactly
    for (int iy = 0; iy < dom.ny; ++iy)
        for (int ix = 0; ix + 1 < dom.nx; ++ix) {
            double dphi = phi.at(ix + 1, iy) - phi.at(ix, iy);
            out.ux[static_cast<std::size_t>(iy) * (dom.nx - 1) + ix] =
                links.link_x(ix, iy) * unit_phase(-dphi / links.h);
        }
    for (int iy = 0; iy + 1 < dom.ny; ++iy)
        for (int ix = 0; ix < dom.nx; ++ix) {
            double dphi = phi.at(ix, iy + 1) - phi.at(ix, iy);
            out.uy[static_cast<std::size_t>(iy) * dom.nx + ix] =
                links.link_y(ix, iy) * unit_phase(-dphi / links.h);
        }
    build_stencil(out);
    return out;
}

double quadratic_form(const LinkPhases& links, const WaveFunction& psi) {
    check_shared_domain(links, psi);
    const auto& dom = *links.domain;
    const double w = dom.node_weight();
    const double h2 = links.h * links.h;
    double qx = 0.0, qy = 0.0;

    auto value_at = [&dom, &psi](int ix, int iy) -> Complex {
        std::int32_t idx = dom.interior_index(ix, iy);
        return idx >= 0 ? psi.values[idx] : Complex{0, 0};
    };

    for (int iy = 0; iy < dom.ny; ++iy)
        for (int ix = 0; ix + 1 < dom.nx; ++ix) {
            if (!dom.inside(ix, iy) && !dom.inside(ix + 1, iy)) continue;
            Complex d = value_at(ix + 1, iy) - links.link_x(ix, iy) * value_at(ix, iy);
            qx += std::norm(d);
        }
    for (int iy = 0; iy + 1 < dom.ny; ++iy)
        for (int ix = 0; ix < dom.nx; ++ix) {
            if (!dom.inside(ix, iy) && !dom.inside(ix, iy + 1)) continue;
            Complex d = value_at(ix, iy + 1) - links.link_y(ix, iy) * value_at(ix, iy);
            qy += std::norm(d);
        }
    return h2 * w * (qx / (dom.dx * dom.dx) + qy / (dom.dy * dom.dy));
}

double lp_norm(const WaveFunction& psi, double p) {
    if (p < 1) throw std::invalid_argument("lp_norm: p must be >= 1");
    double peak_sq = 0.0;
    for (const Complex& v : psi.values) peak_sq = std::max(peak_sq, std::norm(v));
    if (peak_sq == 0.0) return 0.0;
    // scale by the peak so large p cannot underflow the sum
    const double inv_peak_sq = 1.0 / peak_sq;
    double acc = 0.0;
    if (p == 2.0) {
        for (const Complex& v : psi.values) acc += std::norm(v) * inv_peak_sq;
    } else if (p == 4.0) {
        for (const Complex& v : psi.values) {
            double m2 = std::norm(v) * inv_peak_sq;
            acc += m2 * m2;
        }
    } else {
        const double half_p = 0.5 * p;
        for (const Complex& v : psi.values) {
            double m2 = std::norm(v) * inv_peak_sq;
            if (m2 > 0) acc += std::pow(m2, half_p);
        }
    }
    return std::sqrt(peak_sq) * std::pow(psi.domain->node_weight() * acc, 1.0 / p);
}

void apply_operator(const LinkPhases& links, const WaveFunction& psi, WaveFunction& out) {
    check_shared_domain(links, psi);
    if (!out.domain || !out.domain->same_geometry(*links.domain)) out = WaveFunction(psi.domain);
    const int n = links.domain->interior_count();
    const Complex* v = psi.values.data();
    Complex* o = out.values.data();
    for (int i = 0; i < n; ++i) {
        Complex acc = links.diag[i] * v[i];
        for (int m = 0; m < 4; ++m) {
            std::int32_t j = links.nb[4 * i + m];
            if (j >= 0) acc -= links.coef[4 * i + m] * v[j];
        }
        o[i] = acc;
    }
}

WaveFunction apply_operator(const LinkPhases& links, const WaveFunction& psi) {
    WaveFunction out(psi.domain);
    apply_operator(links, psi, out);
    return out;
}

Complex dot(const WaveFunction& a, const WaveFunction& b) {
    Complex acc{0, 0};
    for (std::size_t i = 0; i < a.values.size(); ++i)
        acc += a.values[i] * std::conj(b.values[i]);
    return acc * a.domain->node_weight();
}

double norm2_sq(const WaveFunction& a) {
    double acc = 0.0;
    for (const Complex& v : a.values) acc += std::norm(v);
    return acc * a.domain->node_weight();
}

double norm2(const WaveFunction& a) { return std::sqrt(norm2_sq(a)); }

WaveFunction modulus(const WaveFunction& psi) {
    WaveFunction out(psi.domain);
    for (std::size_t i = 0; i < psi.values.size(); ++i)
        out.values[i] = Complex{std::abs(psi.values[i]), 0.0};
    return out;
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(buf), 8);
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(os, bits);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is) {
    std::uint64_t bits = get_u64(is);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

} // namespace

void save_wavefunction(const WaveFunction& psi, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_wavefunction: cannot open " + path);
    const auto& dom = *psi.domain;
    put_u64(os, static_cast<std::uint64_t>(dom.nx));
    put_u64(os, static_cast<std::uint64_t>(dom.ny));
    put_f64(os, dom.x0);
    put_f64(os, dom.x1);
    put_f64(os, dom.y0);
    put_f64(os, dom.y1);
    put_u64(os, dom.mask_hash());
    for (const Complex& v : psi.values) {
        put_f64(os, v.real());
        put_f64(os, v.imag());
    }
    if (!os) throw std::runtime_error("save_wavefunction: write failed on " + path);
}

WaveFunction load_wavefunction(const std::string& path, const DomainPtr& domain) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_wavefunction: cannot open " + path);
    std::uint64_t nx = get_u64(is), ny = get_u64(is);
    double x0 = get_f64(is), x1 = get_f64(is), y0 = get_f64(is), y1 = get_f64(is);
    std::uint64_t hash = get_u64(is);
    const auto& dom = *domain;
    if (nx != static_cast<std::uint64_t>(dom.nx) || ny != static_cast<std::uint64_t>(dom.ny) ||
        x0 != dom.x0 || x1 != dom.x1 || y0 != dom.y0 || y1 != dom.y1 ||
        hash != dom.mask_hash())
        throw std::runtime_error("load_wavefunction: header does not match domain");
    WaveFunction psi(domain);
    for (Complex& v : psi.values) {
        double re = get_f64(is), im = get_f64(is);
        v = Complex{re, im};
    }
    if (!is) throw std::runtime_error("load_wavefunction: truncated file " + path);
    return psi;
}

} // namespace magsob::lattice
