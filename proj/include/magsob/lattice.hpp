#pragma once

#include "magsob/fields.hpp"
#include "magsob/grid.hpp"

#include <functional>
#include <iosfwd>
#include <string>

namespace magsob::lattice {

/// Integral of the vector potential along the straight edge from -> to.
using LineIntegral = std::function<double(Vec2 from, Vec2 to)>;

/// Unit-modulus Peierls factors exp(-(i/h) int_edge A . dl) per lattice
/// edge, plus the precomputed 5-point stencil of the gauge-covariant
/// Dirichlet operator they induce.
struct LinkPhases {
    DomainPtr domain;
    double h = 1.0;
    // ux: edge (ix,iy)->(ix+1,iy), size (nx-1)*ny, index iy*(nx-1)+ix
    // uy: edge (ix,iy)->(ix,iy+1), size nx*(ny-1), index iy*nx+ix
    std::vector<Complex> ux, uy;

    // Stencil over interior nodes: (H psi)_i = diag_i psi_i - sum_m coef[4i+m] psi_{nb[4i+m]}
    // with neighbor order (-x, +x, -y, +y); nb = -1 marks a Dirichlet neighbor.
    std::vector<std::int32_t> nb;
    std::vector<Complex> coef;
    std::vector<double> diag;

    Complex link_x(int ix, int iy) const { return ux[static_cast<std::size_t>(iy) * (domain->nx - 1) + ix]; }
    Complex link_y(int ix, int iy) const { return uy[static_cast<std::size_t>(iy) * domain->nx + ix]; }
};

/// Build links for a catalog field. h <= 0 is a domain error.
LinkPhases build_links(const DomainPtr& domain, const fields::FieldSpec& spec, double h);

/// Build links from an arbitrary line-integral rule (model potentials that
/// are not part of the catalog).
LinkPhases build_links(const DomainPtr& domain, const LineIntegral& integral, double h);

/// A = 0: all factors one.
LinkPhases zero_field_links(const DomainPtr& domain, double h);

/// Links for A + grad(phi), obtained from exact phase differences of phi at
/// the edge endpoints; keeps discrete gauge invariance exact.
LinkPhases apply_gauge_to_links(const LinkPhases& links, const ScalarField& phi);

/// Q_{h,A}(psi) = h^2 sum_edges w |psi_head - U psi_tail|^2 / edge_len^2.
double quadratic_form(const LinkPhases& links, const WaveFunction& psi);

/// (sum_i w |psi_i|^p)^{1/p}; p < 1 is a domain error.
double lp_norm(const WaveFunction& psi, double p);

/// Matrix-free application of the gauge-covariant 5-point operator;
/// Hermitian, and <H psi, psi> = quadratic_form(psi) exactly.
WaveFunction apply_operator(const LinkPhases& links, const WaveFunction& psi);
void apply_operator(const LinkPhases& links, const WaveFunction& psi, WaveFunction& out);

// weighted L2 helpers
Complex dot(const WaveFunction& a, const WaveFunction& b); // sum w a conj(b)
double norm2(const WaveFunction& a);
double norm2_sq(const WaveFunction& a);

/// Nodewise |psi|.
WaveFunction modulus(const WaveFunction& psi);

/// Flat binary dump: u64 nx, u64 ny, f64 x0,x1,y0,y1, u64 mask hash, then
/// interleaved re/im doubles over interior nodes in row-major order.
/// All integers and floats little-endian.
void save_wavefunction(const WaveFunction& psi, const std::string& path);
WaveFunction load_wavefunction(const std::string& path, const DomainPtr& domain);

} // namespace magsob::lattice
