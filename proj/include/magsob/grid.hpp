#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace magsob {

using Vec2 = std::array<double, 2>;
using Complex = std::complex<double>;

/// Rectangular node lattice with an interior mask encoding a Dirichlet
/// domain (rectangle or disk). Nodes outside the mask carry psi = 0.
struct LatticeDomain {
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    int nx = 2, ny = 2;
    double dx = 1, dy = 1;
    std::vector<std::uint8_t> mask;        // nx*ny, row-major: iy*nx + ix
    std::vector<std::int32_t> interior_of; // node -> interior index, -1 outside
    std::vector<std::array<int, 2>> nodes; // interior index -> (ix, iy)

    static std::shared_ptr<const LatticeDomain>
    rectangle(double x0, double x1, double y0, double y1, int nx, int ny);

    static std::shared_ptr<const LatticeDomain>
    disk(Vec2 center, double radius, int n);

    static std::shared_ptr<const LatticeDomain> square(double half_width, int n);

    int interior_count() const { return static_cast<int>(nodes.size()); }
    double node_weight() const { return dx * dy; }

    Vec2 point(int ix, int iy) const {
        return {x0 + ix * dx, y0 + iy * dy};
    }
    bool inside(int ix, int iy) const {
        if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return false;
        return mask[static_cast<std::size_t>(iy) * nx + ix] != 0;
    }
    std::int32_t interior_index(int ix, int iy) const {
        if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return -1;
        return interior_of[static_cast<std::size_t>(iy) * nx + ix];
    }

    /// FNV-1a over the mask bytes; identifies the geometry in file headers.
    std::uint64_t mask_hash() const;

    bool same_geometry(const LatticeDomain& other) const;
};

using DomainPtr = std::shared_ptr<const LatticeDomain>;

/// Complex grid function on the interior nodes of a domain; implicitly
/// zero outside the mask.
struct WaveFunction {
    DomainPtr domain;
    std::vector<Complex> values;

    WaveFunction() = default;
    explicit WaveFunction(DomainPtr d)
        : domain(std::move(d)), values(domain->interior_count(), Complex{0, 0}) {}

    std::size_t size() const { return values.size(); }
};

/// Real grid function on all nodes (gauge functions, sampled fields,
/// densities).
struct ScalarField {
    DomainPtr domain;
    std::vector<double> values; // nx*ny, row-major, all nodes

    ScalarField() = default;
    explicit ScalarField(DomainPtr d)
        : domain(std::move(d)),
          values(static_cast<std::size_t>(domain->nx) * domain->ny, 0.0) {}

    double at(int ix, int iy) const {
        return values[static_cast<std::size_t>(iy) * domain->nx + ix];
    }
    double& at(int ix, int iy) {
        return values[static_cast<std::size_t>(iy) * domain->nx + ix];
    }
};

} // namespace magsob
