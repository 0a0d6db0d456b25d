#include "magsob/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace magsob {

namespace {

std::shared_ptr<LatticeDomain> make_base(double x0, double x1, double y0, double y1,
                                         int nx, int ny) {
    if (nx < 3 || ny < 3)
        throw std::invalid_argument("LatticeDomain: need at least 3 nodes per axis");
    if (!(x1 > x0) || !(y1 > y0))
        throw std::invalid_argument("LatticeDomain: empty bounding box");
    auto d = std::make_shared<LatticeDomain>();
    d->x0 = x0; d->x1 = x1; d->y0 = y0; d->y1 = y1;
    d->nx = nx; d->ny = ny;
    d->dx = (x1 - x0) / (nx - 1);
    d->dy = (y1 - y0) / (ny - 1);
    d->mask.assign(static_cast<std::size_t>(nx) * ny, 0);
    return d;
}

void finalize(LatticeDomain& d) {
    d.interior_of.assign(d.mask.size(), -1);
    d.nodes.clear();
    for (int iy = 0; iy < d.ny; ++iy)
        for (int ix = 0; ix < d.nx; ++ix) {
            std::size_t idx = static_cast<std::size_t>(iy) * d.nx + ix;
            if (d.mask[idx]) {
                d.interior_of[idx] = static_cast<std::int32_t>(d.nodes.size());
                d.nodes.push_back({ix, iy});
            }
        }
    if (d.nodes.empty())
        throw std::invalid_argument("LatticeDomain: mask has no interior nodes");
}

} // namespace

std::shared_ptr<const LatticeDomain>
LatticeDomain::rectangle(double x0, double x1, double y0, double y1, int nx, int ny) {
    auto d = make_base(x0, x1, y0, y1, nx, ny);
    for (int iy = 1; iy < ny - 1; ++iy)
        for (int ix = 1; ix < nx - 1; ++ix)
            d->mask[static_cast<std::size_t>(iy) * nx + ix] = 1;
    finalize(*d);
    return d;
}

std::shared_ptr<const LatticeDomain>
LatticeDomain::disk(Vec2 center, double radius, int n) {
    if (radius <= 0) throw std::invalid_argument("LatticeDomain::disk: radius <= 0");
    auto d = make_base(center[0] - radius, center[0] + radius,
                       center[1] - radius, center[1] + radius, n, n);
    const double r2 = radius * radius;
    for (int iy = 1; iy < n - 1; ++iy)
        for (int ix = 1; ix < n - 1; ++ix) {
            Vec2 p = d->point(ix, iy);
            double ddx = p[0] - center[0], ddy = p[1] - center[1];
            if (ddx * ddx + ddy * ddy < r2)
                d->mask[static_cast<std::size_t>(iy) * n + ix] = 1;
        }
    finalize(*d);
    return d;
}

std::shared_ptr<const LatticeDomain> LatticeDomain::square(double half_width, int n) {
    return rectangle(-half_width, half_width, -half_width, half_width, n, n);
}

std::uint64_t LatticeDomain::mask_hash() const {
    // FNV-1a 64-bit
    std::uint64_t hash = 1469598103934665603ull;
    for (std::uint8_t b : mask) {
        hash ^= b;
        hash *= 1099511628211ull;
    }
    return hash;
}

bool LatticeDomain::same_geometry(const LatticeDomain& other) const {
    return nx == other.nx && ny == other.ny && x0 == other.x0 && x1 == other.x1 &&
           y0 == other.y0 && y1 == other.y1 && mask == other.mask;
}

} // namespace magsob
