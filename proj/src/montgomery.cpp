#include "magsob/montgomery.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace magsob::montgomery {

namespace {

double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

struct Tridiag {
    std::vector<double> diag;
    double off; // constant off-diagonal -1/dt^2
};

Tridiag discretize(int k, double alpha, double half_width, int n) {
    if (k < 0) throw std::invalid_argument("band_value: k must be >= 0");
    if (half_width <= 0) throw std::invalid_argument("band_value: half_width must be > 0");
    if (n < 64) throw std::invalid_argument("band_value: n must be >= 64");
    const double dt = 2.0 * half_width / (n + 1);
    Tridiag m;
    m.off = -1.0 / (dt * dt);
    m.diag.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = -half_width + (i + 1) * dt;
        double v = ipow(t, k + 1) / (k + 1) - alpha;
        m.diag[i] = 2.0 / (dt * dt) + v * v;
    }
    return m;
}

// Number of eigenvalues of the symmetric tridiagonal matrix below x,
// via the Sturm sequence (LDL^T sign count).
int count_below(const Tridiag& m, double x) {
    const double off2 = m.off * m.off;
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    int count = 0;
    double q = m.diag[0] - x;
    if (q < 0) ++count;
    for (std::size_t i = 1; i < m.diag.size(); ++i) {
        if (std::abs(q) < tiny) q = (q < 0 ? -tiny : tiny);
        q = m.diag[i] - x - off2 / q;
        if (q < 0) ++count;
    }
    return count;
}

// Smallest eigenvalue by bisection on the Sturm count.
double smallest_eigenvalue(const Tridiag& m) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double d : m.diag) {
        lo = std::min(lo, d - 2.0 * std::abs(m.off));
        hi = std::max(hi, d + 2.0 * std::abs(m.off));
    }
    // the potential is nonnegative, so 0 is also a lower bound
    lo = std::max(lo, 0.0);
    if (count_below(m, hi) < 1)
        throw std::runtime_error("montgomery: Gershgorin bound failed");
    const int max_iter = 200;
    int it = 0;
    while (hi - lo > 1e-13 * std::max(1.0, std::abs(hi)) && it < max_iter) {
        double mid = 0.5 * (lo + hi);
        if (count_below(m, mid) >= 1)
            hi = mid;
        else
            lo = mid;
        ++it;
    }
    if (it >= max_iter)
        throw std::runtime_error("montgomery: bisection did not converge after " +
                                 std::to_string(max_iter) + " iterations");
    return 0.5 * (lo + hi);
}

// Golden-section minimization of f on [a, b] to |b - a| <= tol.
double golden_section(double a, double b, const std::function<double(double)>& f, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

double band_value(int k, double alpha, double half_width, int n) {
    return smallest_eigenvalue(discretize(k, alpha, half_width, n));
}

MontgomeryBand minimize_band(int k, double half_width, int n) {
    if (k < 0) throw std::invalid_argument("minimize_band: k must be >= 0");
    MontgomeryBand band;
    band.k = k;
    band.half_width = half_width;
    band.n = n;

    auto nu = [&](double alpha) { return band_value(k, alpha, half_width, n); };

    double lo = -2.0, hi = 6.0;
    const double step = 0.05;
    for (int attempt = 0;; ++attempt) {
        band.alphas.clear();
        band.nu1.clear();
        int count = static_cast<int>(std::lround((hi - lo) / step)) + 1;
        std::size_t best = 0;
        for (int i = 0; i < count; ++i) {
            double a = lo + i * step;
            band.alphas.push_back(a);
            band.nu1.push_back(nu(a));
            if (band.nu1.back() < band.nu1[best]) best = band.nu1.size() - 1;
        }
        if (k == 0) {
            // flat band: alpha0 = 0 by convention
            band.alpha0 = 0.0;
            band.lambda2 = nu(0.0);
            return band;
        }
        if (best == 0 || best + 1 == band.nu1.size()) {
            if (attempt >= 1)
                throw std::runtime_error("minimize_band: no interior minimum in widened scan window");
            double width = hi - lo;
            lo -= width;
            hi += width;
            continue;
        }
        double a = band.alphas[best - 1], b = band.alphas[best + 1];
        band.alpha0 = golden_section(a, b, nu, 1e-6);
        band.lambda2 = std::min(nu(band.alpha0), band.nu1[best]);
        return band;
    }
}

} // namespace magsob::montgomery
