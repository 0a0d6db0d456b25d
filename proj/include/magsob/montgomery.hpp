#pragma once

#include <vector>

namespace magsob::montgomery {

/// Ground band of the 1D reduced operator D_t^2 + (t^{k+1}/(k+1) - alpha)^2
/// sampled over alpha, with the refined minimizer.
struct MontgomeryBand {
    int k = 0;
    std::vector<double> alphas;
    std::vector<double> nu1;
    double alpha0 = 0.0;  // minimizing alpha (0 by convention for k = 0)
    double lambda2 = 0.0; // min_alpha nu1(alpha)
    double half_width = 12.0;
    int n = 2048;
};

/// Ground eigenvalue of the Dirichlet discretization of
/// D_t^2 + (t^{k+1}/(k+1) - alpha)^2 on [-T, T] with n interior nodes.
/// Preconditions: half_width > 0, n >= 64.
double band_value(int k, double alpha, double half_width = 12.0, int n = 2048);

/// Coarse scan of nu1 over alpha in [-2, 6] (step 0.05) followed by
/// golden-section refinement to |dalpha| <= 1e-6. If the scan minimum sits
/// on the window edge, the window is widened once before failing.
/// For k = 0 the band is constant and alpha0 := 0 by convention.
MontgomeryBand minimize_band(int k, double half_width = 12.0, int n = 2048);

} // namespace magsob::montgomery
