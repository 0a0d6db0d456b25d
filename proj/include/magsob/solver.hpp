#pragma once

#include "magsob/lattice.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace magsob::solver {

enum class InitialGuess {
    linear_ground_state, // warm start from the p = 2 eigenvector
    gaussian_at_well,    // Gaussian of magnetic-length width at the well
    random_seeded,       // seeded complex Gaussian field
};

struct SolveOptions {
    int max_iterations = 40000;
    double gradient_tolerance = 1e-12; // descent stagnation guard
    double el_tolerance = 1e-6;        // relative Euler-Lagrange residual target
    InitialGuess initial_guess = InitialGuess::linear_ground_state;
    // backtracking step-size policy
    double backtrack_shrink = 0.5;
    double backtrack_grow = 1.1;
    int max_backtracks = 60;
    std::uint64_t seed = 1234;
    int num_starts = 3;                // multi-start count for p > 2
    Vec2 well_center{0.0, 0.0};        // gaussian_at_well location
    double well_field = 1.0;           // b0 used for the gaussian width
    const WaveFunction* warm_start = nullptr; // overrides the guess policy

    SolveOptions() = default;
};

struct RayleighResult {
    double lambda = 0.0;
    WaveFunction psi;          // lp_norm(psi, p) = 1
    double el_residual = 0.0;  // ||H psi - lambda |psi|^{p-2} psi||_2 / ||H psi||_2
    int iterations = 0;
    bool converged = false;
    double multistart_spread = 0.0; // max relative lambda disagreement across starts
};

/// Smallest eigenpair of the Hermitian discrete operator via shifted inverse
/// iteration with matrix-free conjugate-gradient inner solves.
RayleighResult linear_ground_state(const lattice::LinkPhases& links, const SolveOptions& opts);

/// Constrained minimization of Q(psi) over the L^p unit sphere by projected
/// gradient descent with backtracking (Barzilai-Borwein trial steps). The
/// Rayleigh quotient is nonincreasing along accepted steps. p = 2 dispatches
/// to linear_ground_state. Requires p >= 2.
RayleighResult minimize_rayleigh(const lattice::LinkPhases& links, double p, const SolveOptions& opts);

/// Whole-plane model constant lambda^[k](p), approximated on the square
/// [-T, T]^2 with Dirichlet boundary, h = 1 and the k-th power-well
/// potential. The protocol runs truncations (T, 1.5T) at two resolutions and
/// reports the finest value plus a spread diagnostic.
struct ModelConstantReport {
    double lambda = 0.0; // finest run
    double spread = 0.0; // (max - min) / lambda over the protocol runs
    bool truncation_converged = false; // spread <= 5%
    std::vector<double> values;        // per (T, resolution) combination
    RayleighResult finest;
};

ModelConstantReport model_constant(int k, double p, double truncation, int resolution,
                                   const SolveOptions& opts = SolveOptions());

/// mu(b, c1, c2, p): constrained minimum for the sheet potential
/// A = (-b t + c1 s t + c2 t^2 / 2, 0) on a truncated plane, h = 1.
/// Requires c2 != 0, p >= 2.
double min_param_constant(double b, double c1, double c2, double p, double truncation,
                          int resolution, const SolveOptions& opts = SolveOptions());

/// Seeded complex Gaussian state, normalized in L^p.
WaveFunction random_state(const DomainPtr& domain, std::uint64_t seed, double p = 2.0);

/// Gaussian bump exp(-|x - c|^2 / (2 sigma^2)) with sigma = sqrt(h / b0),
/// normalized in L^p.
WaveFunction gaussian_state(const DomainPtr& domain, Vec2 center, double h, double b0, double p = 2.0);

} // namespace magsob::solver
