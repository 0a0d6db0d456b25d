#pragma once

#include "magsob/lattice.hpp"

#include <utility>
#include <vector>

namespace magsob::partition {

/// Parameters of the quadratic partition of unity: cells of period
/// 2 h^rho + h^alpha, plateau half-width h^rho, transition width h^alpha,
/// translated by tau. Requires alpha >= rho > 0 and h > 0.
struct PartitionSpec {
    double alpha = 7.0 / 16.0;
    double rho = 5.0 / 16.0;
    double h = 0.1;
    Vec2 tau{0.0, 0.0};
    std::array<double, 4> extent{-1.0, 1.0, -1.0, 1.0}; // xmin xmax ymin ymax
};

/// One active cutoff at a point.
struct CutoffValue {
    std::array<int, 2> cell;
    double chi;
    Vec2 grad;
};

/// Evaluator of all cutoffs chi^[l] and their gradients. The 1D profile is a
/// C^2 polynomial smoothstep, equal to 1 on |x| <= h^rho + h^alpha/2 and 0 on
/// |x| >= h^rho + h^alpha; cells are tensor products normalized by sqrt(S)
/// so that sum_l (chi^[l])^2 = 1 everywhere.
class Partition {
public:
    explicit Partition(const PartitionSpec& spec);

    const PartitionSpec& spec() const { return spec_; }
    double period() const { return period_; }
    double plateau_half_width() const { return plateau_; }        // h^rho
    double support_half_width() const { return support_; }        // h^rho + h^alpha
    Vec2 cell_center(std::array<int, 2> cell) const;

    /// All cutoffs that are nonzero at the point (at most 4 generically).
    std::vector<CutoffValue> eval(Vec2 point) const;

    double sum_of_squares(Vec2 point) const;   // = 1 up to rounding
    double sum_of_grad_squares(Vec2 point) const;

    /// Cells whose support intersects the spec extent.
    std::vector<std::array<int, 2>> cells_in_extent() const;

private:
    PartitionSpec spec_;
    double period_, plateau_, support_, transition_;

    double profile(double x) const;
    double profile_derivative(double x) const;
};

/// Lemma-style grid translation selection: scans shifts j delta e with
/// e = (1,1)/sqrt(2), j in {0, ..., floor(r / (2 delta)) + 1}, and returns
/// the shift minimizing the f-mass within distance delta of the translated
/// grid Lambda_r, together with that mass fraction. Throws if even the best
/// shift exceeds the 3 delta / (r + 2 delta) budget.
std::pair<Vec2, double> select_translation(double r, double delta, const ScalarField& f);

/// Same scan, but returns all fractions (diagnostics / brute-force checks).
std::vector<double> translation_scan(double r, double delta, const ScalarField& f);

struct RecoverySlacks {
    double lower = 0.0;       // ||psi||_p^p - sum_l ||chi_l psi||_p^p
    double upper = 0.0;       // (1 + 3 h^{alpha-rho}) sum_l ||chi_l psi||_p^p - ||psi||_p^p
    double empirical_c = 0.0; // smallest C making the upper inequality tight
};

/// L^p recovery inequalities with the hard-coded constant C = 3.
RecoverySlacks lp_recovery_check(const Partition& part, const WaveFunction& psi, double p);

struct ImsParts {
    double localized_sum = 0.0;    // sum_l Q(chi_l psi)
    double gradient_penalty = 0.0; // h^2 sum_l || |grad chi_l| psi ||_2^2
};

/// Both sides of the IMS decomposition; localized_sum - gradient_penalty
/// equals Q(psi) up to the discretization error.
ImsParts ims_decompose(const Partition& part, const lattice::LinkPhases& links,
                       const WaveFunction& psi);

} // namespace magsob::partition
