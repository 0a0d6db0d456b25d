#pragma once

#include "magsob/grid.hpp"

#include <functional>
#include <string>

namespace magsob::fields {

/// Catalog of magnetic geometries. Sign convention: B = d1 A2 - d2 A1,
/// chosen so that the power-well potential A = (0, x^{k+1}/(k+1)) carries
/// the field B = x^k (nonnegative on x >= 0). Spectra are invariant under
/// B -> -B, so no generality is lost.
enum class Family {
    constant_field,   // A = b0 (0, x),            B = b0
    power_well,       // A = (0, x^{k+1}/(k+1)),   B = x^k
    radial_well,      // azimuthal gauge,          B = b0 (1 + s |x-x0|^2)
    radial_vanishing, // azimuthal gauge,          B = g0 (r0^2 - |x|^2) / (2 r0)
    translated_power, // power_well shifted to x0
};

struct FieldSpec {
    Family family = Family::constant_field;
    double b0 = 1.0;          // constant_field, radial_well
    int k = 0;                // power_well, translated_power
    Vec2 x0{0.0, 0.0};        // radial_well center, translated_power shift
    double hessian_scale = 1.0; // radial_well: s in B = b0 (1 + s r^2)
    double gamma0 = 1.0;      // radial_vanishing: normal derivative on Gamma
    double r0 = 1.0;          // radial_vanishing: radius of the zero circle

    static FieldSpec constant(double b0);
    static FieldSpec power_well(int k);
    static FieldSpec translated_power(int k, Vec2 x0);
    static FieldSpec radial_well(double b0, Vec2 x0, double hessian_scale = 1.0);
    static FieldSpec radial_vanishing(double gamma0, double r0);
};

/// A(point) for the chosen family.
Vec2 eval_potential(const FieldSpec& spec, Vec2 point);

/// B(point) = d1 A2 - d2 A1, in closed form per family.
double eval_field(const FieldSpec& spec, Vec2 point);

/// Line integral of A along the straight segment from -> to. Exact for the
/// polynomial families; 4-point Gauss-Legendre for the azimuthal-gauge ones
/// (whose radial profile a(r) is itself evaluated by adaptive quadrature
/// of s B(s)).
double line_integral(const FieldSpec& spec, Vec2 from, Vec2 to);

/// Azimuthal-gauge radial profile a(r) with A = a(r) (-sin, cos) around the
/// family's center; exposed for testing against closed forms.
double radial_gauge_profile(const FieldSpec& spec, double r);

/// Location and value of the field minimum for families with a well
/// (constant_field: b0 anywhere, center by convention; radial_well: b0 at x0).
Vec2 well_center(const FieldSpec& spec);
double well_minimum(const FieldSpec& spec);

const char* family_name(Family f);
bool parse_family(const std::string& name, Family& out);

/// Nodewise e^{i phi / h} psi. The phase factor has unit modulus, so all
/// pointwise magnitudes are preserved.
WaveFunction gauge_transform(const WaveFunction& psi, const ScalarField& phi, double h);

} // namespace magsob::fields
