#pragma once

#include "fbnl/numerics/quadrature.hpp"
#include "fbnl/params.hpp"

#include <vector>

namespace fbnl {

// C_{1,s} = 4^s Gamma(1/2+s) / (sqrt(pi) |Gamma(-s)|).
double kernel_constant(double s);

// d(s) = 2^{1-2s} Gamma(1-s)/Gamma(s): lim y^alpha U_y = -d(s) (-Delta)^s u
// for the extension U of u, with (-Delta)^s normalized by C_{1,s}.
double extension_constant_theory(double s);

// A1 = -(C/2) int ((1+y)_+^beta + (1-y)_+^beta - 2) |y|^{-1-2s} dy, which is
// (-Delta)^s x_+^beta evaluated at x = 1.
QuadValue compute_A1(const Params& params, double tol = 1e-13);

// A2 = -C int_1^inf (y-1)^beta y^{-1-2s} dy. The integral converges
// absolutely (beta - 1 - 2s < -1), so no principal value is involved.
QuadValue compute_A2(const Params& params, double tol = 1e-12);

struct HalfPlaneConstants {
    Params params;
    double kernel_c = 0.0;
    double A1 = 0.0;
    double A2 = 0.0;
    // ((beta - s)/(-beta A1))^{1/(2-gamma)}; the closed-form amplitude.
    double amplitude_A = 0.0;
    // (gamma/(-2 A1))^{1/(2-gamma)}; must agree with amplitude_A.
    double amplitude_A_equivalent = 0.0;
    // Amplitude for which A r^beta g(theta) satisfies the flux condition
    // lim y^alpha U_y = gamma U^{gamma-1} of the energy with the 1/2 factor:
    // (gamma / (d(s) (-A1)))^{1/(2-gamma)}.
    double amplitude_A_flux = 0.0;
    double extension_d = 0.0;
    double quadrature_error_estimate = 0.0;
};

HalfPlaneConstants amplitude_A(const Params& params);

// Uniform samples of a 1D function on [x0, x0 + (N-1) dx] with power-law
// tails u(y) = coef |y|^exponent outside the window.
struct SampledProfile {
    struct Tail {
        bool declared = false;
        double coef = 0.0;
        double exponent = 0.0;
    };

    double x0 = 0.0;
    double dx = 0.0;
    std::vector<double> u;
    Tail left;
    Tail right;

    double xmax() const { return x0 + dx * static_cast<double>(u.size() - 1); }
};

// Principal-value (-Delta)^s at each evaluation point. Local cubic
// interpolation inside the window; the near-field second difference is
// integrated exactly; tails are integrated with Gauss–Jacobi rules.
std::vector<double> frac_laplacian_profile(const SampledProfile& samples, double s,
                                           const std::vector<double>& x);

} // namespace fbnl
