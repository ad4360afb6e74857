#pragma once

#include "fbnl/params.hpp"

#include <vector>

namespace fbnl {

/*! \brief Frobenius series theta^sigma * sum_j a_j theta^(2j) for the angular ODE
 *  g'' + alpha cot(theta) g' + k g = 0 near theta = 0 (and, by the symmetry
 *  theta -> pi - theta, near theta = pi).
 */
struct FrobeniusSeries {
    double sigma = 0.0;
    std::vector<double> a;

    double value(double th) const;
    double deriv(double th) const;
};

FrobeniusSeries frobenius_series(double alpha, double k, double sigma, int terms);

/*! \brief Angular profile g of the half-plane solution U = A r^beta g(theta).
 *
 *  Normalized by g(0) = 1, g(pi) = 0. Near the endpoints g is represented by
 *  the two Frobenius branches (exponents 0 and 2s); in between by quintic
 *  Hermite interpolation of an adaptive integration.
 */
struct Profile {
    Params params;
    std::vector<double> theta_nodes; // endpoint-refined, inside (0, pi)
    std::vector<double> g_values;
    std::vector<double> g_prime;
    double amplitude = 1.0;
    double measured_slope = 0.0;    // lim g'(theta) sin(theta)^alpha at 0, equals 2s*c
    double singular_coeff = 0.0;    // c in g = 1 + c theta^{2s} + ...
    double pi_regular_coeff = 0.0;  // residual regular coefficient at pi, equals g(pi)
    double pi_singular_coeff = 0.0; // d1 in g = d1 (pi - theta)^{2s} + ...
    int shooting_iterations = 0;

    double series_offset = 0.5;
    FrobeniusSeries regular;
    FrobeniusSeries singular;
    double grid_h = 0.0;
    std::vector<double> grid_theta;
    std::vector<double> grid_g;
    std::vector<double> grid_dg;
    std::vector<double> grid_d2g;
    std::vector<double> grid_d3g;

    double k() const { return params.beta * (params.alpha + params.beta); }
    double g(double theta) const;
    double dg(double theta) const;
    double d2g(double theta) const; // from the ODE, for theta in (0, pi)
};

Profile solve_profile(const Params& params);

Profile with_amplitude(Profile p, double amplitude);

// order 0: U(t,z); order 1: dU/dt. Throws DomainError for z < 0 and for the
// derivative at the origin.
double eval_halfplane(const Profile& profile, double t, double z, int order = 0);

// dU/dz, the companion of the order-1 value.
double eval_halfplane_dz(const Profile& profile, double t, double z);

struct AngularTable {
    std::vector<double> theta;
    std::vector<double> value;
    double limit_0 = 0.0;     // closed-form endpoint limits
    double limit_pi = 0.0;
    double numeric_0 = 0.0;   // evaluated at theta_probe_0 through the series
    double numeric_pi = 0.0;  // evaluated at pi - theta_probe_pi
    double theta_probe_0 = 0.0;
    double theta_probe_pi = 0.0;
    double min_value = 0.0;
    double sup_abs = 0.0;
};

// f(theta) = beta cos(theta) - g' sin(theta)/g; equals r U_t / U.
double f_at(const Profile& profile, double theta);

// r^2 U_tt / U in the cot-substituted form.
double F_at(const Profile& profile, double theta);

AngularTable compute_f(const Profile& profile);
AngularTable compute_F(const Profile& profile);

struct RatioSample {
    double t = 0.0;
    double tau = 0.0;
    double z = 0.0;
};

struct RatioReport {
    double max_ratio = 0.0;
    std::size_t samples = 0;
    std::vector<std::size_t> ordering_violations;
};

// Ratios U(tau/r, z/r) / U(t/r, z/r), r = |(t,z)|, with the monotone
// ordering g(theta1) <= g(theta2) checked when both angles lie within
// `near_pi` of pi.
RatioReport check_ratio_bound(const Profile& profile, const std::vector<RatioSample>& samples,
                              double near_pi = 0.5);

// Max |g'' + alpha cot g' + k g| over n Chebyshev points of [lo, pi - lo], with
// g'' from a fourth-order difference of g'.
double max_ode_residual(const Profile& profile, int n = 64, double lo = 0.01);

// Max over nodes of |g'(theta) sin^alpha - (lambda* - k int_0^theta sin^alpha g)|.
double max_slope_identity_error(const Profile& profile);

} // namespace fbnl
