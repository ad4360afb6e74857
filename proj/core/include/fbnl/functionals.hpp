#pragma once

#include "fbnl/grid.hpp"
#include "fbnl/profile.hpp"

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace fbnl {

using PointFn = std::function<double(double x, double y)>;

/*! Pieces of the Weiss energy on the half-ball of radius R about (x0, 0). */
struct WeissParts {
    double dirichlet = 0.0; // int_{B_R^+} y^alpha |grad u|^2
    double trace = 0.0;     // int_{x0-R}^{x0+R} u(x,0)^gamma
    double surface = 0.0;   // int_{(dB_R)^+} y^alpha u^2 dsigma
    double value = 0.0;     // W(R, u)
};

// Throws DomainError when the half-ball leaves the grid.
WeissParts weiss_parts(const Field& u, double x0, double R);

double weiss(const Field& u, double x0, double R);

// int_{(dB_R)^+} y^alpha (u_nu - beta u / R)^2 dsigma.
double homogeneity_defect(const Field& u, double x0, double R);

// int_{B_R^+} y^alpha |grad u|^2 with exact integration on cells inside the
// disk and breakpoint-split quadrature on cut cells.
double weighted_dirichlet_in_ball(const Field& u, double x0, double R);

// int_{x0-R}^{x0+R} u(x,0)_+^gamma (indicator when gamma = 0), exact on the
// piecewise-linear trace.
double trace_penalty_in_ball(const Field& u, double x0, double R);

/*! \brief int_0^pi (R sin t)^alpha F(t) R dt, split at the grid-line crossings
 *  of the circle; the end pieces use Gauss–Jacobi rules for the sin^alpha
 *  endpoint behavior.
 */
double weighted_arc_integral(const std::vector<const Grid2D*>& grids, double alpha, double x0,
                             double R, const std::function<double(double theta)>& F);

struct FunctionalSweep {
    std::vector<double> radii;
    std::vector<double> values;
    std::vector<double> forward_differences; // per interval, (V_{k+1}-V_k)/(R_{k+1}-R_k)
    std::vector<double> tolerances;          // per interval
    std::vector<double> defects;             // Weiss only: homogeneity defect per radius
    int violation_count = 0;
    double tol_mono = 0.0;                   // the largest per-interval tolerance
    double tol_constant = 1.0;
};

/*! \brief W over increasing radii.
 *
 *  An interval is a violation when its slope is below -tol, with
 *  tol = C * (h / R) * E_R / R, h the x-spacing and E_R = R^{-kappa_vol} times
 *  the weighted Dirichlet energy in B_R (the gradient-norm scale of W).
 */
FunctionalSweep weiss_sweep(const Field& u, double x0, const std::vector<double>& radii,
                            double tol_constant = 1.0);

// M(R, u, p) = R^{-kappa_surf} int_{(dB_R)^+} y^alpha (u - p)^2 dsigma.
double monneau(const Field& u, const PointFn& p, double x0, double R);
double monneau(const Field& u, const Field& p, double x0, double R);
// p(x, y) = U(nu (x - x0), y) with the profile's amplitude.
double monneau(const Field& u, const Profile& p, double x0, double R, int nu = 1);

/*! Monneau over increasing radii; tol = C (h/R)^2 N_R / R with
 *  N_R = R^{-kappa_surf} int y^alpha (u^2 + p^2) dsigma (M is quadratic in
 *  the discretization error, hence the square). */
FunctionalSweep monneau_sweep(const Field& u, const Profile& p, double x0, int nu,
                              const std::vector<double>& radii, double tol_constant = 1.0);

struct BlowupReport {
    std::vector<double> radii;          // accepted radii, decreasing
    std::vector<double> rejected_radii; // outside the domain or below resolution
    bool truncated = false;
    std::vector<Field> rescaled;        // on the common reference grid
    std::vector<double> successive_distances;
    int best_orientation = 1;           // nu of the best-fit A U(nu x, y)
    double final_distance = 0.0;        // surface L2 distance to the best fit
    double final_relative_distance = 0.0;
};

/*! \brief u_r(X) = r^{-beta} u(x0 + r (X - x0)) on [x0-1, x0+1] x [0, 1].
 *
 *  Radii whose ball leaves the grid, or with r < 8 hx, are rejected; a
 *  rejection below resolution truncates the sequence. Distances are the
 *  weighted L2 norm on the unit half-circle.
 */
BlowupReport blowup_sequence(const Field& u, double x0, const std::vector<double>& r_list,
                             const Profile& candidate, int ref_n = 64);

struct NormalFit {
    double angle = 0.0;  // radians, of the unit normal pointing into {u > 0}
    double amplitude = 0.0;
    double residual = 0.0; // relative L2 misfit on the unit disk
};

/*! Least-squares fit of A ((X - x0) . nu)_+^beta to r^{-beta} trace(x0 + r X)
 *  on the unit disk. */
NormalFit fit_halfplane_normal_2d(const std::function<double(double, double)>& trace,
                                  std::array<double, 2> x0, double r, double beta,
                                  int resolution = 81);

} // namespace fbnl
