#pragma once

#include "fbnl/grid.hpp"
#include "fbnl/profile.hpp"
#include "fbnl/weighted_solver.hpp"

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace fbnl {

/*! \brief The rotated profile v_R(X) = V_R(R - rho, z), V_R = U (1 + (n-1) t / R),
 *  rho = sqrt(|x'|^2 + (x_n - R)^2).
 *
 *  Points are X = (x', x_n, z) with n + 1 entries. For n = 1 the rotation is
 *  the identity and v_R = U.
 */
struct RadialSubsolution {
    Params params;
    double R = 1.0;
    std::shared_ptr<const Profile> profile;
};

RadialSubsolution make_radial_subsolution(const Params& params, double R,
                                          std::shared_ptr<const Profile> profile);

double eval_VR(const RadialSubsolution& sub, double t, double z);
double eval_vR(const RadialSubsolution& sub, const std::vector<double>& X);

struct SubsolutionReport {
    std::vector<std::array<double, 2>> samples; // (t, z)
    std::vector<double> residual;   // reduced form at sub.R (unreduced for n = 1)
    std::vector<double> unreduced;  // 2(n-1)/R U_t - (n-1)/rho [(1+(n-1)t/R) U_t + (n-1)U/R]
    double min_residual = 0.0;
    double R0 = 0.0;                // smallest R with all reduced residuals >= 0 (bisection)
    double R0_closed = 0.0;         // max over samples of (n+1) t + (n-1) U / U_t
    int bisection_iterations = 0;
    bool trivially_satisfied = false; // n = 1
};

/*! \brief Evaluates [2(R-t) - R - (n-1)t] U_t - (n-1) U on (t, z) samples.
 *
 *  The reduced form is the unreduced expression times R rho / (n-1), so for
 *  n = 1 only the unreduced expression (identically zero) is meaningful.
 *  Samples on {z = 0, t <= 0} are rejected.
 */
SubsolutionReport subsolution_residual(const RadialSubsolution& sub,
                                       const std::vector<std::array<double, 2>>& samples,
                                       double R_max = 1e8);

struct NeumannReport {
    std::vector<double> t;
    std::vector<double> lhs;          // (1 + (n-1)t/R)^{2-gamma} gamma v^{gamma-1}
    std::vector<double> rhs;          // gamma v^{gamma-1}
    std::vector<double> flux;         // (1 + (n-1)t/R) A lambda* t^{beta-2s}
    double min_margin = 0.0;          // min (lhs - rhs) / rhs
    double max_flux_mismatch = 0.0;   // max |flux - lhs| / lhs
};

// Free-boundary side of the subsolution property at (t, 0), t > 0.
NeumannReport neumann_check(const RadialSubsolution& sub, const std::vector<double>& t);

// gamma_R(X) = -|x'|^2 / (2R) + 2(n-1) x_n r / R with r = sqrt(x_n^2 + z^2).
double gamma_R(const Params& params, double R, const std::vector<double>& X);

using PointFnN = std::function<double(const std::vector<double>& X)>;

struct DomainVariationSample {
    std::vector<double> X;
    std::vector<double> roots;
    double w = 0.0;            // smallest root
    bool multivalued = false;
};

struct DomainVariation {
    double epsilon = 0.0;
    std::vector<DomainVariationSample> samples;
    std::vector<int> multivalued_flags; // indices into samples
};

/*! \brief All w in [-1, 1] with U(X) = g(X - eps w e_n), by a uniform scan of
 *  [-1 - 1e-6, 1 + 1e-6] plus bisection on each sign change.
 *
 *  U(X) is the profile at (x_n, z). Throws DomainError when X lies on
 *  {x_n <= 0, z = 0} or when no root exists.
 */
DomainVariationSample domain_variation(const PointFnN& g, const Profile& U_ref, double epsilon,
                                       const std::vector<double>& X, int scan = 400);

DomainVariation domain_variation(const PointFnN& g, const Profile& U_ref, double epsilon,
                                 const std::vector<std::vector<double>>& points,
                                 int scan = 400);

// Points (spacing * integer, ..., spacing * (k + 1/2)) with |X| <= radius, z > 0.
std::vector<std::vector<double>> half_ball_lattice(int n, double radius, double spacing);

struct RotationSweep {
    std::vector<double> R;
    std::vector<double> C;        // sup |w - gamma_R| R^2 / |X|^2
    std::vector<double> C_linear; // sup |w - gamma_R| R / |X|^2 (first-order scale)
    double drift = 0.0;           // max over consecutive R of C_{k+1} / C_k - 1
    int samples = 0;
};

/*! \brief Domain variation of U against v_R (eps = 1) on a lattice in the
 *  half-ball of radius 1/2, z > 0, compared with gamma_R for each R. */
RotationSweep rotation_sweep(const Params& params, std::shared_ptr<const Profile> profile,
                             const std::vector<double>& radii, double spacing = 0.1);

struct LinearizedResult {
    Field w;
    int floored_faces = 0;
    double interior_residual = 0.0; // max |K w| / max sum_f c_f (|w_k| + |w_nbr|) over free nodes
    double b = 0.0;                 // fitted radial coefficient at the origin
    double fit_c = 0.0;             // coefficient of r^{1+theta}
    double fit_theta = 0.0;
    std::vector<double> fit_r;
    std::vector<double> fit_w;      // angular means of w(r, .) - w(0)
    SolveStats stats;
};

/*! \brief Minimizer of int y^alpha U_t^2 |grad w|^2 with Dirichlet data on
 *  the top and sides and the natural condition on y = 0.
 *
 *  Face conductances are those of weighted_solver times U_t^2 at the face
 *  center, floored at 1e-30 (floored faces are counted).
 */
LinearizedResult solve_linearized(std::shared_ptr<const Grid2D> grid, const Profile& profile,
                                  const std::function<double(double, double)>& data,
                                  const SolverOptions& opts = {LinearMethod::Direct, 1e-12,
                                                               200000});

/*! Least-squares fit of mean over angles of w(r, .) - w(0) = b r + c r^{1+theta}
 *  over geometric radii in [r_min, r_max]; theta in [0.1, 2] by golden section
 *  on the residual. */
void fit_radial_coefficient(LinearizedResult& res, double r_min, double r_max, int count = 12);

struct RefinementCheck {
    std::array<double, 2> window_coarse{}; // fit radii [r_min, r_max]
    std::array<double, 2> window_fine{};
    double b_coarse = 0.0;
    double b_fine = 0.0;
    double noise = 0.0;  // |b_coarse - b_fine|
    bool pass = false;   // |b_fine| <= 10 noise
};

/*! \brief b on [-1, 1] x [0, 1] at two resolutions.
 *
 *  The coarse fit uses radii [4 h, 32 h]. With self_similar the fine window
 *  shrinks with h, so the fixed-window bias of the truncated expansion is part
 *  of the noise floor; otherwise the coarse window is reused.
 */
RefinementCheck linearized_refinement(const Profile& profile,
                                      const std::function<double(double, double)>& data,
                                      int n_coarse, int n_fine, bool self_similar = true);

} // namespace fbnl
