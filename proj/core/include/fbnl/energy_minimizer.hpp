#pragma once

#include "fbnl/grid.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace fbnl {

struct MinimizeConfig {
    std::vector<double> delta_schedule; // strictly decreasing, positive
    int max_outer = 400;                // per stage
    double descent_tol = 1e-13;         // relative energy decrease that ends a stage
    double fb_threshold = 0.0;          // trace level defining {u > 0}
    int max_active_set = 200;           // inner active-set iterations
    bool fb_search = true;              // explicit moves of the contact-set boundary
    int max_fb_moves = 400;
};

// Schedule scale * 10^{-4}, ..., scale * 10^{-9}; fb_threshold = 10 * floor.
MinimizeConfig default_minimize_config(double trace_scale);

void validate(const MinimizeConfig& cfg);

struct EnergyLogEntry {
    int stage = 0;
    double delta = 0.0;
    int outer = 0;              // negative: accepted contact-boundary move
    double energy_reg = 0.0;    // Dirichlet part + sum dual_x (u + delta)^gamma
    double energy = 0.0;        // Dirichlet part + sum dual_x u^gamma
    int contact_nodes = 0;
    int active_set_iterations = 0;
};

struct MinimizeResult {
    Field field;
    std::vector<EnergyLogEntry> log;
    double energy = 0.0;
    double dirichlet_part = 0.0;
    double trace_part = 0.0;
};

/*! \brief Minimizes the discrete J_gamma over nonnegative fields with
 *  Dirichlet data on the top and sides.
 *
 *  The bottom values are the unknowns; interior values are the discrete
 *  weighted-harmonic extension. Each outer step replaces (u + delta)^gamma by
 *  its tangent at the current iterate (a majorant, since the penalty is
 *  concave) and solves the resulting bound-constrained quadratic problem
 *  exactly by a primal-dual active set on the Dirichlet-to-Neumann matrix.
 *  Initial bottom values are max(0, data(x, 0)) unless `initial` is given.
 *  After the last stage, contact-boundary nodes are moved one at a time while
 *  that lowers the regularized energy.
 */
MinimizeResult minimize_energy(std::shared_ptr<const Grid2D> grid,
                               const std::function<double(double, double)>& data,
                               const MinimizeConfig& cfg, const Field* initial = nullptr);

// J_gamma of a field: dirichlet_energy + trace_energy.
double discrete_energy(const Field& field);

struct GrowthFit {
    double x0 = 0.0;
    double slope = 0.0;
    double intercept = 0.0; // exp(intercept) is the constant surrogate
    std::vector<double> radii;
    std::vector<double> sup_values;
};

struct FreeBoundaryReport {
    std::vector<double> fb_points;
    std::vector<int> fb_orientation; // +1 when u > 0 to the right of the point
    double contact_measure = 0.0;
    double trace_length = 0.0;
    std::vector<double> density_radii;
    std::vector<std::vector<double>> density_ratios; // [point][radius]
    double density_inf = 1.0;
    std::vector<GrowthFit> growth_fit;
};

FreeBoundaryReport extract_free_boundary(const Field& field, const MinimizeConfig& cfg);

// Length of {u(., 0) <= threshold} within [a, b] with linear partial-cell correction.
double contact_length(const Field& field, double a, double b, double threshold);

std::vector<GrowthFit> measure_nondegeneracy(const Field& field, FreeBoundaryReport& report,
                                             const std::vector<double>& radii);

std::vector<std::vector<double>> measure_density(const Field& field, FreeBoundaryReport& report,
                                                 const std::vector<double>& radii,
                                                 double threshold);

struct FlatnessScale {
    double scale = 0.0;
    double epsilon = 0.0;
    std::array<double, 2> normal{1.0, 0.0};
};

// One-dimensional trace: the normal is +1 or -1, whichever is flatter.
std::vector<FlatnessScale> measure_flatness(const Field& field, double x0,
                                            const std::vector<double>& scales, double threshold);

/*! \brief Flatness of a planar trace u(x1, x2) at x0 over the given scales.
 *
 *  With fit_normal the direction is chosen per scale to minimize epsilon
 *  (coarse angle scan plus golden-section refinement); otherwise e_2 is used.
 */
std::vector<FlatnessScale> measure_flatness_2d(
    const std::function<double(double, double)>& trace, std::array<double, 2> x0,
    const std::vector<double>& scales, double threshold, bool fit_normal, int resolution = 161);

} // namespace fbnl
