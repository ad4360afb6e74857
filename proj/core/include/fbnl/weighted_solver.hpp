#pragma once

#include "fbnl/grid.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace fbnl {

// Face conductances of the five-point flux-form operator.
// cx[j*nx + i] couples (i,j)-(i+1,j); cy[j*(nx+1) + i] couples (i,j)-(i,j+1).
struct Conductances {
    std::vector<double> cx;
    std::vector<double> cy;
};

Conductances weighted_conductances(const Grid2D& grid);

enum class LinearMethod { PCG, Direct };

struct SolverOptions {
    LinearMethod method = LinearMethod::PCG;
    double rel_tol = 1e-10;
    int max_iter = 200000;
};

struct SolveStats {
    int iterations = 0;
    double rel_residual = 0.0;
    std::vector<double> residual_history; // every 50 iterations
};

/*! \brief Solves K u = rhs on nodes with fixed[k] == 0; other entries of u
 *  are held at their given values.
 *
 *  K is the graph Laplacian of the conductances; PCG uses diagonal scaling.
 */
SolveStats solve_conductance_system(const Grid2D& grid, const Conductances& c,
                                    const std::vector<char>& fixed, std::vector<double>& u,
                                    const std::vector<double>& rhs, const SolverOptions& opts);

/*! \brief Sparse LDL^T factorization of K restricted to the free nodes.
 *
 *  Reusable across right-hand sides and fixed-node values with the same mask.
 */
class FactoredSystem {
public:
    FactoredSystem(const Grid2D& grid, const Conductances& c, std::vector<char> fixed);
    ~FactoredSystem();
    FactoredSystem(FactoredSystem&&) noexcept;
    FactoredSystem& operator=(FactoredSystem&&) noexcept;

    // Overwrites the free entries of u; returns the relative residual.
    double solve(std::vector<double>& u, const std::vector<double>& rhs) const;
    int free_count() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// (K u)_k for every node (boundary nodes included).
std::vector<double> apply_conductances(const Grid2D& grid, const Conductances& c,
                                       const std::vector<double>& u);

struct BoundarySpec {
    BottomCondition bottom = BottomCondition::Dirichlet;
    // Top, sides, and (for Dirichlet) bottom values.
    std::function<double(double x, double y)> dirichlet;
    // Prescribed lim y^alpha u_y on the bottom (Flux).
    std::function<double(double x)> flux;
    // FreeBoundary: per-bottom-node flux of the current linearization and the
    // nodes pinned to zero.
    std::vector<double> bottom_flux_values;
    std::vector<char> bottom_contact;
};

Field solve_mixed(std::shared_ptr<const Grid2D> grid, const BoundarySpec& bc,
                  const SolverOptions& opts = {}, SolveStats* stats = nullptr);

struct BottomFlux {
    std::vector<double> x;
    std::vector<double> flux;          // (u1 - u0) 2s / y1^{2s}
    std::vector<double> flux_two_term; // fit of c1 y^{2s} + c2 y^2 through y1, y2
    double max_disagreement = 0.0;     // relative to max |flux_two_term|
    bool resolved = true;
};

BottomFlux bottom_flux(const Field& field, double resolve_tol = 0.02);

// 1/2 sum over faces of conductance * difference^2.
double dirichlet_energy(const Field& field);

// sum_i dual_x_i u(x_i,0)^gamma (indicator of u > 0 when gamma = 0).
double trace_energy(const Field& field);

struct ExtensionReport {
    Params params;
    double window = 1.0;
    std::vector<double> x;
    std::vector<double> flux;
    std::vector<double> frac_laplacian;
    std::vector<double> ratio;
    double d_fit = 0.0;   // mean of flux / (-(-Delta)^s u); NaN when gamma = 0
    double d_spread = 0.0;
    double d_theory = 0.0;
    double flux_rel_error = 0.0;  // against lambda* x^{beta-2s}
    double max_abs_flux = 0.0;
    double max_two_term_disagreement = 0.0;
};

// Extension of x_+^beta on [-window, window] x [0, window] with the
// half-plane profile as boundary data; bottom flux compared with the
// principal-value fractional Laplacian at x in [0.2, 0.8] * window.
ExtensionReport extension_crosscheck(const Params& params, double window = 1.0, int nx = 256,
                                     int ny = 256);

} // namespace fbnl
