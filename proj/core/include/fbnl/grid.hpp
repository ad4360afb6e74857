#pragma once

#include "fbnl/params.hpp"

#include <array>
#include <memory>
#include <vector>

namespace fbnl {

/*! \brief Tensor mesh on [xmin, xmax] x [0, Ly], uniform in x and graded in y
 *  as y_j = Ly (j/ny)^q.
 *
 *  Face tables: wx[j] is the exact integral of y^alpha over the dual span of
 *  row j (the conductance of x-faces times hx); wy[j] = 2s / (y_{j+1}^{2s} -
 *  y_j^{2s}) is the inverse of the exact integral of y^{-alpha} over
 *  [y_j, y_{j+1}], which puts c0 + c1 y^{2s} in the discrete kernel.
 */
struct Grid2D {
    int nx = 0;
    int ny = 0;
    double xmin = 0.0;
    double xmax = 0.0;
    double Ly = 0.0;
    double q = 1.0;
    Params params;

    double hx = 0.0;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> Y;      // y^{2s}
    std::vector<double> wx;     // per row, size ny+1
    std::vector<double> wy;     // per interval, size ny
    std::vector<double> dual_x; // per column, size nx+1

    int stride() const { return nx + 1; }
    int size() const { return (nx + 1) * (ny + 1); }
    int idx(int i, int j) const { return j * (nx + 1) + i; }
    double Lx() const { return 0.5 * (xmax - xmin); }
    double x_center() const { return 0.5 * (xmin + xmax); }

    // Cell (i, j) with x_i <= x <= x_{i+1}, y_j <= y <= y_{j+1}, clamped.
    int cell_x(double xv) const;
    int cell_y(double yv) const;
    bool contains(double xv, double yv, double slack = 1e-12) const;
};

double default_grading(const Params& params);

Grid2D build_grid(int nx, int ny, double Lx, double Ly, double q, const Params& params);

Grid2D build_grid_range(int nx, int ny, double xmin, double xmax, double Ly, double q,
                        const Params& params);

enum class BottomCondition { Dirichlet, Flux, FreeBoundary };

/*! \brief Node values on a grid.
 *
 *  Inside a cell the field is reconstructed bilinearly in (x, y^{2s}), so
 *  traces are piecewise linear and c0 + c1 y^{2s} is represented exactly.
 */
struct Field {
    std::shared_ptr<const Grid2D> grid;
    std::vector<double> values;
    BottomCondition bottom = BottomCondition::Dirichlet;
    bool nonnegative = false;

    Field() = default;
    explicit Field(std::shared_ptr<const Grid2D> g, double fill = 0.0);

    double& at(int i, int j) { return values[grid->idx(i, j)]; }
    double at(int i, int j) const { return values[grid->idx(i, j)]; }

    struct Local {
        double value = 0.0;
        double ux = 0.0;
        double uY = 0.0; // derivative in Y = y^{2s}; u_y = uY * 2s y^{2s-1}
    };
    Local local(double x, double y) const;
    double eval(double x, double y) const { return local(x, y).value; }
    double trace(double x) const { return eval(x, 0.0); }
};

template <class Fn>
Field sample_field(std::shared_ptr<const Grid2D> grid, Fn&& fn)
{
    Field f(grid);
    for (int j = 0; j <= grid->ny; ++j)
        for (int i = 0; i <= grid->nx; ++i)
            f.at(i, j) = fn(grid->x[i], grid->y[j]);
    return f;
}

// u_lambda(X) = lambda^{-beta} u(x0 + lambda (X - x0)) on the affinely
// mapped grid (node-exact, no interpolation).
Field rescale_field(const Field& u, double lambda, double x0);

// Same map, interpolated onto a given target grid. Throws DomainError when
// a target node pulls back outside the source grid.
Field rescale_field_onto(const Field& u, double lambda, double x0,
                         std::shared_ptr<const Grid2D> target);

} // namespace fbnl
