#include "fbnl/grid.hpp"

#include "fbnl/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fbnl {

double default_grading(const Params& params) { return std::max(1.0, 1.0 / (2.0 * params.s)); }

Grid2D build_grid(int nx, int ny, double Lx, double Ly, double q, const Params& params)
{
    return build_grid_range(nx, ny, -Lx, Lx, Ly, q, params);
}

Grid2D build_grid_range(int nx, int ny, double xmin, double xmax, double Ly, double q,
                        const Params& params)
{
    if (nx < 8 || ny < 8)
        throw ParameterError("build_grid: nx and ny must be at least 8");
    if (!(xmax > xmin) || !(Ly > 0.0) || !std::isfinite(xmax - xmin) || !std::isfinite(Ly)) {
        std::ostringstream os;
        os << "build_grid: degenerate extents [" << xmin << ", " << xmax << "] x [0, " << Ly
           << "]";
        throw ParameterError(os.str());
    }
    if (!(q >= 1.0))
        throw ParameterError("build_grid: grading exponent q must be >= 1");

    Grid2D g;
    g.nx = nx;
    g.ny = ny;
    g.xmin = xmin;
    g.xmax = xmax;
    g.Ly = Ly;
    g.q = q;
    g.params = params;
    g.hx = (xmax - xmin) / nx;

    g.x.resize(nx + 1);
    for (int i = 0; i <= nx; ++i)
        g.x[i] = xmin + i * g.hx;
    g.x.back() = xmax;

    const double s2 = 2.0 * params.s;
    const double ap1 = 1.0 + params.alpha;
    g.y.resize(ny + 1);
    g.Y.resize(ny + 1);
    for (int j = 0; j <= ny; ++j) {
        g.y[j] = Ly * std::pow(static_cast<double>(j) / ny, q);
        g.Y[j] = std::pow(g.y[j], s2);
    }
    g.y.back() = Ly;
    g.Y.back() = std::pow(Ly, s2);

    g.wx.resize(ny + 1);
    for (int j = 0; j <= ny; ++j) {
        const double a = (j == 0) ? 0.0 : 0.5 * (g.y[j - 1] + g.y[j]);
        const double b = (j == ny) ? Ly : 0.5 * (g.y[j] + g.y[j + 1]);
        g.wx[j] = (std::pow(b, ap1) - std::pow(a, ap1)) / ap1;
    }
    g.wy.resize(ny);
    for (int j = 0; j < ny; ++j)
        g.wy[j] = s2 / (g.Y[j + 1] - g.Y[j]);

    g.dual_x.assign(nx + 1, g.hx);
    g.dual_x.front() = g.dual_x.back() = 0.5 * g.hx;
    return g;
}

int Grid2D::cell_x(double xv) const
{
    const int i = static_cast<int>(std::floor((xv - xmin) / hx));
    return std::clamp(i, 0, nx - 1);
}

int Grid2D::cell_y(double yv) const
{
    if (yv <= 0.0)
        return 0;
    int j = static_cast<int>(std::floor(ny * std::pow(yv / Ly, 1.0 / q)));
    j = std::clamp(j, 0, ny - 1);
    while (j > 0 && yv < y[j])
        --j;
    while (j < ny - 1 && yv > y[j + 1])
        ++j;
    return j;
}

bool Grid2D::contains(double xv, double yv, double slack) const
{
    const double sx = slack * (xmax - xmin), sy = slack * Ly;
    return xv >= xmin - sx && xv <= xmax + sx && yv >= -sy && yv <= Ly + sy;
}

Field::Field(std::shared_ptr<const Grid2D> g, double fill)
    : grid(std::move(g)), values(static_cast<std::size_t>(grid->size()), fill)
{
}

Field::Local Field::local(double xv, double yv) const
{
    const Grid2D& g = *grid;
    const int i = g.cell_x(xv), j = g.cell_y(yv);
    const double xi = (xv - g.x[i]) / g.hx;
    const double dY = g.Y[j + 1] - g.Y[j];
    const double eta = (std::pow(std::max(yv, 0.0), 2.0 * g.params.s) - g.Y[j]) / dY;
    const double u00 = at(i, j), u10 = at(i + 1, j), u01 = at(i, j + 1), u11 = at(i + 1, j + 1);
    Local l;
    l.value = (1.0 - xi) * (1.0 - eta) * u00 + xi * (1.0 - eta) * u10 + (1.0 - xi) * eta * u01 +
              xi * eta * u11;
    l.ux = ((1.0 - eta) * (u10 - u00) + eta * (u11 - u01)) / g.hx;
    l.uY = ((1.0 - xi) * (u01 - u00) + xi * (u11 - u10)) / dY;
    return l;
}

Field rescale_field(const Field& u, double lambda, double x0)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw ParameterError("rescale_field: lambda must be positive");
    const Grid2D& g = *u.grid;
    auto ng = std::make_shared<Grid2D>(build_grid_range(g.nx, g.ny, x0 + (g.xmin - x0) / lambda,
                                                        x0 + (g.xmax - x0) / lambda,
                                                        g.Ly / lambda, g.q, g.params));
    Field out(ng);
    const double scale = std::pow(lambda, -g.params.beta);
    for (std::size_t k = 0; k < u.values.size(); ++k)
        out.values[k] = scale * u.values[k];
    out.bottom = u.bottom;
    out.nonnegative = u.nonnegative;
    return out;
}

Field rescale_field_onto(const Field& u, double lambda, double x0,
                         std::shared_ptr<const Grid2D> target)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw ParameterError("rescale_field_onto: lambda must be positive");
    const double scale = std::pow(lambda, -u.grid->params.beta);
    Field out(target);
    for (int j = 0; j <= target->ny; ++j) {
        for (int i = 0; i <= target->nx; ++i) {
            const double xs = x0 + lambda * (target->x[i] - x0);
            const double ys = lambda * target->y[j];
            if (!u.grid->contains(xs, ys)) {
                std::ostringstream os;
                os << "rescale_field_onto: node (" << target->x[i] << ", " << target->y[j]
                   << ") pulls back to (" << xs << ", " << ys << "), outside the source grid";
                throw DomainError(os.str());
            }
            out.at(i, j) = scale * u.eval(std::clamp(xs, u.grid->xmin, u.grid->xmax),
                                          std::clamp(ys, 0.0, u.grid->Ly));
        }
    }
    out.bottom = u.bottom;
    out.nonnegative = u.nonnegative;
    return out;
}

} // namespace fbnl
