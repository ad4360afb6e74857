#include "fbnl/weighted_solver.hpp"

#include "fbnl/error.hpp"
#include "fbnl/frac_quadrature.hpp"
#include "fbnl/profile.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fbnl {

Conductances weighted_conductances(const Grid2D& g)
{
    Conductances c;
    c.cx.resize(static_cast<std::size_t>(g.nx) * (g.ny + 1));
    c.cy.resize(static_cast<std::size_t>(g.nx + 1) * g.ny);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            c.cx[j * g.nx + i] = g.wx[j] / g.hx;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            c.cy[j * (g.nx + 1) + i] = g.dual_x[i] * g.wy[j];
    return c;
}

namespace {

// y = K p, with p treated as zero on fixed nodes and y left zero there.
void apply_free(const Grid2D& g, const Conductances& c, const std::vector<char>& fixed,
                const std::vector<double>& p, std::vector<double>& y)
{
    const int nx = g.nx, ny = g.ny, st = nx + 1;
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const int k = j * st + i;
            if (fixed[k]) {
                y[k] = 0.0;
                continue;
            }
            const double pk = p[k];
            double acc = 0.0;
            if (i > 0)
                acc += c.cx[j * nx + i - 1] * (pk - p[k - 1]);
            if (i < nx)
                acc += c.cx[j * nx + i] * (pk - p[k + 1]);
            if (j > 0)
                acc += c.cy[(j - 1) * st + i] * (pk - p[k - st]);
            if (j < ny)
                acc += c.cy[j * st + i] * (pk - p[k + st]);
            y[k] = acc;
        }
    }
}

std::vector<double> diagonal(const Grid2D& g, const Conductances& c)
{
    const int nx = g.nx, ny = g.ny, st = nx + 1;
    std::vector<double> d(static_cast<std::size_t>(g.size()), 0.0);
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            double acc = 0.0;
            if (i > 0)
                acc += c.cx[j * nx + i - 1];
            if (i < nx)
                acc += c.cx[j * nx + i];
            if (j > 0)
                acc += c.cy[(j - 1) * st + i];
            if (j < ny)
                acc += c.cy[j * st + i];
            d[j * st + i] = acc;
        }
    return d;
}

double dot_free(const std::vector<double>& a, const std::vector<double>& b)
{
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        acc += a[k] * b[k];
    return acc;
}

} // namespace

struct FactoredSystem::Impl {
    const Grid2D* grid = nullptr;
    std::vector<char> fixed;
    std::vector<int> map;
    int nf = 0;
    Conductances c;
    Eigen::SparseMatrix<double> A;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

FactoredSystem::FactoredSystem(const Grid2D& g, const Conductances& c, std::vector<char> fixed)
    : impl_(std::make_unique<Impl>())
{
    const int N = g.size();
    if (fixed.size() != static_cast<std::size_t>(N))
        throw ParameterError("FactoredSystem: mask size does not match the grid");
    Impl& m = *impl_;
    m.grid = &g;
    m.fixed = std::move(fixed);
    m.c = c;
    m.map.assign(N, -1);
    for (int k = 0; k < N; ++k)
        if (!m.fixed[k])
            m.map[k] = m.nf++;
    const int nx = g.nx, ny = g.ny, st = nx + 1;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(m.nf) * 5);
    auto couple = [&](int a, int b, double w) {
        const int ia = m.map[a], ib = m.map[b];
        if (ia >= 0)
            trip.emplace_back(ia, ia, w);
        if (ib >= 0)
            trip.emplace_back(ib, ib, w);
        if (ia >= 0 && ib >= 0) {
            trip.emplace_back(ia, ib, -w);
            trip.emplace_back(ib, ia, -w);
        }
    };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i)
            couple(j * st + i, j * st + i + 1, c.cx[j * nx + i]);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i)
            couple(j * st + i, (j + 1) * st + i, c.cy[j * st + i]);
    m.A.resize(m.nf, m.nf);
    m.A.setFromTriplets(trip.begin(), trip.end());
    if (m.nf > 0) {
        m.ldlt.compute(m.A);
        if (m.ldlt.info() != Eigen::Success)
            throw ConvergenceError("direct solve: factorization failed");
    }
}

FactoredSystem::~FactoredSystem() = default;
FactoredSystem::FactoredSystem(FactoredSystem&&) noexcept = default;
FactoredSystem& FactoredSystem::operator=(FactoredSystem&&) noexcept = default;

int FactoredSystem::free_count() const { return impl_->nf; }

double FactoredSystem::solve(std::vector<double>& u, const std::vector<double>& rhs) const
{
    const Impl& m = *impl_;
    const Grid2D& g = *m.grid;
    const std::size_t N = static_cast<std::size_t>(g.size());
    if (u.size() != N || rhs.size() != N)
        throw ParameterError("FactoredSystem::solve: vector sizes do not match the grid");
    if (m.nf == 0)
        return 0.0;
    // Move fixed values to the right-hand side.
    std::vector<double> ufix(u), tmp(N);
    for (std::size_t k = 0; k < N; ++k)
        if (!m.fixed[k])
            ufix[k] = 0.0;
    std::vector<char> none(N, 0);
    apply_free(g, m.c, none, ufix, tmp);
    Eigen::VectorXd b(m.nf);
    for (std::size_t k = 0; k < N; ++k)
        if (m.map[k] >= 0)
            b[m.map[k]] = rhs[k] - tmp[k];
    const Eigen::VectorXd x = m.ldlt.solve(b);
    for (std::size_t k = 0; k < N; ++k)
        if (m.map[k] >= 0)
            u[k] = x[m.map[k]];
    const double bn = b.norm();
    return bn > 0.0 ? (b - m.A * x).norm() / bn : 0.0;
}

std::vector<double> apply_conductances(const Grid2D& g, const Conductances& c,
                                       const std::vector<double>& u)
{
    std::vector<char> none(u.size(), 0);
    std::vector<double> y(u.size());
    apply_free(g, c, none, u, y);
    return y;
}

SolveStats solve_conductance_system(const Grid2D& g, const Conductances& c,
                                    const std::vector<char>& fixed, std::vector<double>& u,
                                    const std::vector<double>& rhs, const SolverOptions& opts)
{
    const std::size_t N = static_cast<std::size_t>(g.size());
    if (u.size() != N || rhs.size() != N || fixed.size() != N)
        throw ParameterError("solve_conductance_system: vector sizes do not match the grid");
    if (opts.method == LinearMethod::Direct) {
        SolveStats st;
        st.rel_residual = FactoredSystem(g, c, fixed).solve(u, rhs);
        return st;
    }

    // Lifted right-hand side b = rhs - K u_fixed, and warm-start residual.
    std::vector<double> ufix(u), tmp(N), r(N);
    for (std::size_t k = 0; k < N; ++k)
        if (!fixed[k])
            ufix[k] = 0.0;
    std::vector<char> none(N, 0);
    apply_free(g, c, none, ufix, tmp);
    std::vector<double> b(N, 0.0);
    for (std::size_t k = 0; k < N; ++k)
        if (!fixed[k])
            b[k] = rhs[k] - tmp[k];
    const double bnorm = std::sqrt(dot_free(b, b));

    SolveStats stats;
    std::vector<double> x(N, 0.0);
    for (std::size_t k = 0; k < N; ++k)
        if (!fixed[k])
            x[k] = u[k];
    if (bnorm == 0.0) {
        for (std::size_t k = 0; k < N; ++k)
            if (!fixed[k])
                u[k] = 0.0;
        return stats;
    }
    apply_free(g, c, fixed, x, tmp);
    for (std::size_t k = 0; k < N; ++k)
        r[k] = fixed[k] ? 0.0 : b[k] - tmp[k];

    const std::vector<double> d = diagonal(g, c);
    std::vector<double> inv(N, 0.0);
    for (std::size_t k = 0; k < N; ++k)
        if (!fixed[k])
            inv[k] = d[k] > 0.0 ? 1.0 / d[k] : 1.0;

    std::vector<double> z(N), p(N), q(N);
    for (std::size_t k = 0; k < N; ++k)
        z[k] = inv[k] * r[k];
    p = z;
    double rz = dot_free(r, z);
    double rnorm = std::sqrt(dot_free(r, r));
    int it = 0;
    while (rnorm > opts.rel_tol * bnorm) {
        if (it >= opts.max_iter) {
            std::ostringstream os;
            os << "PCG did not converge in " << it << " iterations; relative residual "
               << rnorm / bnorm << "; history:";
            for (double h : stats.residual_history)
                os << ' ' << h;
            throw ConvergenceError(os.str());
        }
        apply_free(g, c, fixed, p, q);
        const double pq = dot_free(p, q);
        if (!(pq > 0.0))
            throw ConvergenceError("PCG breakdown: operator not positive definite on free nodes");
        const double a = rz / pq;
        for (std::size_t k = 0; k < N; ++k) {
            x[k] += a * p[k];
            r[k] -= a * q[k];
        }
        for (std::size_t k = 0; k < N; ++k)
            z[k] = inv[k] * r[k];
        const double rz1 = dot_free(r, z);
        const double bb = rz1 / rz;
        rz = rz1;
        for (std::size_t k = 0; k < N; ++k)
            p[k] = z[k] + bb * p[k];
        rnorm = std::sqrt(dot_free(r, r));
        ++it;
        if (it % 50 == 0)
            stats.residual_history.push_back(rnorm / bnorm);
    }
    for (std::size_t k = 0; k < N; ++k)
        if (!fixed[k])
            u[k] = x[k];
    stats.iterations = it;
    stats.rel_residual = rnorm / bnorm;
    return stats;
}

Field solve_mixed(std::shared_ptr<const Grid2D> grid, const BoundarySpec& bc,
                  const SolverOptions& opts, SolveStats* stats)
{
    const Grid2D& g = *grid;
    if (!bc.dirichlet)
        throw ParameterError("solve_mixed: Dirichlet data for top and sides is required");
    if (bc.bottom == BottomCondition::Flux && !bc.flux)
        throw ParameterError("solve_mixed: flux bottom condition without flux data");
    if (bc.bottom == BottomCondition::FreeBoundary &&
        (bc.bottom_flux_values.size() != static_cast<std::size_t>(g.nx + 1) ||
         bc.bottom_contact.size() != static_cast<std::size_t>(g.nx + 1)))
        throw ParameterError("solve_mixed: free-boundary sweep needs per-node flux and contact");

    Field f(grid);
    f.bottom = bc.bottom;
    const std::size_t N = static_cast<std::size_t>(g.size());
    std::vector<char> fixed(N, 0);
    std::vector<double> rhs(N, 0.0);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            const bool side = (i == 0 || i == g.nx || j == g.ny);
            const bool bottom = (j == 0);
            const int k = g.idx(i, j);
            if (side || (bottom && bc.bottom == BottomCondition::Dirichlet)) {
                fixed[k] = 1;
                f.values[k] = bc.dirichlet(g.x[i], g.y[j]);
            } else if (bottom && bc.bottom == BottomCondition::Flux) {
                rhs[k] = -g.dual_x[i] * bc.flux(g.x[i]);
            } else if (bottom) {
                if (bc.bottom_contact[i]) {
                    fixed[k] = 1;
                    f.values[k] = 0.0;
                } else {
                    rhs[k] = -g.dual_x[i] * bc.bottom_flux_values[i];
                }
            }
        }
    const Conductances c = weighted_conductances(g);
    const SolveStats st = solve_conductance_system(g, c, fixed, f.values, rhs, opts);
    if (stats)
        *stats = st;
    return f;
}

BottomFlux bottom_flux(const Field& field, double resolve_tol)
{
    const Grid2D& g = *field.grid;
    const double s2 = 2.0 * g.params.s;
    const double y1 = g.y[1], y2 = g.y[2], Y1 = g.Y[1], Y2 = g.Y[2];
    const double det = Y1 * y2 * y2 - Y2 * y1 * y1;
    BottomFlux bf;
    bf.x = g.x;
    bf.flux.resize(g.nx + 1);
    bf.flux_two_term.resize(g.nx + 1);
    double scale = 0.0, diff = 0.0;
    for (int i = 0; i <= g.nx; ++i) {
        const double d1 = field.at(i, 1) - field.at(i, 0);
        const double d2 = field.at(i, 2) - field.at(i, 0);
        bf.flux[i] = d1 * s2 / Y1;
        bf.flux_two_term[i] = s2 * (d1 * y2 * y2 - d2 * y1 * y1) / det;
        scale = std::max(scale, std::abs(bf.flux_two_term[i]));
        diff = std::max(diff, std::abs(bf.flux[i] - bf.flux_two_term[i]));
    }
    bf.max_disagreement = scale > 0.0 ? diff / scale : diff;
    bf.resolved = bf.max_disagreement <= resolve_tol;
    return bf;
}

double dirichlet_energy(const Field& field)
{
    const Grid2D& g = *field.grid;
    const Conductances c = weighted_conductances(g);
    const int nx = g.nx, st = nx + 1;
    double e = 0.0;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double d = field.values[j * st + i + 1] - field.values[j * st + i];
            e += c.cx[j * nx + i] * d * d;
        }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const double d = field.values[(j + 1) * st + i] - field.values[j * st + i];
            e += c.cy[j * st + i] * d * d;
        }
    return 0.5 * e;
}

double trace_energy(const Field& field)
{
    const Grid2D& g = *field.grid;
    const double gam = g.params.gamma;
    double e = 0.0;
    for (int i = 0; i <= g.nx; ++i) {
        const double v = field.at(i, 0);
        if (v > 0.0)
            e += g.dual_x[i] * (gam == 0.0 ? 1.0 : std::pow(v, gam));
    }
    return e;
}

ExtensionReport extension_crosscheck(const Params& params, double window, int nx, int ny)
{
    if (!(window > 0.0))
        throw ParameterError("extension_crosscheck: window must be positive");
    ExtensionReport rep;
    rep.params = params;
    rep.window = window;
    rep.d_theory = extension_constant_theory(params.s);

    const Profile prof = solve_profile(params);
    auto grid = std::make_shared<Grid2D>(
        build_grid(nx, ny, window, window, default_grading(params), params));
    BoundarySpec bc;
    bc.bottom = BottomCondition::Dirichlet;
    bc.dirichlet = [&](double x, double y) { return eval_halfplane(prof, x, y); };
    const Field u = solve_mixed(grid, bc);
    const BottomFlux bf = bottom_flux(u);

    std::vector<std::size_t> sel;
    for (int i = 0; i <= grid->nx; ++i)
        if (grid->x[i] >= 0.2 * window - 1e-12 && grid->x[i] <= 0.8 * window + 1e-12)
            sel.push_back(static_cast<std::size_t>(i));

    SampledProfile sp;
    const double L = 4.0 * window;
    sp.dx = window / 2000.0;
    sp.x0 = -L;
    const int ns = static_cast<int>(std::lround(2.0 * L / sp.dx)) + 1;
    sp.u.resize(ns);
    for (int i = 0; i < ns; ++i) {
        const double xv = sp.x0 + i * sp.dx;
        sp.u[i] = xv > 0.0 ? std::pow(xv, params.beta) : 0.0;
    }
    sp.left = {true, 0.0, 0.0};
    sp.right = {true, 1.0, params.beta};

    for (std::size_t i : sel) {
        rep.x.push_back(grid->x[i]);
        rep.flux.push_back(bf.flux[i]);
    }
    rep.frac_laplacian = frac_laplacian_profile(sp, params.s, rep.x);

    const double lam = prof.measured_slope;
    double dmin = std::numeric_limits<double>::infinity(), dmax = -dmin, dsum = 0.0;
    for (std::size_t k = 0; k < rep.x.size(); ++k) {
        rep.max_abs_flux = std::max(rep.max_abs_flux, std::abs(rep.flux[k]));
        rep.max_two_term_disagreement =
            std::max(rep.max_two_term_disagreement,
                     std::abs(rep.flux[k] - bf.flux_two_term[sel[k]]));
        const double ref = lam * std::pow(rep.x[k], params.beta - 2.0 * params.s);
        if (lam != 0.0)
            rep.flux_rel_error =
                std::max(rep.flux_rel_error, std::abs(rep.flux[k] - ref) / std::abs(ref));
        const double ratio = rep.flux[k] / (-rep.frac_laplacian[k]);
        rep.ratio.push_back(ratio);
        dmin = std::min(dmin, ratio);
        dmax = std::max(dmax, ratio);
        dsum += ratio;
    }
    if (params.gamma == 0.0) {
        rep.d_fit = std::numeric_limits<double>::quiet_NaN();
        rep.d_spread = 0.0;
        return rep;
    }
    rep.d_fit = dsum / static_cast<double>(rep.x.size());
    rep.d_spread = (dmax - dmin) / std::abs(rep.d_fit);
    if (rep.d_spread > 0.05) {
        std::ostringstream os;
        os << "extension_crosscheck: spread " << rep.d_spread
           << " of the fitted extension constant exceeds 5%; refine the grid";
        throw ConvergenceError(os.str());
    }
    return rep;
}

} // namespace fbnl
