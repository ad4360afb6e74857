#include "fbnl/energy_minimizer.hpp"

#include "fbnl/error.hpp"
#include "fbnl/weighted_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fbnl {

MinimizeConfig default_minimize_config(double trace_scale)
{
    if (!(trace_scale > 0.0))
        trace_scale = 1.0;
    MinimizeConfig cfg;
    for (int k = 4; k <= 9; ++k)
        cfg.delta_schedule.push_back(trace_scale * std::pow(10.0, -k));
    cfg.fb_threshold = 10.0 * cfg.delta_schedule.back();
    return cfg;
}

void validate(const MinimizeConfig& cfg)
{
    if (cfg.delta_schedule.empty())
        throw ParameterError("minimize config: empty delta schedule");
    for (std::size_t k = 0; k < cfg.delta_schedule.size(); ++k) {
        if (!(cfg.delta_schedule[k] > 0.0))
            throw ParameterError("minimize config: delta values must be positive");
        if (k > 0 && !(cfg.delta_schedule[k] < cfg.delta_schedule[k - 1]))
            throw ParameterError("minimize config: delta schedule must be strictly decreasing");
    }
    if (!(cfg.fb_threshold > 0.0))
        throw ParameterError("minimize config: fb_threshold must be positive");
    if (cfg.max_outer < 1 || cfg.max_active_set < 1)
        throw ParameterError("minimize config: iteration caps must be positive");
}

namespace {

double penalty(double u, double delta, double gamma)
{
    if (gamma == 0.0)
        return u / (u + delta);
    return std::pow(u + delta, gamma);
}

double penalty_slope(double u, double delta, double gamma)
{
    if (gamma == 0.0)
        return delta / ((u + delta) * (u + delta));
    return gamma * std::pow(u + delta, gamma - 1.0);
}

double exact_penalty(double u, double gamma)
{
    if (u <= 0.0)
        return 0.0;
    return gamma == 0.0 ? 1.0 : std::pow(u, gamma);
}

// Bottom unknowns i = 1..nx-1 reduced onto a dense Dirichlet-to-Neumann matrix.
struct Reduced {
    int nb = 0;
    Eigen::MatrixXd S;
    Eigen::VectorXd b0;
    double e0 = 0.0;
    std::vector<double> u0; // extension of the data with zero bottom values
    std::vector<double> w;  // dual widths of the bottom nodes
};

Reduced reduce(const Grid2D& g, const Conductances& c, const FactoredSystem& fs,
               const std::vector<double>& dirichlet_vals)
{
    Reduced r;
    r.nb = g.nx - 1;
    r.S.resize(r.nb, r.nb);
    r.b0.resize(r.nb);
    r.w.resize(r.nb);
    const std::size_t N = static_cast<std::size_t>(g.size());
    const std::vector<double> zero(N, 0.0);

    r.u0 = dirichlet_vals;
    for (int i = 1; i < g.nx; ++i)
        r.u0[g.idx(i, 0)] = 0.0;
    fs.solve(r.u0, zero);
    {
        const std::vector<double> Ku = apply_conductances(g, c, r.u0);
        for (int i = 1; i < g.nx; ++i)
            r.b0[i - 1] = Ku[g.idx(i, 0)];
        double e = 0.0;
        for (std::size_t k = 0; k < N; ++k)
            e += r.u0[k] * Ku[k];
        r.e0 = 0.5 * e;
    }
    std::vector<double> h(N);
    for (int m = 1; m < g.nx; ++m) {
        std::fill(h.begin(), h.end(), 0.0);
        h[g.idx(m, 0)] = 1.0;
        fs.solve(h, zero);
        const std::vector<double> Kh = apply_conductances(g, c, h);
        for (int i = 1; i < g.nx; ++i)
            r.S(i - 1, m - 1) = Kh[g.idx(i, 0)];
    }
    r.S = 0.5 * (r.S + r.S.transpose());
    for (int i = 1; i < g.nx; ++i)
        r.w[i - 1] = g.dual_x[i];
    return r;
}

double quad_energy(const Reduced& r, const Eigen::VectorXd& v)
{
    return r.e0 + r.b0.dot(v) + 0.5 * v.dot(r.S * v);
}

// min 1/2 v'Sv + q'v subject to v >= 0, primal-dual active set.
Eigen::VectorXd solve_bound_qp(const Eigen::MatrixXd& S, const Eigen::VectorXd& q,
                               Eigen::VectorXd v, int max_iter, int& iters)
{
    const int nb = static_cast<int>(q.size());
    std::vector<char> active(nb);
    Eigen::VectorXd mu = S * v + q;
    const double cscale = S.diagonal().maxCoeff();
    for (int i = 0; i < nb; ++i)
        active[i] = (mu[i] - cscale * v[i] > 0.0);
    for (iters = 1; iters <= max_iter; ++iters) {
        std::vector<int> free;
        for (int i = 0; i < nb; ++i)
            if (!active[i])
                free.push_back(i);
        v.setZero();
        if (!free.empty()) {
            const int nf = static_cast<int>(free.size());
            Eigen::MatrixXd Sf(nf, nf);
            Eigen::VectorXd qf(nf);
            for (int a = 0; a < nf; ++a) {
                qf[a] = -q[free[a]];
                for (int b = 0; b < nf; ++b)
                    Sf(a, b) = S(free[a], free[b]);
            }
            Eigen::LLT<Eigen::MatrixXd> llt(Sf);
            if (llt.info() != Eigen::Success)
                throw ConvergenceError("active-set step: reduced matrix not positive definite");
            const Eigen::VectorXd vf = llt.solve(qf);
            for (int a = 0; a < nf; ++a)
                v[free[a]] = vf[a];
        }
        mu = S * v + q;
        bool changed = false;
        for (int i = 0; i < nb; ++i) {
            if (!active[i])
                mu[i] = 0.0;
            const bool next = (mu[i] - cscale * v[i] > 0.0);
            if (next != static_cast<bool>(active[i])) {
                active[i] = next;
                changed = true;
            }
        }
        if (!changed) {
            for (int i = 0; i < nb; ++i)
                v[i] = std::max(v[i], 0.0);
            return v;
        }
    }
    throw ConvergenceError("active-set iteration did not settle within the cap");
}

std::string set_string(const Eigen::VectorXd& v)
{
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (int i = 0; i < v.size(); ++i)
        if (v[i] <= 0.0) {
            os << (first ? "" : ",") << i + 1;
            first = false;
        }
    os << '}';
    return os.str();
}

} // namespace

double discrete_energy(const Field& field)
{
    return dirichlet_energy(field) + trace_energy(field);
}

MinimizeResult minimize_energy(std::shared_ptr<const Grid2D> grid,
                               const std::function<double(double, double)>& data,
                               const MinimizeConfig& cfg, const Field* initial)
{
    validate(cfg);
    const Grid2D& g = *grid;
    const double gamma = g.params.gamma;
    const std::size_t N = static_cast<std::size_t>(g.size());

    std::vector<char> fixed(N, 0);
    std::vector<double> vals(N, 0.0);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            if (j == 0 || i == 0 || i == g.nx || j == g.ny) {
                fixed[g.idx(i, j)] = 1;
                if (j > 0 || i == 0 || i == g.nx) {
                    const double d = data(g.x[i], g.y[j]);
                    // Round-off negatives from profile evaluation are clipped.
                    if (d < -1e-10 || !std::isfinite(d))
                        throw ParameterError("minimize_energy: boundary data must be finite and nonnegative");
                    vals[g.idx(i, j)] = std::max(d, 0.0);
                }
            }
        }
    const Conductances c = weighted_conductances(g);
    const FactoredSystem fs(g, c, fixed);
    const Reduced red = reduce(g, c, fs, vals);

    Eigen::VectorXd v(red.nb);
    for (int i = 1; i < g.nx; ++i) {
        double d = initial ? initial->trace(g.x[i]) : data(g.x[i], 0.0);
        v[i - 1] = std::max(0.0, d);
    }

    MinimizeResult res;
    auto reg_energy = [&](const Eigen::VectorXd& vv, double delta) {
        double e = quad_energy(red, vv);
        for (int i = 0; i < red.nb; ++i)
            e += red.w[i] * penalty(vv[i], delta, gamma);
        // The two Dirichlet endpoints of the trace carry their data.
        e += g.dual_x[0] * penalty(vals[g.idx(0, 0)], delta, gamma);
        e += g.dual_x[g.nx] * penalty(vals[g.idx(g.nx, 0)], delta, gamma);
        return e;
    };
    auto exact_energy = [&](const Eigen::VectorXd& vv) {
        double e = quad_energy(red, vv);
        for (int i = 0; i < red.nb; ++i)
            e += red.w[i] * exact_penalty(vv[i], gamma);
        e += g.dual_x[0] * exact_penalty(vals[g.idx(0, 0)], gamma);
        e += g.dual_x[g.nx] * exact_penalty(vals[g.idx(g.nx, 0)], gamma);
        return e;
    };
    auto contact_count = [&](const Eigen::VectorXd& vv) {
        int n = 0;
        for (int i = 0; i < vv.size(); ++i)
            n += (vv[i] <= 0.0);
        return n;
    };

    // Majorize-minimize at fixed delta from v; appends to `log` when given.
    auto descend = [&](Eigen::VectorXd& vv, double delta, int st,
                       std::vector<EnergyLogEntry>* log) {
        double e = reg_energy(vv, delta);
        Eigen::VectorXd prev_v = vv;
        for (int it = 1; it <= cfg.max_outer; ++it) {
            Eigen::VectorXd q = red.b0;
            for (int i = 0; i < red.nb; ++i)
                q[i] += red.w[i] * penalty_slope(vv[i], delta, gamma);
            int pdas = 0;
            Eigen::VectorXd vn = solve_bound_qp(red.S, q, vv, cfg.max_active_set, pdas);
            const double en = reg_energy(vn, delta);
            if (en > e + 1e-12 * std::abs(e) + 1e-300) {
                std::ostringstream os;
                os.precision(17);
                os << "minimize_energy: energy increased from " << e << " to " << en
                   << " at stage " << st << ", outer step " << it << "; contact sets "
                   << set_string(vv) << " -> " << set_string(vn);
                throw ConvergenceError(os.str());
            }
            prev_v = vv;
            vv = vn;
            const double drop = e - en;
            e = std::min(e, en);
            if (log)
                log->push_back({st, delta, it, e, exact_energy(vv), contact_count(vv), pdas});
            const double vscale = std::max(1.0, vv.cwiseAbs().maxCoeff());
            if (drop <= cfg.descent_tol * std::abs(e) &&
                (vv - prev_v).cwiseAbs().maxCoeff() <= 1e-10 * vscale)
                return e;
        }
        std::ostringstream os;
        os << "minimize_energy: stage " << st << " (delta " << delta << ") did not settle in "
           << cfg.max_outer << " outer steps; last contact sets " << set_string(prev_v)
           << " and " << set_string(vv);
        throw ConvergenceError(os.str());
    };

    double prev_stage_end = std::numeric_limits<double>::infinity();
    double e = 0.0;
    const int nstage = static_cast<int>(cfg.delta_schedule.size());
    for (int st = 0; st < nstage; ++st) {
        const double delta = cfg.delta_schedule[st];
        e = reg_energy(v, delta);
        // (u + delta)^gamma decreases with delta, so the regularized energy is
        // monotone across stages too (not for the gamma = 0 surrogate).
        if (gamma > 0.0 && e > prev_stage_end * (1.0 + 1e-12) + 1e-300) {
            std::ostringstream os;
            os << "minimize_energy: energy rose across a delta stage (" << prev_stage_end
               << " -> " << e << ")";
            throw ConvergenceError(os.str());
        }
        res.log.push_back({st, delta, 0, e, exact_energy(v), contact_count(v), 0});
        e = descend(v, delta, st, &res.log);
        prev_stage_end = e;
    }

    // Contact nodes are fixed points of the tangent step (the penalty slope is
    // unbounded at 0), so the boundary of the contact set is also moved
    // explicitly: lift a contact node next to the positivity set, or drop a
    // positive node next to the contact set, descend, keep the best strict
    // improvement.
    if (cfg.fb_search) {
        const int last = nstage - 1;
        const double delta = cfg.delta_schedule.back();
        for (int sweep = 0; sweep < cfg.max_fb_moves; ++sweep) {
            Eigen::VectorXd best_v;
            double best_e = e;
            for (int i = 0; i < red.nb; ++i) {
                const double left = i > 0 ? v[i - 1] : vals[g.idx(0, 0)];
                const double right = i + 1 < red.nb ? v[i + 1] : vals[g.idx(g.nx, 0)];
                const bool contact = v[i] <= 0.0;
                const bool edge = contact ? (left > 0.0 || right > 0.0)
                                          : (left <= 0.0 || right <= 0.0);
                if (!edge)
                    continue;
                Eigen::VectorXd trial = v;
                trial[i] = contact ? 0.5 * std::max(left, right) : 0.0;
                double et;
                try {
                    et = descend(trial, delta, last, nullptr);
                } catch (const ConvergenceError&) {
                    continue;
                }
                if (et < best_e - 1e-14 * std::abs(best_e)) {
                    best_e = et;
                    best_v = trial;
                }
            }
            if (best_v.size() == 0)
                break;
            v = best_v;
            e = best_e;
            res.log.push_back({last, delta, -(sweep + 1), e, exact_energy(v), contact_count(v), 0});
        }
    }

    Field f(grid);
    f.values = vals;
    for (int i = 1; i < g.nx; ++i)
        f.values[g.idx(i, 0)] = v[i - 1];
    const std::vector<double> zero(N, 0.0);
    fs.solve(f.values, zero);
    f.bottom = BottomCondition::FreeBoundary;
    f.nonnegative = true;
    for (double& x : f.values)
        x = std::max(x, 0.0);
    res.field = f;
    res.dirichlet_part = dirichlet_energy(f);
    res.trace_part = trace_energy(f);
    res.energy = res.dirichlet_part + res.trace_part;
    return res;
}

namespace {

// Sub-intervals of [a, b] where the piecewise-linear trace is <= th.
std::vector<std::array<double, 2>> contact_intervals(const Field& field, double a, double b,
                                                     double th)
{
    const Grid2D& g = *field.grid;
    std::vector<std::array<double, 2>> out;
    auto push = [&](double lo, double hi) {
        if (hi < lo)
            return;
        if (!out.empty() && lo <= out.back()[1] + 1e-15)
            out.back()[1] = std::max(out.back()[1], hi);
        else
            out.push_back({lo, hi});
    };
    for (int i = 0; i < g.nx; ++i) {
        const double x0 = g.x[i], x1 = g.x[i + 1];
        const double lo = std::max(a, x0), hi = std::min(b, x1);
        if (hi < lo)
            continue;
        const double u0 = field.at(i, 0), u1 = field.at(i + 1, 0);
        auto u = [&](double x) { return u0 + (u1 - u0) * (x - x0) / (x1 - x0); };
        const double ul = u(lo), uh = u(hi);
        if (ul <= th && uh <= th) {
            push(lo, hi);
        } else if (ul > th && uh > th) {
            continue;
        } else {
            const double xc = lo + (th - ul) * (hi - lo) / (uh - ul);
            if (ul <= th)
                push(lo, xc);
            else
                push(xc, hi);
        }
    }
    return out;
}

void require_in_trace(const Grid2D& g, double a, double b, const char* what)
{
    if (a < g.xmin - 1e-12 || b > g.xmax + 1e-12) {
        std::ostringstream os;
        os << what << ": interval [" << a << ", " << b << "] exceeds the trace window ["
           << g.xmin << ", " << g.xmax << "]";
        throw DomainError(os.str());
    }
}

} // namespace

double contact_length(const Field& field, double a, double b, double threshold)
{
    double len = 0.0;
    for (const auto& iv : contact_intervals(field, a, b, threshold))
        len += iv[1] - iv[0];
    return len;
}

FreeBoundaryReport extract_free_boundary(const Field& field, const MinimizeConfig& cfg)
{
    const Grid2D& g = *field.grid;
    const double th = cfg.fb_threshold;
    FreeBoundaryReport rep;
    rep.trace_length = g.xmax - g.xmin;
    rep.contact_measure = contact_length(field, g.xmin, g.xmax, th);
    for (int i = 0; i < g.nx; ++i) {
        const double a = field.at(i, 0) - th, b = field.at(i + 1, 0) - th;
        if ((a <= 0.0 && b > 0.0) || (a > 0.0 && b <= 0.0)) {
            rep.fb_points.push_back(g.x[i] + a / (a - b) * g.hx);
            rep.fb_orientation.push_back(b > 0.0 ? 1 : -1);
        }
    }
    return rep;
}

std::vector<GrowthFit> measure_nondegeneracy(const Field& field, FreeBoundaryReport& report,
                                             const std::vector<double>& radii)
{
    const Grid2D& g = *field.grid;
    std::vector<GrowthFit> fits;
    for (double x0 : report.fb_points) {
        GrowthFit fit;
        fit.x0 = x0;
        for (double r : radii) {
            if (!(r > 0.0) || x0 - r < g.xmin - 1e-12 || x0 + r > g.xmax + 1e-12)
                continue;
            double sup = std::max(field.trace(x0 - r), field.trace(x0 + r));
            for (int i = 0; i <= g.nx; ++i)
                if (g.x[i] > x0 - r && g.x[i] < x0 + r)
                    sup = std::max(sup, field.at(i, 0));
            if (!(sup > 0.0))
                continue;
            fit.radii.push_back(r);
            fit.sup_values.push_back(sup);
        }
        const std::size_t m = fit.radii.size();
        if (m < 4) {
            std::ostringstream os;
            os << "measure_nondegeneracy: only " << m << " usable radii at x0 = " << x0;
            throw DomainError(os.str());
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t k = 0; k < m; ++k) {
            const double lx = std::log(fit.radii[k]), ly = std::log(fit.sup_values[k]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        const double dm = static_cast<double>(m);
        fit.slope = (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
        fit.intercept = (sy - fit.slope * sx) / dm;
        fits.push_back(fit);
    }
    report.growth_fit = fits;
    return fits;
}

std::vector<std::vector<double>> measure_density(const Field& field, FreeBoundaryReport& report,
                                                 const std::vector<double>& radii,
                                                 double threshold)
{
    const Grid2D& g = *field.grid;
    std::vector<double> centers = report.fb_points;
    std::vector<std::vector<double>> out;
    report.density_inf = 1.0;
    for (double x0 : centers) {
        std::vector<double> row;
        for (double r : radii) {
            require_in_trace(g, x0 - r, x0 + r, "measure_density");
            const double ratio = contact_length(field, x0 - r, x0 + r, threshold) / (2.0 * r);
            row.push_back(std::clamp(ratio, 0.0, 1.0));
            report.density_inf = std::min(report.density_inf, row.back());
        }
        out.push_back(row);
    }
    report.density_radii = radii;
    report.density_ratios = out;
    return out;
}

std::vector<FlatnessScale> measure_flatness(const Field& field, double x0,
                                            const std::vector<double>& scales, double threshold)
{
    const Grid2D& g = *field.grid;
    if (scales.size() < 4)
        throw DomainError("measure_flatness: need at least 4 scales");
    std::vector<FlatnessScale> out;
    for (double rho : scales) {
        require_in_trace(g, x0 - rho, x0 + rho, "measure_flatness");
        const auto iv = contact_intervals(field, x0 - rho, x0 + rho, threshold);
        // In rescaled coordinates xi = nu (x - x0) / rho; contact must lie in
        // xi <= eps and all of xi <= -eps must be contact.
        auto eps_for = [&](int nu) {
            double sup_contact = -1.0, inf_positive = 1.0;
            if (iv.empty()) {
                inf_positive = -1.0;
            } else {
                std::vector<std::array<double, 2>> xi;
                for (const auto& c : iv) {
                    const double a = nu * (c[0] - x0) / rho, b = nu * (c[1] - x0) / rho;
                    xi.push_back({std::min(a, b), std::max(a, b)});
                }
                std::sort(xi.begin(), xi.end());
                for (const auto& c : xi)
                    sup_contact = std::max(sup_contact, c[1]);
                // First positive point: -1 unless the leftmost interval starts there.
                inf_positive = (xi.front()[0] > -1.0 + 1e-12) ? -1.0 : xi.front()[1];
                if (inf_positive >= 1.0 - 1e-12)
                    inf_positive = 1.0;
            }
            return std::clamp(std::max({0.0, sup_contact, -inf_positive}), 0.0, 1.0);
        };
        const double ep = eps_for(1), em = eps_for(-1);
        FlatnessScale fs;
        fs.scale = rho;
        fs.epsilon = std::min(ep, em);
        fs.normal = {ep <= em ? 1.0 : -1.0, 0.0};
        out.push_back(fs);
    }
    return out;
}

std::vector<FlatnessScale> measure_flatness_2d(
    const std::function<double(double, double)>& trace, std::array<double, 2> x0,
    const std::vector<double>& scales, double threshold, bool fit_normal, int resolution)
{
    if (scales.size() < 4)
        throw DomainError("measure_flatness_2d: need at least 4 scales");
    if (resolution < 11)
        throw ParameterError("measure_flatness_2d: resolution too small");
    constexpr double pi = 3.14159265358979323846;
    std::vector<FlatnessScale> out;
    for (double rho : scales) {
        // Unit-disk samples, classified once.
        std::vector<std::array<double, 2>> pts;
        std::vector<char> contact;
        for (int a = 0; a < resolution; ++a)
            for (int b = 0; b < resolution; ++b) {
                const double p = -1.0 + 2.0 * a / (resolution - 1);
                const double q = -1.0 + 2.0 * b / (resolution - 1);
                if (p * p + q * q > 1.0)
                    continue;
                pts.push_back({p, q});
                contact.push_back(trace(x0[0] + rho * p, x0[1] + rho * q) <= threshold);
            }
        auto eps_for = [&](double ang) {
            const double c = std::cos(ang), s = std::sin(ang);
            double e = 0.0;
            for (std::size_t k = 0; k < pts.size(); ++k) {
                const double xi = c * pts[k][0] + s * pts[k][1];
                e = contact[k] ? std::max(e, xi) : std::max(e, -xi);
            }
            return std::min(e, 1.0);
        };
        double best = pi / 2.0, beste = eps_for(best);
        if (fit_normal) {
            const int nscan = 360;
            for (int k = 0; k < nscan; ++k) {
                const double ang = 2.0 * pi * k / nscan;
                const double e = eps_for(ang);
                if (e < beste) {
                    beste = e;
                    best = ang;
                }
            }
            double lo = best - 2.0 * pi / nscan, hi = best + 2.0 * pi / nscan;
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
            double e1 = eps_for(m1), e2 = eps_for(m2);
            for (int it = 0; it < 60; ++it) {
                if (e1 <= e2) {
                    hi = m2;
                    m2 = m1;
                    e2 = e1;
                    m1 = hi - gr * (hi - lo);
                    e1 = eps_for(m1);
                } else {
                    lo = m1;
                    m1 = m2;
                    e1 = e2;
                    m2 = lo + gr * (hi - lo);
                    e2 = eps_for(m2);
                }
            }
            const double mid = 0.5 * (lo + hi), em = eps_for(mid);
            if (em <= beste) {
                beste = em;
                best = mid;
            }
        }
        FlatnessScale fs;
        fs.scale = rho;
        fs.epsilon = beste;
        fs.normal = {std::cos(best), std::sin(best)};
        out.push_back(fs);
    }
    return out;
}

} // namespace fbnl
