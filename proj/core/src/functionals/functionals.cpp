#include "fbnl/functionals.hpp"

#include "fbnl/error.hpp"
#include "fbnl/numerics/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fbnl {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_ball(const Grid2D& g, double x0, double R, const char* what)
{
    if (!(R > 0.0) || x0 - R < g.xmin - 1e-12 || x0 + R > g.xmax + 1e-12 || R > g.Ly + 1e-12) {
        std::ostringstream os;
        os << what << ": half-ball of radius " << R << " about " << x0
           << " exceeds the grid [" << g.xmin << ", " << g.xmax << "] x [0, " << g.Ly << "]";
        throw DomainError(os.str());
    }
}

struct CellCoeffs {
    double a, b, c, d; // u = a + b xi + c eta + d xi eta
};

CellCoeffs coeffs(const Field& u, int i, int j)
{
    const double u00 = u.at(i, j), u10 = u.at(i + 1, j), u01 = u.at(i, j + 1),
                 u11 = u.at(i + 1, j + 1);
    return {u00, u10 - u00, u01 - u00, u11 - u10 - u01 + u00};
}

// Scaled copies of reference rules on [0, 1].
Rule on_interval(const Rule& ref, double lo, double hi, double power = 1.0)
{
    Rule r;
    const double L = hi - lo, scale = std::pow(L, power);
    r.x.resize(ref.x.size());
    r.w.resize(ref.w.size());
    for (std::size_t k = 0; k < ref.x.size(); ++k) {
        r.x[k] = lo + L * ref.x[k];
        r.w[k] = scale * ref.w[k];
    }
    return r;
}

struct VolumeRules {
    Rule gl;      // Gauss–Legendre on [0,1]
    Rule jac[4];  // left Jacobi on [0,1] with exponents alpha, alpha+2s, alpha+4s, -alpha
    double exps[4];
};

VolumeRules volume_rules(const Params& P)
{
    VolumeRules vr;
    vr.gl = gauss_legendre(12, 0.0, 1.0);
    vr.exps[0] = P.alpha;
    vr.exps[1] = P.alpha + 2.0 * P.s;
    vr.exps[2] = P.alpha + 4.0 * P.s;
    vr.exps[3] = -P.alpha;
    for (int k = 0; k < 4; ++k)
        vr.jac[k] = gauss_jacobi_left(14, vr.exps[k], 0.0, 1.0);
    return vr;
}

// Weighted Dirichlet energy of one cell clipped to the disk, by slicing in y.
double cut_cell_energy(const Grid2D& g, const CellCoeffs& k, int i, int j, double x0, double R,
                       const VolumeRules& vr)
{
    const double s = g.params.s, alpha = g.params.alpha;
    const double ylo = g.y[j], yhi = std::min(g.y[j + 1], R);
    if (yhi <= ylo)
        return 0.0;
    const double dY = g.Y[j + 1] - g.Y[j];
    std::vector<double> br{ylo, yhi};
    for (double xe : {g.x[i], g.x[i + 1]}) {
        const double dx = std::abs(xe - x0);
        if (dx < R) {
            const double yb = std::sqrt(R * R - dx * dx);
            if (yb > ylo && yb < yhi)
                br.push_back(yb);
        }
    }
    std::sort(br.begin(), br.end());

    // Slice data at height y: clipped xi range.
    auto xi_range = [&](double y, double& xa, double& xb) {
        const double w = std::sqrt(std::max(R * R - y * y, 0.0));
        xa = (std::max(g.x[i], x0 - w) - g.x[i]) / g.hx;
        xb = (std::min(g.x[i + 1], x0 + w) - g.x[i]) / g.hx;
        if (xb < xa)
            xb = xa;
    };
    // int_{xa}^{xb} (c + d xi)^2 dxi
    auto sq_int = [&](double xa, double xb) {
        auto prim = [&](double t) {
            return k.c * k.c * t + k.c * k.d * t * t + k.d * k.d * t * t * t / 3.0;
        };
        return prim(xb) - prim(xa);
    };
    const double t2 = 4.0 * s * s * g.hx / (dY * dY);
    auto density = [&](double y) {
        double xa, xb;
        xi_range(y, xa, xb);
        const double eta = (std::pow(y, 2.0 * s) - g.Y[j]) / dY;
        const double bx = k.b + k.d * eta;
        return std::pow(y, alpha) * bx * bx * (xb - xa) / g.hx +
               t2 * std::pow(y, -alpha) * sq_int(xa, xb);
    };

    double total = 0.0;
    for (std::size_t p = 0; p + 1 < br.size(); ++p) {
        const double a = br[p], b = br[p + 1];
        if (b <= a)
            continue;
        if (a == 0.0) {
            // Bottom row: eta = y^{2s} / Y_1, weights y^alpha y^{2sk} and y^{-alpha}.
            const double Y1 = g.Y[1];
            const double coef[3] = {k.b * k.b, 2.0 * k.b * k.d / Y1, k.d * k.d / (Y1 * Y1)};
            for (int m = 0; m < 3; ++m) {
                const Rule r = on_interval(vr.jac[m], a, b, 1.0 + vr.exps[m]);
                total += coef[m] * r.apply([&](double y) {
                    double xa, xb;
                    xi_range(y, xa, xb);
                    return (xb - xa) / g.hx;
                });
            }
            const Rule r = on_interval(vr.jac[3], a, b, 1.0 + vr.exps[3]);
            total += t2 * r.apply([&](double y) {
                double xa, xb;
                xi_range(y, xa, xb);
                return sq_int(xa, xb);
            });
        } else if (b >= R * (1.0 - 1e-15)) {
            // Near the top of the circle the chord behaves like sqrt(R - y).
            const double tmax = std::sqrt(R - a);
            const Rule r = on_interval(vr.gl, 0.0, tmax);
            total += r.apply([&](double t) { return 2.0 * t * density(R - t * t); });
        } else {
            const Rule r = on_interval(vr.gl, a, b);
            total += r.apply(density);
        }
    }
    return total;
}

} // namespace

double weighted_dirichlet_in_ball(const Field& u, double x0, double R)
{
    const Grid2D& g = *u.grid;
    require_ball(g, x0, R, "weighted_dirichlet_in_ball");
    const double s = g.params.s, alpha = g.params.alpha;
    const VolumeRules vr = volume_rules(g.params);
    const Rule gl10 = gauss_legendre(10, 0.0, 1.0);
    const double R2 = R * R;
    double total = 0.0;
    for (int j = 0; j < g.ny && g.y[j] < R; ++j) {
        const double y0 = g.y[j], y1 = g.y[j + 1];
        const double dY = g.Y[j + 1] - g.Y[j];
        for (int i = 0; i < g.nx; ++i) {
            const double xa = g.x[i], xb = g.x[i + 1];
            if (xb <= x0 - R || xa >= x0 + R)
                continue;
            const double nearx = std::max({xa - x0, 0.0, x0 - xb});
            if (nearx * nearx + y0 * y0 >= R2)
                continue;
            const double farx = std::max(std::abs(xa - x0), std::abs(xb - x0));
            const CellCoeffs k = coeffs(u, i, j);
            if (farx * farx + y1 * y1 <= R2) {
                double t1;
                if (j == 0) {
                    const double e0 = 2.0 - 2.0 * s, e1 = 2.0, e2 = 2.0 + 2.0 * s;
                    t1 = std::pow(y1, e0) *
                         (k.b * k.b / e0 + 2.0 * k.b * k.d / e1 + k.d * k.d / e2);
                } else {
                    const Rule r = on_interval(gl10, y0, y1);
                    t1 = r.apply([&](double y) {
                        const double eta = (std::pow(y, 2.0 * s) - g.Y[j]) / dY;
                        const double bx = k.b + k.d * eta;
                        return std::pow(y, alpha) * bx * bx;
                    });
                }
                const double t2 =
                    2.0 * s * g.hx * (k.c * k.c + k.c * k.d + k.d * k.d / 3.0) / dY;
                total += t1 / g.hx + t2;
            } else {
                total += cut_cell_energy(g, k, i, j, x0, R, vr);
            }
        }
    }
    return total;
}

double trace_penalty_in_ball(const Field& u, double x0, double R)
{
    const Grid2D& g = *u.grid;
    require_ball(g, x0, R, "trace_penalty_in_ball");
    const double gam = g.params.gamma;
    const double lo = x0 - R, hi = x0 + R;
    double total = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double a = std::max(lo, g.x[i]), b = std::min(hi, g.x[i + 1]);
        if (b <= a)
            continue;
        const double u0 = u.at(i, 0), u1 = u.at(i + 1, 0);
        auto lin = [&](double x) { return u0 + (u1 - u0) * (x - g.x[i]) / g.hx; };
        double ua = lin(a), ub = lin(b), pa = a, pb = b;
        if (ua <= 0.0 && ub <= 0.0)
            continue;
        if (ua < 0.0) {
            pa = a + (0.0 - ua) * (b - a) / (ub - ua);
            ua = 0.0;
        } else if (ub < 0.0) {
            pb = a + (0.0 - ua) * (b - a) / (ub - ua);
            ub = 0.0;
        }
        const double L = pb - pa;
        if (L <= 0.0)
            continue;
        if (gam == 0.0) {
            total += L;
        } else if (std::abs(ub - ua) <= 1e-13 * std::max(ua, ub)) {
            total += L * std::pow(0.5 * (ua + ub), gam);
        } else {
            total += L * (std::pow(ub, gam + 1.0) - std::pow(ua, gam + 1.0)) /
                     ((gam + 1.0) * (ub - ua));
        }
    }
    return total;
}

double weighted_arc_integral(const std::vector<const Grid2D*>& grids, double alpha, double x0,
                             double R, const std::function<double(double)>& F)
{
    std::vector<double> br{0.0, kPi};
    for (const Grid2D* g : grids) {
        for (int i = 0; i <= g->nx; ++i) {
            const double c = (g->x[i] - x0) / R;
            if (c > -1.0 && c < 1.0)
                br.push_back(std::acos(c));
        }
        for (int j = 1; j <= g->ny; ++j) {
            if (g->y[j] >= R)
                break;
            const double t = std::asin(g->y[j] / R);
            br.push_back(t);
            br.push_back(kPi - t);
        }
    }
    std::sort(br.begin(), br.end());
    std::vector<double> cuts{0.0};
    for (double t : br)
        if (t > cuts.back() + 1e-13)
            cuts.push_back(t);
    cuts.back() = kPi;

    const Rule gl = gauss_legendre(8, 0.0, 1.0);
    const Rule jl = gauss_jacobi_left(16, alpha, 0.0, 1.0);
    const Rule jr = gauss_jacobi_right(16, alpha, 0.0, 1.0);
    double total = 0.0;
    const std::size_t np = cuts.size() - 1;
    for (std::size_t p = 0; p < np; ++p) {
        const double a = cuts[p], b = cuts[p + 1];
        if (p == 0) {
            const Rule r = on_interval(jl, a, b, 1.0 + alpha);
            total += r.apply([&](double t) { return std::pow(std::sin(t) / t, alpha) * F(t); });
        } else if (p == np - 1) {
            const Rule r = on_interval(jr, a, b, 1.0 + alpha);
            total += r.apply([&](double t) {
                return std::pow(std::sin(t) / (kPi - t), alpha) * F(t);
            });
        } else {
            const Rule r = on_interval(gl, a, b);
            total += r.apply([&](double t) { return std::pow(std::sin(t), alpha) * F(t); });
        }
    }
    return std::pow(R, 1.0 + alpha) * total;
}

namespace {

double point_value(const Field& u, double x, double y)
{
    return u.eval(x, std::max(y, 0.0));
}

} // namespace

WeissParts weiss_parts(const Field& u, double x0, double R)
{
    const Grid2D& g = *u.grid;
    require_ball(g, x0, R, "weiss");
    const Params& P = g.params;
    WeissParts w;
    w.dirichlet = weighted_dirichlet_in_ball(u, x0, R);
    w.trace = trace_penalty_in_ball(u, x0, R);
    w.surface = weighted_arc_integral({&g}, P.alpha, x0, R, [&](double t) {
        const double v = point_value(u, x0 + R * std::cos(t), R * std::sin(t));
        return v * v;
    });
    w.value = std::pow(R, -P.kappa_vol) * (w.dirichlet + 2.0 * w.trace) -
              P.beta * std::pow(R, -P.kappa_surf) * w.surface;
    return w;
}

double weiss(const Field& u, double x0, double R) { return weiss_parts(u, x0, R).value; }

double homogeneity_defect(const Field& u, double x0, double R)
{
    const Grid2D& g = *u.grid;
    require_ball(g, x0, R, "homogeneity_defect");
    const double s = g.params.s, beta = g.params.beta;
    return weighted_arc_integral({&g}, g.params.alpha, x0, R, [&](double t) {
        const double ct = std::cos(t), st = std::sin(t);
        const double x = x0 + R * ct, y = std::max(R * st, 0.0);
        const Field::Local L = u.local(x, y);
        // sin(t) u_y = 2s u_Y y^{2s} / R, bounded at y = 0.
        const double un = ct * L.ux + 2.0 * s * L.uY * std::pow(y, 2.0 * s) / R;
        const double r = un - beta * L.value / R;
        return r * r;
    });
}

namespace {

void check_radii(const std::vector<double>& radii)
{
    if (radii.size() < 2)
        throw ParameterError("sweep: at least two radii are required");
    for (std::size_t k = 1; k < radii.size(); ++k)
        if (!(radii[k] > radii[k - 1]))
            throw ParameterError("sweep: radii must be increasing");
}

} // namespace

FunctionalSweep weiss_sweep(const Field& u, double x0, const std::vector<double>& radii,
                            double tol_constant)
{
    check_radii(radii);
    const Grid2D& g = *u.grid;
    const Params& P = g.params;
    FunctionalSweep sw;
    sw.radii = radii;
    sw.tol_constant = tol_constant;
    std::vector<double> scale;
    for (double R : radii) {
        const WeissParts w = weiss_parts(u, x0, R);
        sw.values.push_back(w.value);
        sw.defects.push_back(homogeneity_defect(u, x0, R));
        scale.push_back(std::pow(R, -P.kappa_vol) * w.dirichlet);
    }
    for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
        const double dR = radii[k + 1] - radii[k];
        const double fd = (sw.values[k + 1] - sw.values[k]) / dR;
        const double R = radii[k];
        const double tol = tol_constant * (g.hx / R) * std::max(scale[k], scale[k + 1]) / R;
        sw.forward_differences.push_back(fd);
        sw.tolerances.push_back(tol);
        sw.tol_mono = std::max(sw.tol_mono, tol);
        if (fd < -tol)
            ++sw.violation_count;
    }
    return sw;
}

double monneau(const Field& u, const PointFn& p, double x0, double R)
{
    const Grid2D& g = *u.grid;
    require_ball(g, x0, R, "monneau");
    const Params& P = g.params;
    const double I = weighted_arc_integral({&g}, P.alpha, x0, R, [&](double t) {
        const double x = x0 + R * std::cos(t), y = R * std::sin(t);
        const double d = point_value(u, x, y) - p(x, std::max(y, 0.0));
        return d * d;
    });
    return std::pow(R, -P.kappa_surf) * I;
}

double monneau(const Field& u, const Field& p, double x0, double R)
{
    const Grid2D& g = *u.grid;
    require_ball(g, x0, R, "monneau");
    require_ball(*p.grid, x0, R, "monneau");
    const Params& P = g.params;
    const double I = weighted_arc_integral({&g, p.grid.get()}, P.alpha, x0, R, [&](double t) {
        const double x = x0 + R * std::cos(t), y = R * std::sin(t);
        const double d = point_value(u, x, y) - point_value(p, x, y);
        return d * d;
    });
    return std::pow(R, -P.kappa_surf) * I;
}

double monneau(const Field& u, const Profile& p, double x0, double R, int nu)
{
    return monneau(
        u, [&](double x, double y) { return eval_halfplane(p, nu * (x - x0), y); }, x0, R);
}

FunctionalSweep monneau_sweep(const Field& u, const Profile& p, double x0, int nu,
                              const std::vector<double>& radii, double tol_constant)
{
    check_radii(radii);
    const Grid2D& g = *u.grid;
    const Params& P = g.params;
    FunctionalSweep sw;
    sw.radii = radii;
    sw.tol_constant = tol_constant;
    std::vector<double> scale;
    for (double R : radii) {
        sw.values.push_back(monneau(u, p, x0, R, nu));
        const double n2 = weighted_arc_integral({&g}, P.alpha, x0, R, [&](double t) {
            const double x = x0 + R * std::cos(t), y = std::max(R * std::sin(t), 0.0);
            const double a = point_value(u, x, y), b = eval_halfplane(p, nu * (x - x0), y);
            return a * a + b * b;
        });
        scale.push_back(std::pow(R, -P.kappa_surf) * n2);
    }
    for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
        const double fd = (sw.values[k + 1] - sw.values[k]) / (radii[k + 1] - radii[k]);
        const double R = radii[k];
        const double hr = g.hx / R;
        const double tol = tol_constant * hr * hr * std::max(scale[k], scale[k + 1]) / R;
        sw.forward_differences.push_back(fd);
        sw.tolerances.push_back(tol);
        sw.tol_mono = std::max(sw.tol_mono, tol);
        if (fd < -tol)
            ++sw.violation_count;
    }
    return sw;
}

BlowupReport blowup_sequence(const Field& u, double x0, const std::vector<double>& r_list,
                             const Profile& candidate, int ref_n)
{
    const Grid2D& g = *u.grid;
    for (std::size_t k = 1; k < r_list.size(); ++k)
        if (!(r_list[k] < r_list[k - 1]))
            throw ParameterError("blowup_sequence: radii must be decreasing");
    auto ref = std::make_shared<Grid2D>(build_grid_range(
        ref_n, ref_n, x0 - 1.0, x0 + 1.0, 1.0, default_grading(g.params), g.params));
    BlowupReport rep;
    for (std::size_t k = 0; k < r_list.size(); ++k) {
        const double r = r_list[k];
        if (r < 8.0 * g.hx) {
            rep.truncated = true;
            rep.rejected_radii.insert(rep.rejected_radii.end(), r_list.begin() + k, r_list.end());
            break;
        }
        if (x0 - r < g.xmin - 1e-12 || x0 + r > g.xmax + 1e-12 || r > g.Ly + 1e-12) {
            rep.rejected_radii.push_back(r);
            continue;
        }
        rep.radii.push_back(r);
        rep.rescaled.push_back(rescale_field_onto(u, r, x0, ref));
    }
    if (rep.rescaled.empty())
        throw DomainError("blowup_sequence: no admissible radius");
    const double alpha = g.params.alpha;
    auto arc = [&](const std::function<double(double, double)>& f) {
        return weighted_arc_integral({ref.get()}, alpha, x0, 1.0, [&](double t) {
            return f(x0 + std::cos(t), std::max(std::sin(t), 0.0));
        });
    };
    for (std::size_t k = 0; k + 1 < rep.rescaled.size(); ++k) {
        const Field& a = rep.rescaled[k];
        const Field& b = rep.rescaled[k + 1];
        rep.successive_distances.push_back(std::sqrt(arc([&](double x, double y) {
            const double d = a.eval(x, y) - b.eval(x, y);
            return d * d;
        })));
    }
    const Field& last = rep.rescaled.back();
    double best = -1.0, best_norm = 1.0;
    for (int nu : {1, -1}) {
        const double d = std::sqrt(arc([&](double x, double y) {
            const double e = last.eval(x, y) - eval_halfplane(candidate, nu * (x - x0), y);
            return e * e;
        }));
        if (best < 0.0 || d < best) {
            best = d;
            rep.best_orientation = nu;
            best_norm = std::sqrt(arc([&](double x, double y) {
                const double p = eval_halfplane(candidate, nu * (x - x0), y);
                return p * p;
            }));
        }
    }
    rep.final_distance = best;
    rep.final_relative_distance = best_norm > 0.0 ? best / best_norm : best;
    return rep;
}

NormalFit fit_halfplane_normal_2d(const std::function<double(double, double)>& trace,
                                  std::array<double, 2> x0, double r, double beta,
                                  int resolution)
{
    if (!(r > 0.0) || resolution < 11)
        throw ParameterError("fit_halfplane_normal_2d: invalid radius or resolution");
    std::vector<std::array<double, 2>> pts;
    std::vector<double> vals;
    double vv = 0.0;
    const double scale = std::pow(r, -beta);
    for (int a = 0; a < resolution; ++a)
        for (int b = 0; b < resolution; ++b) {
            const double p = -1.0 + 2.0 * a / (resolution - 1);
            const double q = -1.0 + 2.0 * b / (resolution - 1);
            if (p * p + q * q > 1.0)
                continue;
            pts.push_back({p, q});
            vals.push_back(scale * trace(x0[0] + r * p, x0[1] + r * q));
            vv += vals.back() * vals.back();
        }
    auto misfit = [&](double ang, double* amp) {
        const double c = std::cos(ang), s = std::sin(ang);
        double vb = 0.0, bb = 0.0;
        std::vector<double> basis(pts.size());
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double t = c * pts[k][0] + s * pts[k][1];
            basis[k] = t > 0.0 ? std::pow(t, beta) : 0.0;
            vb += vals[k] * basis[k];
            bb += basis[k] * basis[k];
        }
        const double A = bb > 0.0 ? vb / bb : 0.0;
        double res = 0.0;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double e = vals[k] - A * basis[k];
            res += e * e;
        }
        if (amp)
            *amp = A;
        return vv > 0.0 ? std::sqrt(res / vv) : std::sqrt(res);
    };
    const int nscan = 720;
    double best = 0.0, beste = misfit(0.0, nullptr);
    for (int k = 1; k < nscan; ++k) {
        const double ang = 2.0 * kPi * k / nscan;
        const double e = misfit(ang, nullptr);
        if (e < beste) {
            beste = e;
            best = ang;
        }
    }
    double lo = best - 2.0 * kPi / nscan, hi = best + 2.0 * kPi / nscan;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
    double e1 = misfit(m1, nullptr), e2 = misfit(m2, nullptr);
    for (int it = 0; it < 50; ++it) {
        if (e1 <= e2) {
            hi = m2;
            m2 = m1;
            e2 = e1;
            m1 = hi - gr * (hi - lo);
            e1 = misfit(m1, nullptr);
        } else {
            lo = m1;
            m1 = m2;
            e1 = e2;
            m2 = lo + gr * (hi - lo);
            e2 = misfit(m2, nullptr);
        }
    }
    NormalFit fit;
    fit.angle = std::remainder(0.5 * (lo + hi), 2.0 * kPi);
    fit.residual = misfit(fit.angle, &fit.amplitude);
    return fit;
}

} // namespace fbnl
