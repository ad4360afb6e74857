#include "fbnl/comparison_geometry.hpp"

#include "fbnl/error.hpp"
#include "fbnl/numerics/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fbnl {

namespace {

constexpr double kWeightFloor = 1e-30;
constexpr double kThetaMin = 0.1;
constexpr double kThetaMax = 2.0;

void require_point(const Params& params, const std::vector<double>& X)
{
    if (static_cast<int>(X.size()) != params.n + 1)
        throw ParameterError("point has " + std::to_string(X.size()) + " coordinates, expected " +
                             std::to_string(params.n + 1));
    for (double v : X)
        if (!std::isfinite(v))
            throw ParameterError("point coordinate is not finite");
    if (X.back() < 0.0)
        throw DomainError("point lies below z = 0");
}

double tangential_sq(const std::vector<double>& X, int n)
{
    double acc = 0.0;
    for (int k = 0; k + 1 < n; ++k)
        acc += X[k] * X[k];
    return acc;
}

// U_t with the exact value 0 on {z = 0, t < 0}.
double profile_dt(const Profile& p, double t, double z)
{
    if (z == 0.0 && t < 0.0)
        return 0.0;
    return eval_halfplane(p, t, z, 1);
}

} // namespace

RadialSubsolution make_radial_subsolution(const Params& params, double R,
                                          std::shared_ptr<const Profile> profile)
{
    if (!profile)
        throw ParameterError("radial subsolution needs a profile");
    if (params.n < 1)
        throw ParameterError("dimension n must be at least 1");
    if (!(R > 0.0) || !std::isfinite(R))
        throw ParameterError("radius R must be positive and finite");
    if (std::abs(profile->params.s - params.s) > 1e-14 ||
        std::abs(profile->params.gamma - params.gamma) > 1e-14)
        throw ParameterError("profile exponents do not match the parameters");
    return RadialSubsolution{params, R, std::move(profile)};
}

double eval_VR(const RadialSubsolution& sub, double t, double z)
{
    const int n = sub.params.n;
    return eval_halfplane(*sub.profile, t, z) * ((n - 1) * t / sub.R + 1.0);
}

double eval_vR(const RadialSubsolution& sub, const std::vector<double>& X)
{
    require_point(sub.params, X);
    const int n = sub.params.n;
    const double z = X[n];
    if (n == 1)
        return eval_halfplane(*sub.profile, X[0], z);
    const double xn = X[n - 1] - sub.R;
    const double rho = std::sqrt(tangential_sq(X, n) + xn * xn);
    return eval_VR(sub, sub.R - rho, z);
}

SubsolutionReport subsolution_residual(const RadialSubsolution& sub,
                                       const std::vector<std::array<double, 2>>& samples,
                                       double R_max)
{
    if (samples.empty())
        throw ParameterError("subsolution check needs samples");
    const int n = sub.params.n;
    const double R = sub.R;
    const Profile& p = *sub.profile;

    SubsolutionReport rep;
    rep.samples = samples;
    rep.trivially_satisfied = (n == 1);

    std::vector<double> U(samples.size()), Ut(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto [t, z] = samples[k];
        if (z < 0.0 || (z == 0.0 && t <= 0.0))
            throw DomainError("subsolution sample outside the positivity region");
        if (t >= R)
            throw DomainError("subsolution sample beyond the center of rotation");
        U[k] = eval_halfplane(p, t, z);
        Ut[k] = eval_halfplane(p, t, z, 1);
        const double rho = R - t;
        const double un = 2.0 * (n - 1) / R * Ut[k] -
                          (n - 1) / rho * (((n - 1) * t / R + 1.0) * Ut[k] + (n - 1) * U[k] / R);
        rep.unreduced.push_back(un);
    }

    auto reduced = [&](double Rv, std::size_t k) {
        const double t = samples[k][0];
        return (Rv - (n + 1) * t) * Ut[k] - (n - 1) * U[k];
    };

    if (n == 1) {
        rep.residual = rep.unreduced;
        rep.min_residual = *std::min_element(rep.residual.begin(), rep.residual.end());
        rep.R0 = 0.0;
        rep.R0_closed = 0.0;
        return rep;
    }

    for (std::size_t k = 0; k < samples.size(); ++k)
        rep.residual.push_back(reduced(R, k));
    rep.min_residual = *std::min_element(rep.residual.begin(), rep.residual.end());

    const double inf = std::numeric_limits<double>::infinity();
    rep.R0_closed = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (!(Ut[k] > 0.0)) {
            rep.R0_closed = inf;
            break;
        }
        rep.R0_closed =
            std::max(rep.R0_closed, (n + 1) * samples[k][0] + (n - 1) * U[k] / Ut[k]);
    }

    auto all_ok = [&](double Rv) {
        for (std::size_t k = 0; k < samples.size(); ++k)
            if (reduced(Rv, k) < 0.0)
                return false;
        return true;
    };
    if (!all_ok(R_max)) {
        rep.R0 = inf;
        return rep;
    }
    double lo = 0.0, hi = R_max;
    if (all_ok(lo)) {
        rep.R0 = 0.0;
        return rep;
    }
    while (hi - lo > 1e-13 * hi && rep.bisection_iterations < 200) {
        const double mid = 0.5 * (lo + hi);
        (all_ok(mid) ? hi : lo) = mid;
        ++rep.bisection_iterations;
    }
    rep.R0 = hi;
    return rep;
}

NeumannReport neumann_check(const RadialSubsolution& sub, const std::vector<double>& t)
{
    if (t.empty())
        throw ParameterError("Neumann check needs samples");
    const Params& P = sub.params;
    if (P.gamma == 0.0)
        throw ParameterError("Neumann check needs gamma > 0");
    const Profile& p = *sub.profile;
    NeumannReport rep;
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (double tk : t) {
        if (!(tk > 0.0) || tk >= sub.R)
            throw DomainError("Neumann sample must satisfy 0 < t < R");
        const double factor = (P.n - 1) * tk / sub.R + 1.0;
        const double v = eval_VR(sub, tk, 0.0);
        const double rhs = P.gamma * std::pow(v, P.gamma - 1.0);
        const double lhs = std::pow(factor, 2.0 - P.gamma) * rhs;
        const double flux =
            factor * p.amplitude * p.measured_slope * std::pow(tk, P.beta - 2.0 * P.s);
        rep.t.push_back(tk);
        rep.lhs.push_back(lhs);
        rep.rhs.push_back(rhs);
        rep.flux.push_back(flux);
        rep.min_margin = std::min(rep.min_margin, (lhs - rhs) / rhs);
        rep.max_flux_mismatch = std::max(rep.max_flux_mismatch, std::abs(flux - lhs) / lhs);
    }
    return rep;
}

double gamma_R(const Params& params, double R, const std::vector<double>& X)
{
    require_point(params, X);
    const int n = params.n;
    const double xn = X[n - 1];
    const double r = std::hypot(xn, X[n]);
    return -tangential_sq(X, n) / (2.0 * R) + 2.0 * (n - 1) * xn * r / R;
}

DomainVariationSample domain_variation(const PointFnN& g, const Profile& U_ref, double epsilon,
                                       const std::vector<double>& X, int scan)
{
    if (!(epsilon > 0.0))
        throw ParameterError("domain variation needs epsilon > 0");
    if (scan < 8)
        throw ParameterError("domain variation scan needs at least 8 intervals");
    if (X.size() < 2)
        throw ParameterError("point needs at least (x_n, z)");
    const std::size_t m = X.size();
    const double xn = X[m - 2], z = X[m - 1];
    if (z < 0.0 || (z == 0.0 && xn <= 0.0))
        throw DomainError("domain variation is undefined on the contact set of U");
    const double target = eval_halfplane(U_ref, xn, z);

    std::vector<double> Y = X;
    auto h = [&](double w) {
        Y[m - 2] = xn - epsilon * w;
        return target - g(Y);
    };

    DomainVariationSample out;
    out.X = X;
    const double lo = -1.0 - 1e-6, hi = 1.0 + 1e-6;
    double a = lo, fa = h(a);
    if (fa == 0.0)
        out.roots.push_back(a);
    for (int k = 1; k <= scan; ++k) {
        const double b = lo + (hi - lo) * k / scan;
        const double fb = h(b);
        if (fb == 0.0) {
            out.roots.push_back(b);
        } else if (fa != 0.0 && (fa < 0.0) != (fb < 0.0)) {
            double l = a, r = b, fl = fa;
            for (int it = 0; it < 200 && r - l > 4e-16 * std::max(1.0, std::abs(l)); ++it) {
                const double mid = 0.5 * (l + r);
                const double fm = h(mid);
                if (fm == 0.0) {
                    l = r = mid;
                    break;
                }
                if ((fm < 0.0) == (fl < 0.0)) {
                    l = mid;
                    fl = fm;
                } else {
                    r = mid;
                }
            }
            out.roots.push_back(0.5 * (l + r));
        }
        a = b;
        fa = fb;
    }
    if (out.roots.empty())
        throw DomainError("no domain variation root in [-1, 1]");
    out.w = out.roots.front();
    out.multivalued = out.roots.size() > 1;
    return out;
}

DomainVariation domain_variation(const PointFnN& g, const Profile& U_ref, double epsilon,
                                 const std::vector<std::vector<double>>& points, int scan)
{
    DomainVariation dv;
    dv.epsilon = epsilon;
    for (const auto& X : points) {
        dv.samples.push_back(domain_variation(g, U_ref, epsilon, X, scan));
        if (dv.samples.back().multivalued)
            dv.multivalued_flags.push_back(static_cast<int>(dv.samples.size()) - 1);
    }
    return dv;
}

std::vector<std::vector<double>> half_ball_lattice(int n, double radius, double spacing)
{
    if (n < 1 || !(radius > 0.0) || !(spacing > 0.0) || spacing > radius)
        throw ParameterError("half-ball lattice needs n >= 1 and 0 < spacing <= radius");
    std::vector<std::vector<double>> pts;
    const int m = static_cast<int>(std::floor(radius / spacing + 1e-12));
    const double r2max = radius * radius * (1.0 + 1e-12);
    std::vector<int> c(n, -m);
    for (;;) {
        for (int kz = 0; spacing * (kz + 0.5) < radius; ++kz) {
            std::vector<double> X(n + 1);
            double r2 = 0.0;
            for (int k = 0; k < n; ++k) {
                X[k] = spacing * c[k];
                r2 += X[k] * X[k];
            }
            X[n] = spacing * (kz + 0.5);
            r2 += X[n] * X[n];
            if (r2 <= r2max)
                pts.push_back(std::move(X));
        }
        int k = 0;
        while (k < n && ++c[k] > m)
            c[k++] = -m;
        if (k == n)
            break;
    }
    return pts;
}

RotationSweep rotation_sweep(const Params& params, std::shared_ptr<const Profile> profile,
                             const std::vector<double>& radii, double spacing)
{
    if (params.n < 2)
        throw ParameterError("rotation sweep needs n >= 2");
    if (radii.empty())
        throw ParameterError("rotation sweep needs radii");
    if (!(spacing > 0.0) || spacing > 0.25)
        throw ParameterError("lattice spacing must lie in (0, 0.25]");
    const int n = params.n;

    const std::vector<std::vector<double>> pts = half_ball_lattice(n, 0.5, spacing);

    RotationSweep out;
    out.samples = static_cast<int>(pts.size());
    for (double R : radii) {
        if (!(R > 1.0))
            throw ParameterError("rotation sweep radii must exceed 1");
        const RadialSubsolution sub = make_radial_subsolution(params, R, profile);
        auto g = [&](const std::vector<double>& X) { return eval_vR(sub, X); };
        double C = 0.0, CL = 0.0;
        for (const auto& X : pts) {
            const auto smp = domain_variation(g, *profile, 1.0, X);
            double r2 = 0.0;
            for (double v : X)
                r2 += v * v;
            const double dev = std::abs(smp.w - gamma_R(params, R, X));
            C = std::max(C, dev * R * R / r2);
            CL = std::max(CL, dev * R / r2);
        }
        out.R.push_back(R);
        out.C.push_back(C);
        out.C_linear.push_back(CL);
    }
    for (std::size_t k = 1; k < out.C.size(); ++k)
        out.drift = std::max(out.drift, out.C[k] / out.C[k - 1] - 1.0);
    return out;
}

LinearizedResult solve_linearized(std::shared_ptr<const Grid2D> grid, const Profile& profile,
                                  const std::function<double(double, double)>& data,
                                  const SolverOptions& opts)
{
    if (!grid)
        throw ParameterError("linearized solve needs a grid");
    const Grid2D& G = *grid;
    if (std::abs(G.params.s - profile.params.s) > 1e-14 ||
        std::abs(G.params.gamma - profile.params.gamma) > 1e-14)
        throw ParameterError("grid and profile exponents differ");
    const int nx = G.nx, ny = G.ny;
    const double two_s = 2.0 * G.params.s;

    LinearizedResult res;
    Conductances c = weighted_conductances(G);
    auto scale = [&](double& cf, double x, double y) {
        const double ut = profile_dt(profile, x, y);
        double w = ut * ut;
        if (!(w >= kWeightFloor)) {
            w = kWeightFloor;
            ++res.floored_faces;
        }
        cf *= w;
    };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i)
            scale(c.cx[j * nx + i], G.x[i] + 0.5 * G.hx, G.y[j]);
    for (int j = 0; j < ny; ++j) {
        const double ymid = std::pow(0.5 * (G.Y[j] + G.Y[j + 1]), 1.0 / two_s);
        for (int i = 0; i <= nx; ++i)
            scale(c.cy[j * (nx + 1) + i], G.x[i], ymid);
    }

    std::vector<char> fixed(G.size(), 0);
    Field w(grid);
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            if (i == 0 || i == nx || j == ny) {
                fixed[G.idx(i, j)] = 1;
                const double v = data(G.x[i], G.y[j]);
                if (!std::isfinite(v))
                    throw ParameterError("linearized boundary data is not finite");
                w.at(i, j) = v;
            }
    const std::vector<double> rhs(G.size(), 0.0);
    res.stats = solve_conductance_system(G, c, fixed, w.values, rhs, opts);

    const std::vector<double> Kw = apply_conductances(G, c, w.values);
    std::vector<double> mag(G.size(), 0.0);
    auto add = [&](int a, int b, double cf) {
        const double m = cf * (std::abs(w.values[a]) + std::abs(w.values[b]));
        mag[a] += m;
        mag[b] += m;
    };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i)
            add(G.idx(i, j), G.idx(i + 1, j), c.cx[j * nx + i]);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i)
            add(G.idx(i, j), G.idx(i, j + 1), c.cy[j * (nx + 1) + i]);
    double rmax = 0.0, mmax = 0.0;
    for (int k = 0; k < G.size(); ++k)
        if (!fixed[k]) {
            rmax = std::max(rmax, std::abs(Kw[k]));
            mmax = std::max(mmax, mag[k]);
        }
    res.interior_residual = mmax > 0.0 ? rmax / mmax : rmax;
    w.bottom = BottomCondition::Flux;
    res.w = std::move(w);
    return res;
}

void fit_radial_coefficient(LinearizedResult& res, double r_min, double r_max, int count)
{
    if (!res.w.grid)
        throw ParameterError("radial fit needs a solved field");
    if (!(r_min > 0.0) || !(r_max > r_min) || count < 3)
        throw ParameterError("radial fit needs 0 < r_min < r_max and count >= 3");
    const Grid2D& G = *res.w.grid;
    if (!G.contains(-r_max, r_max) || !G.contains(r_max, 0.0))
        throw DomainError("radial fit radius leaves the grid");
    const double w0 = res.w.eval(0.0, 0.0);
    const Rule rule = gauss_legendre(16, 0.0, M_PI);

    res.fit_r.clear();
    res.fit_w.clear();
    for (int k = 0; k < count; ++k) {
        const double r = r_min * std::pow(r_max / r_min, static_cast<double>(k) / (count - 1));
        const double mean =
            rule.apply([&](double th) { return res.w.eval(r * std::cos(th), r * std::sin(th)); }) /
                M_PI -
            w0;
        res.fit_r.push_back(r);
        res.fit_w.push_back(mean);
    }

    // Linear least squares in (b, c) for a fixed exponent; returns the residual.
    auto solve_bc = [&](double theta, double& b, double& c) {
        double s11 = 0.0, s12 = 0.0, s22 = 0.0, t1 = 0.0, t2 = 0.0;
        for (std::size_t k = 0; k < res.fit_r.size(); ++k) {
            const double a = res.fit_r[k], e = std::pow(a, 1.0 + theta), m = res.fit_w[k];
            s11 += a * a;
            s12 += a * e;
            s22 += e * e;
            t1 += a * m;
            t2 += e * m;
        }
        const double det = s11 * s22 - s12 * s12;
        b = (t1 * s22 - t2 * s12) / det;
        c = (s11 * t2 - s12 * t1) / det;
        double rss = 0.0;
        for (std::size_t k = 0; k < res.fit_r.size(); ++k) {
            const double d = b * res.fit_r[k] + c * std::pow(res.fit_r[k], 1.0 + theta) - res.fit_w[k];
            rss += d * d;
        }
        return rss;
    };

    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = kThetaMin, hi = kThetaMax, b = 0.0, c = 0.0;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = solve_bc(x1, b, c), f2 = solve_bc(x2, b, c);
    for (int it = 0; it < 80 && hi - lo > 1e-10; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = solve_bc(x1, b, c);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = solve_bc(x2, b, c);
        }
    }
    res.fit_theta = 0.5 * (lo + hi);
    solve_bc(res.fit_theta, res.b, res.fit_c);
}

RefinementCheck linearized_refinement(const Profile& profile,
                                      const std::function<double(double, double)>& data,
                                      int n_coarse, int n_fine, bool self_similar)
{
    if (n_coarse < 16 || n_fine <= n_coarse || n_coarse % 2 || n_fine % 2)
        throw ParameterError("refinement needs even sizes 16 <= n_coarse < n_fine");
    const Params& P = profile.params;
    const double q = default_grading(P);
    auto run = [&](int n, double r_min, double r_max) {
        auto g = std::make_shared<const Grid2D>(build_grid_range(n, n, -1.0, 1.0, 1.0, q, P));
        LinearizedResult r = solve_linearized(g, profile, data);
        fit_radial_coefficient(r, r_min, r_max);
        return r.b;
    };
    RefinementCheck out;
    const double hc = 2.0 / n_coarse, hf = 2.0 / n_fine;
    out.window_coarse = {4.0 * hc, 32.0 * hc};
    out.window_fine = self_similar ? std::array<double, 2>{4.0 * hf, 32.0 * hf} : out.window_coarse;
    out.b_coarse = run(n_coarse, out.window_coarse[0], out.window_coarse[1]);
    out.b_fine = run(n_fine, out.window_fine[0], out.window_fine[1]);
    out.noise = std::abs(out.b_coarse - out.b_fine);
    out.pass = std::abs(out.b_fine) <= 10.0 * out.noise;
    return out;
}

} // namespace fbnl
