#include "fbnl/profile.hpp"

#include "angles.hpp"
#include "fbnl/error.hpp"
#include "fbnl/numerics/quadrature.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fbnl {

using detail::cos_t;
using detail::cot_t;
using detail::sin_t;

namespace {

constexpr double kPi = std::numbers::pi;

// Coefficients of theta*cot(theta) = sum_m c_m theta^(2m).
std::vector<double> theta_cot_coefficients(int m)
{
    std::vector<double> cosc(m + 1), sinc(m + 1), c(m + 1);
    double fact = 1.0; // (2i)!
    for (int i = 0; i <= m; ++i) {
        if (i > 0)
            fact *= (2.0 * i - 1.0) * (2.0 * i);
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        cosc[i] = sign / fact;
        sinc[i] = sign / (fact * (2.0 * i + 1.0));
    }
    for (int i = 0; i <= m; ++i) {
        double v = cosc[i];
        for (int j = 1; j <= i; ++j)
            v -= sinc[j] * c[i - j];
        c[i] = v;
    }
    return c;
}

using State = std::array<double, 2>;

struct AngularOde {
    double alpha;
    double k;
    void operator()(const State& x, State& dx, double th) const
    {
        dx[0] = x[1];
        dx[1] = -alpha * cot_t(th) * x[1] - k * x[0];
    }
};

constexpr double kOdeAbsTol = 1e-15;
constexpr double kOdeRelTol = 1e-14;

auto make_stepper()
{
    using namespace boost::numeric::odeint;
    return make_controlled(kOdeAbsTol, kOdeRelTol, runge_kutta_fehlberg78<State>());
}

double hermite5(double h, double t, double f0, double d0, double s0, double f1, double d1,
                double s1)
{
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    const double h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    const double h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    const double h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    const double h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    const double h5 = 0.5 * (t3 - 2.0 * t4 + t5);
    return h0 * f0 + h * h1 * d0 + h * h * h2 * s0 + h3 * f1 + h * h4 * d1 + h * h * h5 * s1;
}

} // namespace

double FrobeniusSeries::value(double th) const
{
    const double t2 = th * th;
    double acc = 0.0;
    for (std::size_t j = a.size(); j-- > 0;)
        acc = acc * t2 + a[j];
    if (sigma == 0.0)
        return acc;
    return std::pow(th, sigma) * acc;
}

double FrobeniusSeries::deriv(double th) const
{
    // d/dth sum a_j th^(2j+sigma) = sum (2j+sigma) a_j th^(2j+sigma-1)
    if (th == 0.0) {
        if (sigma == 0.0)
            return 0.0;
        return sigma < 1.0 ? std::copysign(HUGE_VAL, a[0]) : (sigma == 1.0 ? a[0] : 0.0);
    }
    const double t2 = th * th;
    double acc = 0.0;
    for (std::size_t j = a.size(); j-- > 0;)
        acc = acc * t2 + (2.0 * j + sigma) * a[j];
    return std::pow(th, sigma - 1.0) * acc;
}

FrobeniusSeries frobenius_series(double alpha, double k, double sigma, int terms)
{
    const std::vector<double> cc = theta_cot_coefficients(terms);
    FrobeniusSeries s;
    s.sigma = sigma;
    s.a.assign(terms, 0.0);
    s.a[0] = 1.0;
    for (int jj = 1; jj < terms; ++jj) {
        const double j = 2.0 * jj;
        const double denom = (j + sigma) * (j + sigma - 1.0 + alpha);
        double sum = k * s.a[jj - 1];
        for (int m = 1; m <= jj; ++m)
            sum += alpha * cc[m] * (j - 2.0 * m + sigma) * s.a[jj - m];
        s.a[jj] = -sum / denom;
    }
    return s;
}

double Profile::g(double th) const
{
    if (th <= series_offset)
        return regular.value(th) + singular_coeff * singular.value(th);
    if (th >= kPi - series_offset) {
        const double ph = std::max(kPi - th, 0.0);
        return pi_regular_coeff * regular.value(ph) + pi_singular_coeff * singular.value(ph);
    }
    const double u = (th - grid_theta.front()) / grid_h;
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(u), grid_theta.size() - 2);
    const double t = (th - grid_theta[i]) / grid_h;
    return hermite5(grid_h, t, grid_g[i], grid_dg[i], grid_d2g[i], grid_g[i + 1], grid_dg[i + 1],
                    grid_d2g[i + 1]);
}

double Profile::dg(double th) const
{
    if (th <= series_offset)
        return regular.deriv(th) + singular_coeff * singular.deriv(th);
    if (th >= kPi - series_offset) {
        const double ph = std::max(kPi - th, 0.0);
        return -(pi_regular_coeff * regular.deriv(ph) + pi_singular_coeff * singular.deriv(ph));
    }
    const double u = (th - grid_theta.front()) / grid_h;
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(u), grid_theta.size() - 2);
    const double t = (th - grid_theta[i]) / grid_h;
    return hermite5(grid_h, t, grid_dg[i], grid_d2g[i], grid_d3g[i], grid_dg[i + 1],
                    grid_d2g[i + 1], grid_d3g[i + 1]);
}

double Profile::d2g(double th) const
{
    return -params.alpha * cot_t(th) * dg(th) - k() * g(th);
}

Profile solve_profile(const Params& params)
{
    Profile p;
    p.params = params;
    const double alpha = params.alpha;
    const double k = p.k();
    const double s2 = 2.0 * params.s;
    const double off = p.series_offset;
    constexpr int kTerms = 40;
    p.regular = frobenius_series(alpha, k, 0.0, kTerms);
    p.singular = frobenius_series(alpha, k, s2, kTerms);

    const double th_a = off;
    const double th_b = kPi - off;
    const double R = p.regular.value(off), dR = p.regular.deriv(off);
    const double S = p.singular.value(off), dS = p.singular.deriv(off);
    const double det = R * dS - S * dR;
    if (det == 0.0 || !std::isfinite(det))
        throw ConvergenceError("solve_profile: singular endpoint basis");

    const AngularOde ode{alpha, k};
    auto decompose = [&](const State& x, double& d0, double& d1) {
        // g = d0 R(phi) + d1 S(phi), -g' = d0 R'(phi) + d1 S'(phi) at phi = off
        const double gv = x[0], mg = -x[1];
        d0 = (gv * dS - S * mg) / det;
        d1 = (R * mg - gv * dR) / det;
    };
    auto shoot = [&](double c, double& d0, double& d1) {
        State x{R + c * S, dR + c * dS};
        auto stepper = make_stepper();
        boost::numeric::odeint::integrate_adaptive(stepper, ode, x, th_a, th_b, 1e-3);
        if (!std::isfinite(x[0]) || !std::isfinite(x[1]))
            throw ConvergenceError("solve_profile: integrator produced a non-finite state");
        decompose(x, d0, d1);
    };

    // Expansion bracket, then bisection on the regular coefficient at pi.
    double lo = -1.0, hi = 1.0, flo, fhi, tmp;
    shoot(lo, flo, tmp);
    shoot(hi, fhi, tmp);
    int expansions = 0;
    while (flo * fhi > 0.0) {
        if (++expansions > 40) {
            std::ostringstream os;
            os << "solve_profile: no sign change of the regular coefficient on [" << lo << ", "
               << hi << "]";
            throw ConvergenceError(os.str());
        }
        lo *= 2.0;
        hi *= 2.0;
        shoot(lo, flo, tmp);
        shoot(hi, fhi, tmp);
    }
    int iters = 0;
    while (hi - lo > 1e-9 * std::max(1.0, std::abs(lo) + std::abs(hi)) && iters < 200) {
        const double mid = 0.5 * (lo + hi);
        double fm;
        shoot(mid, fm, tmp);
        if (fm == 0.0) {
            lo = hi = mid;
            flo = fhi = 0.0;
            break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        ++iters;
    }
    // The regular coefficient is affine in c, so one secant step on the
    // final bracket lands on the root up to rounding.
    double c = (lo == hi) ? lo : lo - flo * (hi - lo) / (fhi - flo);
    p.shooting_iterations = iters;
    p.singular_coeff = c;
    p.measured_slope = s2 * c;

    // Dense interior tabulation.
    const int cells = 1024;
    p.grid_h = (th_b - th_a) / cells;
    p.grid_theta.resize(cells + 1);
    for (int i = 0; i <= cells; ++i)
        p.grid_theta[i] = th_a + i * p.grid_h;
    p.grid_theta.back() = th_b;
    p.grid_g.clear();
    p.grid_dg.clear();
    {
        State x{R + c * S, dR + c * dS};
        auto stepper = make_stepper();
        boost::numeric::odeint::integrate_times(
            stepper, ode, x, p.grid_theta.begin(), p.grid_theta.end(), 1e-3,
            [&](const State& st, double) {
                p.grid_g.push_back(st[0]);
                p.grid_dg.push_back(st[1]);
            });
        decompose(x, p.pi_regular_coeff, p.pi_singular_coeff);
    }
    p.grid_d2g.resize(cells + 1);
    p.grid_d3g.resize(cells + 1);
    for (int i = 0; i <= cells; ++i) {
        const double th = p.grid_theta[i];
        const double ct = cot_t(th), sn = sin_t(th);
        const double g0 = p.grid_g[i], g1 = p.grid_dg[i];
        const double g2 = -alpha * ct * g1 - k * g0;
        p.grid_d2g[i] = g2;
        p.grid_d3g[i] = -alpha * (-g1 / (sn * sn) + ct * g2) - k * g1;
    }

    // Endpoint-refined output nodes.
    std::vector<double> left;
    for (int m = 40; m >= 1; --m)
        left.push_back(off * std::ldexp(1.0, -m));
    for (int i = 1; i < 16; ++i)
        left.push_back(off * i / 16.0);
    std::sort(left.begin(), left.end());
    left.erase(std::unique(left.begin(), left.end()), left.end());
    std::vector<double>& nodes = p.theta_nodes;
    nodes = left;
    for (double th : p.grid_theta)
        nodes.push_back(th);
    for (auto it = left.rbegin(); it != left.rend(); ++it)
        nodes.push_back(kPi - *it);
    p.g_values.resize(nodes.size());
    p.g_prime.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        p.g_values[i] = p.g(nodes[i]);
        p.g_prime[i] = p.dg(nodes[i]);
    }
    return p;
}

Profile with_amplitude(Profile p, double amplitude)
{
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
        throw ParameterError("amplitude must be finite and nonnegative");
    p.amplitude = amplitude;
    return p;
}

double eval_halfplane(const Profile& profile, double t, double z, int order)
{
    if (z < 0.0)
        throw DomainError("eval_halfplane: z must be nonnegative");
    const double beta = profile.params.beta;
    const double r = std::hypot(t, z);
    if (order == 0) {
        // The contact set: g(pi) = 0 holds exactly, not up to the shooting residual.
        if (r == 0.0 || (z == 0.0 && t < 0.0))
            return 0.0;
        const double th = std::atan2(z, t);
        return profile.amplitude * std::pow(r, beta) * profile.g(th);
    }
    if (order != 1)
        throw ParameterError("eval_halfplane: order must be 0 or 1");
    if (r == 0.0)
        throw DomainError("eval_halfplane: derivative undefined at the origin");
    const double th = std::atan2(z, t);
    const double gv = profile.g(th), dgv = (z == 0.0) ? 0.0 : profile.dg(th);
    // On z = 0 the term g' sin(theta) vanishes in the limit from both sides.
    const double tangential = (z == 0.0) ? 0.0 : dgv * (z / r);
    return profile.amplitude * std::pow(r, beta - 1.0) * (beta * gv * (t / r) - tangential);
}

double eval_halfplane_dz(const Profile& profile, double t, double z)
{
    if (z < 0.0)
        throw DomainError("eval_halfplane_dz: z must be nonnegative");
    const double beta = profile.params.beta;
    const double r = std::hypot(t, z);
    if (r == 0.0)
        throw DomainError("eval_halfplane_dz: derivative undefined at the origin");
    const double th = std::atan2(z, t);
    return profile.amplitude * std::pow(r, beta - 1.0) *
           (beta * profile.g(th) * (z / r) + profile.dg(th) * (t / r));
}

// g'/g. Near pi only the singular branch is used: g(pi) = 0 is the
// normalization, and the regular coefficient there is a shooting residual
// that would otherwise dominate g at (pi - theta)^{2s} ~ 1e-14.
double log_derivative(const Profile& profile, double theta)
{
    if (theta >= kPi - profile.series_offset) {
        const double ph = kPi - theta;
        return -profile.singular.deriv(ph) / profile.singular.value(ph);
    }
    const double gv = profile.g(theta);
    if (!(gv > 0.0)) {
        std::ostringstream os;
        os << "profile vanishes at interior angle " << theta;
        throw ConvergenceError(os.str());
    }
    return profile.dg(theta) / gv;
}

double f_at(const Profile& profile, double theta)
{
    const double beta = profile.params.beta;
    if (theta <= 0.0)
        return beta;
    if (theta >= kPi)
        return 2.0 * profile.params.s - beta;
    return beta * cos_t(theta) - log_derivative(profile, theta) * sin_t(theta);
}

double F_at(const Profile& profile, double theta)
{
    const double beta = profile.params.beta;
    const double alpha = profile.params.alpha;
    if (theta <= 0.0)
        return beta * beta - beta;
    if (theta >= kPi) {
        const double e = 2.0 * profile.params.s - beta;
        return e * (e + 1.0);
    }
    const double c = cos_t(theta), sn = sin_t(theta);
    return (beta * beta - beta) * c * c + beta * (1.0 - alpha - beta) * sn * sn +
           (2.0 - 2.0 * beta - alpha) * sn * c * log_derivative(profile, theta);
}

namespace {

template <class Fn>
AngularTable angular_table(const Profile& profile, Fn fn)
{
    AngularTable t;
    t.theta.reserve(profile.theta_nodes.size() + 2);
    t.theta.push_back(0.0);
    for (double th : profile.theta_nodes)
        t.theta.push_back(th);
    t.theta.push_back(kPi);
    t.value.reserve(t.theta.size());
    for (double th : t.theta)
        t.value.push_back(fn(profile, th));
    t.limit_0 = t.value.front();
    t.limit_pi = t.value.back();

    // Probes close enough to the endpoints that the theta^{2s} correction
    // at 0 and the (pi - theta)^2 correction at pi drop below 1e-10.
    const double s2 = 2.0 * profile.params.s;
    const double lead = std::max(std::abs(s2 * profile.singular_coeff), 1e-300);
    t.theta_probe_0 = std::min(1e-5, std::pow(1e-10 / lead, 1.0 / s2));
    t.theta_probe_pi = 1e-5;
    t.numeric_0 = fn(profile, t.theta_probe_0);
    t.numeric_pi = fn(profile, kPi - t.theta_probe_pi);

    t.min_value = *std::min_element(t.value.begin(), t.value.end());
    t.sup_abs = 0.0;
    for (double v : t.value)
        t.sup_abs = std::max(t.sup_abs, std::abs(v));
    return t;
}

} // namespace

AngularTable compute_f(const Profile& profile) { return angular_table(profile, f_at); }

AngularTable compute_F(const Profile& profile) { return angular_table(profile, F_at); }

RatioReport check_ratio_bound(const Profile& profile, const std::vector<RatioSample>& samples,
                              double near_pi)
{
    RatioReport rep;
    rep.samples = samples.size();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const RatioSample& sm = samples[i];
        const double r = std::hypot(sm.t, sm.z);
        if (sm.z < 0.0 || r == 0.0 || sm.tau > sm.t) {
            std::ostringstream os;
            os << "ratio sample " << i << " violates tau <= t, z >= 0, (t,z) != 0";
            throw DomainError(os.str());
        }
        const double p1 = std::hypot(sm.tau, sm.z) / r;
        if (p1 < 0.5 || p1 > 1.5) {
            std::ostringstream os;
            os << "ratio sample " << i << " scaled point has radius " << p1
               << ", outside [1/2, 3/2]";
            throw DomainError(os.str());
        }
        const double den = eval_halfplane(profile, sm.t / r, sm.z / r);
        if (!(den > 0.0)) {
            std::ostringstream os;
            os << "ratio sample " << i << " reference point lies on the contact set";
            throw DomainError(os.str());
        }
        const double num = eval_halfplane(profile, sm.tau / r, sm.z / r);
        rep.max_ratio = std::max(rep.max_ratio, num / den);

        const double th1 = std::atan2(sm.z, sm.tau), th2 = std::atan2(sm.z, sm.t);
        if (th1 >= kPi - near_pi && th2 >= kPi - near_pi) {
            const double g1 = profile.g(th1), g2 = profile.g(th2);
            if (g1 > g2 + 1e-14 * std::max(1.0, std::abs(g2)))
                rep.ordering_violations.push_back(i);
        }
    }
    return rep;
}

double max_ode_residual(const Profile& profile, int n, double lo)
{
    const double alpha = profile.params.alpha, k = profile.k();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = std::cos(kPi * (2.0 * i + 1.0) / (2.0 * n));
        const double th = lo + (kPi - 2.0 * lo) * 0.5 * (1.0 - x);
        // Step shrinks with the distance to the singular endpoints.
        const double h = std::min(1e-4, 1e-3 * std::min(th, kPi - th));
        const double d2 = (-profile.dg(th + 2 * h) + 8.0 * profile.dg(th + h) -
                           8.0 * profile.dg(th - h) + profile.dg(th - 2 * h)) /
                          (12.0 * h);
        const double res = d2 + alpha * cot_t(th) * profile.dg(th) + k * profile.g(th);
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

double max_slope_identity_error(const Profile& profile)
{
    const double alpha = profile.params.alpha, k = profile.k();
    const std::vector<double>& nodes = profile.theta_nodes;
    const Rule gl = gauss_legendre(10, 0.0, 1.0);
    auto weight = [&](double th) { return std::pow(sin_t(th), alpha); };

    // First panel [0, nodes[0]] with the theta^alpha factor absorbed.
    const double t0 = nodes.front();
    double integral = gauss_jacobi_left(16, alpha, 0.0, t0).apply([&](double th) {
        return std::pow(sin_t(th) / th, alpha) * profile.g(th);
    });
    double worst = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i > 0) {
            const double a = nodes[i - 1], b = nodes[i];
            double acc = 0.0;
            for (std::size_t q = 0; q < gl.x.size(); ++q) {
                const double th = a + (b - a) * gl.x[q];
                acc += gl.w[q] * weight(th) * profile.g(th);
            }
            integral += (b - a) * acc;
        }
        const double th = nodes[i];
        const double lhs = profile.dg(th) * weight(th);
        const double rhs = profile.measured_slope - k * integral;
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

} // namespace fbnl
