#include "fbnl/frac_quadrature.hpp"

#include "fbnl/error.hpp"
#include "fbnl/numerics/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fbnl {

double kernel_constant(double s)
{
    if (!(s > 0.0 && s < 1.0))
        throw ParameterError("kernel_constant: s must lie in (0,1)");
    return std::pow(4.0, s) * gamma_fn(0.5 + s) /
           (std::sqrt(std::numbers::pi) * std::abs(gamma_fn(-s)));
}

double extension_constant_theory(double s)
{
    if (!(s > 0.0 && s < 1.0))
        throw ParameterError("extension_constant_theory: s must lie in (0,1)");
    return std::pow(2.0, 1.0 - 2.0 * s) * gamma_fn(1.0 - s) / gamma_fn(s);
}

QuadValue compute_A1(const Params& params, double tol)
{
    const double b = params.beta, s = params.s, s2 = 2.0 * s;
    const double C = kernel_constant(s);

    // Zone |y| < 1/2. The even second difference is
    // D(y) = sum_{k>=1} 2 C(beta,2k) y^{2k}; the k = 1 term is integrated
    // in closed form, the rest by adaptive quadrature of the summed series.
    constexpr int kSeries = 60;
    std::vector<double> coef(kSeries + 1, 0.0);
    for (int k = 2; k <= kSeries; ++k)
        coef[k] = 2.0 * binomial(b, 2 * k);
    const double lead = 2.0 * binomial(b, 2) * std::pow(0.5, 2.0 - s2) / (2.0 - s2);
    auto remainder = [&](double y) {
        const double y2 = y * y;
        double acc = 0.0;
        for (int k = kSeries; k >= 2; --k)
            acc = acc * y2 + coef[k];
        // acc * y^4 * y^{-1-2s}
        return acc * y2 * y2 * std::pow(y, -1.0 - s2);
    };
    const QuadValue z1 = integrate_adaptive(remainder, 0.0, 0.5, tol);

    // Zone 1/2 <= |y| <= 2: smooth part plus the (1-y)^beta kink at y = 1.
    auto smooth = [&](double y) { return (std::pow(1.0 + y, b) - 2.0) * std::pow(y, -1.0 - s2); };
    const QuadValue z2a = integrate_adaptive(smooth, 0.5, 2.0, tol);
    const QuadValue z2b = integrate_jacobi_right(
        [&](double y) { return std::pow(y, -1.0 - s2); }, b, 0.5, 1.0, tol);

    // Zone |y| > 2 after y = 2/t: 2^{beta-2s} int_0^1 (1+t/2)^beta t^{2s-beta-1} dt,
    // minus the constant part 2 int_2^inf y^{-1-2s} dy.
    const QuadValue z3 = integrate_jacobi_left(
        [&](double t) { return std::pow(1.0 + 0.5 * t, b); }, s2 - b - 1.0, 0.0, 1.0, tol);
    const double tail = std::pow(2.0, b - s2) * z3.value - 2.0 * std::pow(2.0, -s2) / s2;

    const double half = lead + z1.value + z2a.value + z2b.value + tail;
    const double err = z1.error + z2a.error + z2b.error + std::pow(2.0, b - s2) * z3.error;
    return {-C * half, C * err};
}

QuadValue compute_A2(const Params& params, double tol)
{
    const double b = params.beta, s2 = 2.0 * params.s;
    const double C = kernel_constant(params.s);
    const QuadValue near = integrate_jacobi_left(
        [&](double y) { return std::pow(y, -1.0 - s2); }, b, 1.0, 2.0, 0.5 * tol / C);
    const double scale = std::pow(2.0, b - s2);
    const QuadValue far = integrate_jacobi_left(
        [&](double t) { return std::pow(1.0 - 0.5 * t, b); }, s2 - b - 1.0, 0.0, 1.0,
        0.5 * tol / (C * scale));
    return {-C * (near.value + scale * far.value), C * (near.error + scale * far.error)};
}

HalfPlaneConstants amplitude_A(const Params& params)
{
    if (params.gamma == 0.0)
        throw ParameterError("amplitude_A: defined only for gamma > 0 (A1 vanishes at gamma = 0)");
    HalfPlaneConstants hc;
    hc.params = params;
    hc.kernel_c = kernel_constant(params.s);
    const QuadValue a1 = compute_A1(params);
    const QuadValue a2 = compute_A2(params);
    hc.A1 = a1.value;
    hc.A2 = a2.value;
    hc.quadrature_error_estimate = a1.error + a2.error;
    if (!(hc.A1 < 0.0)) {
        std::ostringstream os;
        os << "amplitude_A: A1 = " << hc.A1 << " is not negative";
        throw ConvergenceError(os.str());
    }
    const double b = params.beta, s = params.s, g = params.gamma;
    const double e = 1.0 / (2.0 - g);
    hc.amplitude_A = std::pow((b - s) / (-b * hc.A1), e);
    hc.amplitude_A_equivalent = std::pow(g / (-2.0 * hc.A1), e);
    if (std::abs(hc.amplitude_A - hc.amplitude_A_equivalent) > 1e-10 * hc.amplitude_A)
        throw ConvergenceError("amplitude_A: equivalent forms disagree beyond 1e-10");
    hc.extension_d = extension_constant_theory(s);
    hc.amplitude_A_flux = std::pow(g / (hc.extension_d * (-hc.A1)), e);
    return hc;
}

namespace {

struct Sampler {
    const SampledProfile& sp;
    std::size_t n;

    double tail(double y) const
    {
        if (y > sp.xmax())
            return sp.right.coef * std::pow(y, sp.right.exponent);
        return sp.left.coef * std::pow(-y, sp.left.exponent);
    }

    // Piecewise cubic: on cell [x_i, x_{i+1}] the Lagrange cubic through
    // nodes i-1..i+2, shifted inward at the window edges.
    double operator()(double y) const
    {
        if (y > sp.xmax() || y < sp.x0)
            return tail(y);
        const double u = (y - sp.x0) / sp.dx;
        long i = static_cast<long>(std::floor(u));
        i = std::clamp<long>(i, 0, static_cast<long>(n) - 2);
        long first = std::clamp<long>(i - 1, 0, static_cast<long>(n) - 4);
        const double t = u - static_cast<double>(first);
        const double* v = sp.u.data() + first;
        const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
        const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
        const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
        const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
        return l0 * v[0] + l1 * v[1] + l2 * v[2] + l3 * v[3];
    }
};

} // namespace

std::vector<double> frac_laplacian_profile(const SampledProfile& sp, double s,
                                           const std::vector<double>& xs)
{
    if (!(s > 0.0 && s < 1.0))
        throw ParameterError("frac_laplacian_profile: s must lie in (0,1)");
    if (!sp.left.declared || !sp.right.declared)
        throw ParameterError("frac_laplacian_profile: both tails must be declared");
    const double s2 = 2.0 * s;
    for (const auto* t : {&sp.left, &sp.right})
        if (t->coef != 0.0 && !(t->exponent < s2))
            throw ParameterError("frac_laplacian_profile: tail exponent must be below 2s");
    if (sp.u.size() < 8 || !(sp.dx > 0.0))
        throw ParameterError("frac_laplacian_profile: need at least 8 samples and dx > 0");
    if (!(sp.x0 < 0.0 && sp.xmax() > 0.0))
        throw ParameterError("frac_laplacian_profile: sample window must contain the origin");

    const double C = kernel_constant(s);
    const Sampler u{sp, sp.u.size()};
    const long N = static_cast<long>(sp.u.size());
    const Rule gl = gauss_legendre(6, 0.0, 1.0);

    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) {
        const long m = std::lround((x - sp.x0) / sp.dx);
        if (m < 3 || m > N - 4) {
            std::ostringstream os;
            os << "frac_laplacian_profile: evaluation point " << x << " at the sample-window edge";
            throw DomainError(os.str());
        }
        // Near field h in [0, dx]: quartic through the five nearest nodes,
        // whose symmetric second difference is P'' h^2 + P'''' h^4 / 12.
        const double* v = sp.u.data() + (m - 2);
        const double xi = (x - (sp.x0 + m * sp.dx)) / sp.dx;
        const double c0 = v[2];
        const double c1 = (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / 12.0;
        const double c2 = (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / 24.0;
        const double c3 = (-v[0] + 2.0 * v[1] - 2.0 * v[3] + v[4]) / 12.0;
        const double c4 = (v[0] - 4.0 * v[1] + 6.0 * v[2] - 4.0 * v[3] + v[4]) / 24.0;
        const double ux = c0 + xi * (c1 + xi * (c2 + xi * (c3 + xi * c4)));
        const double d2 = (2.0 * c2 + 6.0 * c3 * xi + 12.0 * c4 * xi * xi) / (sp.dx * sp.dx);
        const double d4 = 24.0 * c4 / std::pow(sp.dx, 4);
        const double H0 = sp.dx;
        double acc = d2 * std::pow(H0, 2.0 - s2) / (2.0 - s2) +
                     d4 / 12.0 * std::pow(H0, 4.0 - s2) / (4.0 - s2);

        // Panels between breakpoints of the piecewise interpolant, up to the
        // point where both x + h and x - h have left the window.
        const double Hout = std::max(x - sp.x0, sp.xmax() - x);
        std::vector<double> bp;
        bp.reserve(sp.u.size() + 2);
        bp.push_back(H0);
        for (long j = 0; j < N; ++j) {
            const double h = std::abs(sp.x0 + j * sp.dx - x);
            if (h > H0 && h < Hout)
                bp.push_back(h);
        }
        bp.push_back(Hout);
        std::sort(bp.begin(), bp.end());
        for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
            const double a = bp[k], b = bp[k + 1];
            if (b - a <= 1e-14 * b)
                continue;
            double pan = 0.0;
            for (std::size_t q = 0; q < gl.x.size(); ++q) {
                const double h = a + (b - a) * gl.x[q];
                const double D = u(x + h) + u(x - h) - 2.0 * ux;
                pan += gl.w[q] * D * std::pow(h, -1.0 - s2);
            }
            acc += (b - a) * pan;
        }

        // Both points in the tails.
        const double H = Hout;
        if (sp.right.coef != 0.0) {
            const double p = sp.right.exponent;
            const QuadValue q = integrate_jacobi_left(
                [&](double t) { return std::pow(1.0 + x * t / H, p); }, s2 - p - 1.0, 0.0, 1.0,
                1e-14, 8, 1024);
            acc += sp.right.coef * std::pow(H, p - s2) * q.value;
        }
        if (sp.left.coef != 0.0) {
            const double p = sp.left.exponent;
            const QuadValue q = integrate_jacobi_left(
                [&](double t) { return std::pow(1.0 - x * t / H, p); }, s2 - p - 1.0, 0.0, 1.0,
                1e-14, 8, 1024);
            acc += sp.left.coef * std::pow(H, p - s2) * q.value;
        }
        acc -= 2.0 * ux * std::pow(H, -s2) / s2;
        out.push_back(-C * acc);
    }
    return out;
}

} // namespace fbnl
