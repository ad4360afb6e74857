#include "fbnl/numerics/quadrature.hpp"

#include "fbnl/error.hpp"
#include "fbnl/numerics/special.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>

namespace fbnl {

namespace {

struct JacobiRecurrence {
    std::vector<double> diag;  // a_k, k = 0..n-1
    std::vector<double> off;   // sqrt(b_k), k = 0..n (off[0] unused)
    double mu0 = 0.0;
};

JacobiRecurrence jacobi_recurrence(int n, double a, double b)
{
    JacobiRecurrence r;
    r.diag.resize(n);
    r.off.assign(n + 1, 0.0);
    const double ab = a + b;
    for (int k = 0; k < n; ++k) {
        if (k == 0)
            r.diag[k] = (b - a) / (ab + 2.0);
        else
            r.diag[k] = (b * b - a * a) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0));
    }
    for (int k = 1; k <= n; ++k) {
        double bk;
        if (k == 1) {
            bk = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        } else {
            const double t = 2.0 * k + ab;
            bk = 4.0 * k * (k + a) * (k + b) * (k + ab) / (t * t * (t + 1.0) * (t - 1.0));
        }
        r.off[k] = std::sqrt(bk);
    }
    r.mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                     std::lgamma(ab + 2.0));
    return r;
}

// Orthonormal p_n(x), p_n'(x) and sum_{k<n} p_k(x)^2.
void eval_orthonormal(const JacobiRecurrence& r, int n, double x, double& pn, double& dpn,
                      double& sumsq)
{
    double pm1 = 0.0, dpm1 = 0.0;
    double p = 1.0 / std::sqrt(r.mu0), dp = 0.0;
    sumsq = 0.0;
    for (int k = 0; k < n; ++k) {
        sumsq += p * p;
        const double pk1 = ((x - r.diag[k]) * p - r.off[k] * pm1) / r.off[k + 1];
        const double dpk1 = (p + (x - r.diag[k]) * dp - r.off[k] * dpm1) / r.off[k + 1];
        pm1 = p;
        dpm1 = dp;
        p = pk1;
        dp = dpk1;
    }
    pn = p;
    dpn = dp;
}

} // namespace

Rule gauss_jacobi(int n, double a, double b)
{
    if (n < 1)
        throw ParameterError("gauss_jacobi: n must be >= 1");
    if (!(a > -1.0 && b > -1.0))
        throw ParameterError("gauss_jacobi: exponents must exceed -1");

    const JacobiRecurrence r = jacobi_recurrence(n, a, b);
    Eigen::VectorXd d(n), e(std::max(n - 1, 1));
    for (int k = 0; k < n; ++k)
        d[k] = r.diag[k];
    for (int k = 0; k + 1 < n; ++k)
        e[k] = r.off[k + 1];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e.head(std::max(n - 1, 0)), Eigen::EigenvaluesOnly);

    Rule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = es.eigenvalues()[i];
        double pn, dpn, sumsq;
        for (int it = 0; it < 3; ++it) {
            eval_orthonormal(r, n, x, pn, dpn, sumsq);
            if (dpn == 0.0)
                break;
            const double dx = pn / dpn;
            x -= dx;
            if (std::abs(dx) < 1e-17)
                break;
        }
        eval_orthonormal(r, n, x, pn, dpn, sumsq);
        rule.x[i] = x;
        rule.w[i] = 1.0 / sumsq;
    }
    return rule;
}

Rule gauss_legendre(int n, double lo, double hi)
{
    Rule r = gauss_jacobi(n, 0.0, 0.0);
    const double h = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        r.x[i] = lo + h * (r.x[i] + 1.0);
        r.w[i] *= h;
    }
    return r;
}

Rule gauss_jacobi_left(int n, double e, double lo, double hi)
{
    Rule r = gauss_jacobi(n, 0.0, e);
    const double h = 0.5 * (hi - lo);
    const double scale = std::pow(h, e + 1.0);
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        r.x[i] = lo + h * (r.x[i] + 1.0);
        r.w[i] *= scale;
    }
    return r;
}

Rule gauss_jacobi_right(int n, double e, double lo, double hi)
{
    Rule r = gauss_jacobi(n, e, 0.0);
    const double h = 0.5 * (hi - lo);
    const double scale = std::pow(h, e + 1.0);
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        r.x[i] = lo + h * (r.x[i] + 1.0);
        r.w[i] *= scale;
    }
    return r;
}

QuadValue integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                             double tol, unsigned max_depth)
{
    double err = 0.0, l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, max_depth, tol, &err, &l1);
    if (!std::isfinite(v) || err > 10.0 * tol * std::max(l1, 1e-300) + 1e-300) {
        std::ostringstream os;
        os << "adaptive quadrature on [" << a << ", " << b << "] reached error " << err
           << " (tolerance " << tol << ")";
        throw ConvergenceError(os.str());
    }
    return {v, err};
}

namespace {

template <class MakeRule>
QuadValue doubling(const std::function<double(double)>& smooth, MakeRule make, double lo,
                   double hi, double tol, int n0, int nmax)
{
    double prev = make(n0).apply(smooth);
    for (int n = 2 * n0; n <= nmax; n *= 2) {
        const double cur = make(n).apply(smooth);
        const double diff = std::abs(cur - prev);
        if (diff <= tol)
            return {cur, diff};
        prev = cur;
    }
    std::ostringstream os;
    os << "Gauss-Jacobi refinement on [" << lo << ", " << hi << "] did not reach " << tol;
    throw ConvergenceError(os.str());
}

} // namespace

QuadValue integrate_jacobi_left(const std::function<double(double)>& smooth, double e,
                                double lo, double hi, double tol, int n0, int nmax)
{
    return doubling(
        smooth, [&](int n) { return gauss_jacobi_left(n, e, lo, hi); }, lo, hi, tol, n0, nmax);
}

QuadValue integrate_jacobi_right(const std::function<double(double)>& smooth, double e,
                                 double lo, double hi, double tol, int n0, int nmax)
{
    return doubling(
        smooth, [&](int n) { return gauss_jacobi_right(n, e, lo, hi); }, lo, hi, tol, n0, nmax);
}

} // namespace fbnl
