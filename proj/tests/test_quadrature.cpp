#include <doctest.h>

#include "fbnl/frac_quadrature.hpp"
#include "fbnl/numerics/quadrature.hpp"
#include "fbnl/numerics/special.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>

using namespace fbnl;
using mp = boost::multiprecision::cpp_bin_float_50;

namespace {

double mp_kernel_constant(double s)
{
    const mp S(s);
    const mp num = pow(mp(4), S) * boost::math::tgamma(mp(0.5) + S);
    const mp den = sqrt(boost::math::constants::pi<mp>()) * abs(boost::math::tgamma(-S));
    return static_cast<double>(num / den);
}

} // namespace

TEST_CASE("gamma_fn matches a 50-digit oracle, including negative arguments")
{
    for (double x : {-2.5, -0.7, -0.3, 0.1, 0.5, 1.7, 4.2}) {
        const double ref = static_cast<double>(boost::math::tgamma(mp(x)));
        CHECK(gamma_fn(x) == doctest::Approx(ref).epsilon(1e-13));
    }
}

TEST_CASE("kernel constant matches a 50-digit oracle")
{
    for (double s : {0.1, 0.25, 0.5, 0.7, 0.9})
        CHECK(kernel_constant(s) == doctest::Approx(mp_kernel_constant(s)).epsilon(1e-13));
    CHECK(kernel_constant(0.5) == doctest::Approx(1.0 / M_PI).epsilon(1e-14));
}

TEST_CASE("Gauss-Jacobi rules integrate weighted polynomials exactly")
{
    const double a = 0.3, b = -0.4;
    const Rule r = gauss_jacobi(8, a, b);
    // int_{-1}^1 (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)
    const double m0 = std::pow(2.0, a + b + 1.0) * beta_fn(a + 1.0, b + 1.0);
    CHECK(r.apply([](double) { return 1.0; }) == doctest::Approx(m0).epsilon(1e-13));
    const Rule l = gauss_jacobi_left(10, -0.5, 0.0, 1.0);
    // int_0^1 t^{-1/2} t^3 dt = 2/7
    CHECK(l.apply([](double t) { return t * t * t; }) == doctest::Approx(2.0 / 7.0).epsilon(1e-13));
}

TEST_CASE("adaptive quadrature reports an honest error estimate")
{
    const QuadValue q = integrate_adaptive([](double x) { return std::exp(-x * x); }, 0.0, 3.0, 1e-13);
    CHECK(q.value == doctest::Approx(0.5 * std::sqrt(M_PI) * std::erf(3.0)).epsilon(1e-13));
    CHECK(q.error < 1e-12);
}

TEST_CASE("A1 at s = 1/2 equals beta cot(pi beta)")
{
    for (double g : {0.1, 0.4, 0.8}) {
        const Params P = derive_exponents(0.5, g);
        const double ref = P.beta / std::tan(M_PI * P.beta);
        CHECK(compute_A1(P).value == doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("A1 vanishes at gamma = 0 and is negative for gamma > 0")
{
    for (double s : {0.2, 0.5, 0.8}) {
        CHECK(std::abs(compute_A1(derive_exponents(s, 0.0)).value) < 1e-10);
        CHECK(compute_A1(derive_exponents(s, 0.5)).value < 0.0);
    }
}

TEST_CASE("A2 equals the Beta-function closed form")
{
    for (double s : {0.3, 0.5, 0.7}) {
        const Params P = derive_exponents(s, 0.4);
        // int_1^inf (y-1)^beta y^{-1-2s} dy = B(beta+1, 2s-beta)
        const double ref = -kernel_constant(s) * beta_fn(P.beta + 1.0, 2.0 * s - P.beta);
        CHECK(compute_A2(P).value == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("closed-form and flux amplitudes are consistent")
{
    const HalfPlaneConstants h = amplitude_A(derive_exponents(0.5, 0.5));
    CHECK(h.amplitude_A == doctest::Approx(h.amplitude_A_equivalent).epsilon(1e-12));
    CHECK(h.amplitude_A == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(h.amplitude_A_flux == doctest::Approx(1.190551).epsilon(1e-6));
    CHECK(extension_constant_theory(0.5) == doctest::Approx(1.0));
}

TEST_CASE("sampled fractional Laplacian of x_+^beta at 1 reproduces A1")
{
    const Params P = derive_exponents(0.5, 0.5);
    SampledProfile sp;
    sp.x0 = -4.0;
    sp.dx = 1.0 / 512.0;
    for (int k = 0; k <= 8 * 512; ++k) {
        const double x = sp.x0 + k * sp.dx;
        sp.u.push_back(x > 0.0 ? std::pow(x, P.beta) : 0.0);
    }
    sp.left = {true, 0.0, 0.0};
    sp.right = {true, 1.0, P.beta};
    const auto v = frac_laplacian_profile(sp, P.s, {1.0});
    CHECK(v[0] == doctest::Approx(compute_A1(P).value).epsilon(2e-3));
}

TEST_CASE("half Laplacian of the Cauchy profile")
{
    // (-Delta)^{1/2} 1/(1+x^2) = (1 - x^2)/(1 + x^2)^2
    SampledProfile sp;
    sp.x0 = -100.0;
    sp.dx = 1.0 / 64.0;
    for (int k = 0; k <= 200 * 64; ++k) {
        const double x = sp.x0 + k * sp.dx;
        sp.u.push_back(1.0 / (1.0 + x * x));
    }
    sp.left = {true, 1.0, -2.0};
    sp.right = {true, 1.0, -2.0};
    const std::vector<double> xs = {0.0, 0.5, 2.0};
    const auto v = frac_laplacian_profile(sp, 0.5, xs);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double x = xs[k];
        CHECK(v[k] == doctest::Approx((1.0 - x * x) / std::pow(1.0 + x * x, 2)).epsilon(1e-3));
    }
}
