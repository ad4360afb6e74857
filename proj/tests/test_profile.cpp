#include <doctest.h>

#include "fbnl/error.hpp"
#include "fbnl/profile.hpp"

#include <cmath>
#include <random>

using namespace fbnl;

TEST_CASE("at s = 1/2 the profile is sin(beta (pi - theta)) / sin(beta pi)")
{
    for (double g : {0.2, 0.5, 0.8}) {
        const Profile p = solve_profile(derive_exponents(0.5, g));
        const double b = p.params.beta;
        for (double th = 0.05; th < M_PI; th += 0.1) {
            CHECK(p.g(th) == doctest::Approx(std::sin(b * (M_PI - th)) / std::sin(b * M_PI)).epsilon(1e-8));
            CHECK(p.dg(th) == doctest::Approx(-b * std::cos(b * (M_PI - th)) / std::sin(b * M_PI)).epsilon(1e-7));
        }
    }
}

TEST_CASE("profile boundary values and ODE residual across (s, gamma)")
{
    for (double s : {0.3, 0.5, 0.7})
        for (double g : {0.1, 0.5, 0.9}) {
            const Profile p = solve_profile(derive_exponents(s, g));
            CHECK(p.g(0.0) == doctest::Approx(1.0));
            CHECK(std::abs(p.g(M_PI)) < 1e-8);
            CHECK(max_ode_residual(p) < 1e-6);
            CHECK(max_slope_identity_error(p) < 1e-8);
            for (double th = 0.1; th < M_PI - 0.05; th += 0.3)
                CHECK(p.g(th) > 0.0);
        }
}

TEST_CASE("measured slope equals 2s times the singular coefficient")
{
    const Profile p = solve_profile(derive_exponents(0.4, 0.3));
    CHECK(p.measured_slope == doctest::Approx(2.0 * 0.4 * p.singular_coeff).epsilon(1e-10));
}

TEST_CASE("half-plane solution is homogeneous of degree beta")
{
    const Profile p = with_amplitude(solve_profile(derive_exponents(0.6, 0.4)), 1.3);
    const double b = p.params.beta;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0), v(0.01, 1.0), l(0.1, 5.0);
    for (int k = 0; k < 200; ++k) {
        const double t = u(rng), z = v(rng), lam = l(rng);
        CHECK(eval_halfplane(p, lam * t, lam * z) ==
              doctest::Approx(std::pow(lam, b) * eval_halfplane(p, t, z)).epsilon(1e-10));
    }
    CHECK(eval_halfplane(p, -0.5, 0.0) == 0.0);
    CHECK(eval_halfplane(p, 1.0, 0.0) == doctest::Approx(1.3));
    CHECK_THROWS_AS(eval_halfplane(p, 0.3, -0.1), DomainError);
}

TEST_CASE("dU/dt matches a centered difference")
{
    const Profile p = solve_profile(derive_exponents(0.35, 0.6));
    const double h = 1e-6;
    for (double t : {-0.4, 0.1, 0.7})
        for (double z : {0.2, 0.5}) {
            const double fd = (eval_halfplane(p, t + h, z) - eval_halfplane(p, t - h, z)) / (2 * h);
            CHECK(eval_halfplane(p, t, z, 1) == doctest::Approx(fd).epsilon(1e-6));
            const double fz = (eval_halfplane(p, t, z + h) - eval_halfplane(p, t, z - h)) / (2 * h);
            CHECK(eval_halfplane_dz(p, t, z) == doctest::Approx(fz).epsilon(1e-6));
        }
}

TEST_CASE("f and F endpoint limits")
{
    for (double s : {0.3, 0.5, 0.7}) {
        const Profile p = solve_profile(derive_exponents(s, 0.5));
        const double b = p.params.beta;
        const AngularTable f = compute_f(p), F = compute_F(p);
        CHECK(f.limit_0 == doctest::Approx(b));
        CHECK(f.limit_pi == doctest::Approx(2 * s - b));
        CHECK(f.numeric_0 == doctest::Approx(f.limit_0).epsilon(1e-6));
        CHECK(f.numeric_pi == doctest::Approx(f.limit_pi).epsilon(1e-6));
        CHECK(F.limit_0 == doctest::Approx(b * b - b));
        CHECK(F.numeric_pi == doctest::Approx((2 * s - b) * (2 * s - b + 1)).epsilon(1e-5));
        CHECK(f.min_value > 0.0);
    }
}

TEST_CASE("f equals r U_t / U")
{
    const Profile p = solve_profile(derive_exponents(0.5, 0.5));
    for (double th : {0.3, 1.2, 2.5}) {
        const double t = std::cos(th), z = std::sin(th);
        CHECK(f_at(p, th) ==
              doctest::Approx(eval_halfplane(p, t, z, 1) / eval_halfplane(p, t, z)).epsilon(1e-8));
    }
}

TEST_CASE("U increases in t, so ratios with tau <= t stay at most 1")
{
    const Profile p = solve_profile(derive_exponents(0.5, 0.5));
    std::vector<RatioSample> smp;
    for (double t = -0.9; t < 0.9; t += 0.3)
        smp.push_back({t, t - 0.05, 0.2});
    const RatioReport r = check_ratio_bound(p, smp);
    CHECK(r.samples == smp.size());
    CHECK(r.max_ratio <= 1.0);
    CHECK(r.max_ratio > 0.5);
    CHECK(r.ordering_violations.empty());
}
