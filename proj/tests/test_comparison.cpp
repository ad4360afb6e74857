#include <doctest.h>

#include "fbnl/comparison_geometry.hpp"
#include "fbnl/error.hpp"
#include "fbnl/frac_quadrature.hpp"

#include <cmath>

using namespace fbnl;

namespace {

std::shared_ptr<const Profile> profile(double s, double g)
{
    const Params P = derive_exponents(s, g);
    return std::make_shared<const Profile>(with_amplitude(solve_profile(P), amplitude_A(P).amplitude_A_flux));
}

} // namespace

TEST_CASE("v_R reduces to U for n = 1 and tends to U as R grows")
{
    auto p = profile(0.5, 0.5);
    const RadialSubsolution s1 = make_radial_subsolution(derive_exponents(0.5, 0.5, 1), 10.0, p);
    CHECK(eval_vR(s1, {0.3, 0.4}) == doctest::Approx(eval_halfplane(*p, 0.3, 0.4)));
    const Params P2 = derive_exponents(0.5, 0.5, 2);
    const std::vector<double> X = {0.1, 0.2, 0.3};
    const double u = eval_halfplane(*p, 0.2, 0.3);
    double prev = 1e300;
    for (double R : {10.0, 100.0, 1000.0}) {
        const double d = std::abs(eval_vR(make_radial_subsolution(P2, R, p), X) - u);
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("subsolution threshold: bisection agrees with the closed form")
{
    auto p = profile(0.5, 0.5);
    std::vector<std::array<double, 2>> smp;
    for (double t : {0.0, 0.2, -0.3})
        for (double z = 0.1; z <= 1.0; z += 0.1)
            smp.push_back({t, z});
    for (int n : {2, 3}) {
        const RadialSubsolution sub = make_radial_subsolution(derive_exponents(0.5, 0.5, n), 20.0, p);
        const SubsolutionReport r = subsolution_residual(sub, smp);
        CHECK(r.R0 == doctest::Approx(r.R0_closed).epsilon(1e-10));
        CHECK(r.min_residual >= 0.0);
        CHECK_FALSE(r.trivially_satisfied);
    }
}

TEST_CASE("the n = 1 residual is identically zero")
{
    auto p = profile(0.4, 0.3);
    const RadialSubsolution sub = make_radial_subsolution(derive_exponents(0.4, 0.3, 1), 5.0, p);
    const SubsolutionReport r = subsolution_residual(sub, {{0.1, 0.2}, {-0.5, 0.7}});
    CHECK(r.trivially_satisfied);
    for (double v : r.unreduced)
        CHECK(v == 0.0);
}

TEST_CASE("samples on the contact set are rejected")
{
    auto p = profile(0.5, 0.5);
    const RadialSubsolution sub = make_radial_subsolution(derive_exponents(0.5, 0.5, 2), 20.0, p);
    CHECK_THROWS_AS(subsolution_residual(sub, {{-0.2, 0.0}}), DomainError);
}

TEST_CASE("Neumann side: flux consistent at the flux amplitude, margin shrinks like 1/R")
{
    auto p = profile(0.5, 0.5);
    const Params P = derive_exponents(0.5, 0.5, 2);
    const NeumannReport a = neumann_check(make_radial_subsolution(P, 20.0, p), {0.1, 0.5});
    const NeumannReport b = neumann_check(make_radial_subsolution(P, 40.0, p), {0.1, 0.5});
    CHECK(a.max_flux_mismatch < 1e-10);
    CHECK(a.min_margin > 0.0);
    CHECK(b.min_margin == doctest::Approx(a.min_margin / 2).epsilon(0.05));
}

TEST_CASE("gamma_R matches its formula")
{
    const Params P = derive_exponents(0.5, 0.5, 3);
    const std::vector<double> X = {0.2, -0.1, 0.3, 0.4};
    const double R = 7.0;
    const double ref = -(0.04 + 0.01) / (2 * R) + 2.0 * 2.0 * 0.3 * 0.5 / R;
    CHECK(gamma_R(P, R, X) == doctest::Approx(ref));
}

TEST_CASE("half-ball lattice points lie in the open upper half-ball")
{
    for (int n : {1, 2}) {
        const auto pts = half_ball_lattice(n, 0.5, 0.1);
        CHECK(!pts.empty());
        for (const auto& X : pts) {
            REQUIRE(X.size() == static_cast<std::size_t>(n + 1));
            double r2 = 0.0;
            for (double v : X)
                r2 += v * v;
            CHECK(r2 <= 0.25 + 1e-12);
            CHECK(X.back() > 0.0);
        }
    }
    CHECK(half_ball_lattice(1, 0.5, 0.1).size() == 39);
}

TEST_CASE("domain variation of a translate is the translation distance")
{
    auto p = profile(0.5, 0.5);
    for (double delta : {0.05, -0.1}) {
        const double eps = 0.2;
        PointFnN g = [&](const std::vector<double>& X) { return eval_halfplane(*p, X[0] + delta, X[1]); };
        for (const auto& X : half_ball_lattice(1, 0.5, 0.1)) {
            const DomainVariationSample s = domain_variation(g, *p, eps, X);
            CHECK(s.w == doctest::Approx(delta / eps).epsilon(1e-8));
            CHECK_FALSE(s.multivalued);
        }
    }
}

TEST_CASE("domain variation errors")
{
    auto p = profile(0.5, 0.5);
    PointFnN g = [&](const std::vector<double>& X) { return eval_halfplane(*p, X[0], X[1]); };
    CHECK_THROWS_AS(domain_variation(g, *p, 0.1, {-0.3, 0.0}), DomainError);
    PointFnN far = [&](const std::vector<double>& X) { return 10.0 + eval_halfplane(*p, X[0], X[1]); };
    CHECK_THROWS_AS(domain_variation(far, *p, 0.1, {0.2, 0.2}), DomainError);
}

TEST_CASE("linearized problem: constant data, small residual")
{
    const Params P = derive_exponents(0.5, 0.5);
    const Profile prof = solve_profile(P);
    auto grid = std::make_shared<const Grid2D>(build_grid(64, 64, 1.0, 1.0, default_grading(P), P));
    const LinearizedResult c = solve_linearized(grid, prof, [](double, double) { return 2.0; });
    for (double v : c.w.values)
        CHECK(v == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(c.floored_faces > 0);
    LinearizedResult r = solve_linearized(grid, prof, [](double x, double y) { return 1.0 + x * y; });
    CHECK(r.interior_residual < 1e-10);
    fit_radial_coefficient(r, 4 * grid->hx, 24 * grid->hx);
    CHECK(r.fit_theta >= 0.1);
    CHECK(r.fit_theta <= 2.0);
    CHECK(std::isfinite(r.b));
}
