#include <doctest.h>

#include "fbnl/error.hpp"
#include "fbnl/frac_quadrature.hpp"
#include "fbnl/functionals.hpp"

#include <cmath>

using namespace fbnl;

namespace {

struct HalfPlane {
    Params P = derive_exponents(0.5, 0.5);
    Profile prof;
    std::shared_ptr<const Grid2D> grid;
    Field u;

    explicit HalfPlane(int n, double A = 1.0)
    {
        prof = with_amplitude(solve_profile(P), A);
        grid = std::make_shared<const Grid2D>(build_grid(n, n, 1.0, 1.0, default_grading(P), P));
        u = sample_field(grid, [&](double x, double y) { return eval_halfplane(prof, x, y); });
    }
};

} // namespace

TEST_CASE("weighted arc integral of a constant is the weighted half-circle length")
{
    const Params P = derive_exponents(0.3, 0.5);
    const Grid2D g = build_grid(32, 32, 1.0, 1.0, default_grading(P), P);
    const double R = 0.6;
    // int_0^pi (R sin t)^alpha R dt = R^{1+alpha} sqrt(pi) Gamma((1+alpha)/2) / Gamma(1+alpha/2)
    const double a = P.alpha;
    const double ref = std::pow(R, 1 + a) * std::sqrt(M_PI) * std::tgamma((1 + a) / 2) / std::tgamma(1 + a / 2);
    CHECK(weighted_arc_integral({&g}, a, 0.0, R, [](double) { return 1.0; }) ==
          doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("trace penalty is exact on the piecewise-linear trace")
{
    const Params P = derive_exponents(0.5, 0.0);
    auto g = std::make_shared<const Grid2D>(build_grid(40, 8, 1.0, 1.0, 1.0, P));
    // Sign change inside a cell, so the linear interpolant is the function itself.
    const Field u = sample_field(g, [](double x, double) { return x - 0.125; });
    // gamma = 0: the measure of {u > 0} in (x0 - R, x0 + R)
    CHECK(trace_penalty_in_ball(u, 0.0, 0.5) == doctest::Approx(0.375).epsilon(1e-12));
    const Params P2 = derive_exponents(0.5, 0.5);
    auto g2 = std::make_shared<const Grid2D>(build_grid(40, 8, 1.0, 1.0, 1.0, P2));
    const Field v = sample_field(g2, [](double x, double) { return x - 0.125; });
    // int_{0.125}^{0.5} (x - 0.125)^{1/2} dx = (2/3) 0.375^{3/2}
    CHECK(trace_penalty_in_ball(v, 0.0, 0.5) ==
          doctest::Approx(2.0 / 3.0 * std::pow(0.375, 1.5)).epsilon(1e-12));
}

TEST_CASE("Weiss energy of the half-plane solution is constant in R")
{
    const HalfPlane h(160);
    const double target = (2.0 - h.prof.measured_slope) / (1.0 + h.P.beta * h.P.gamma);
    double lo = 1e300, hi = -1e300;
    for (double R = 0.1; R <= 0.41; R += 0.05) {
        const double w = weiss(h.u, 0.0, R);
        lo = std::min(lo, w);
        hi = std::max(hi, w);
        CHECK(w == doctest::Approx(target).epsilon(0.01));
    }
    CHECK((hi - lo) / hi < 0.005);
}

TEST_CASE("Weiss scaling identity under node-exact rescaling")
{
    const HalfPlane h(64);
    const Field v = sample_field(h.grid, [&](double x, double y) {
        return eval_halfplane(h.prof, x - 0.1, y) * (1.0 + 0.3 * x);
    });
    const double lam = 0.5;
    const Field vl = rescale_field(v, lam, 0.0);
    for (double rho : {0.3, 0.6, 0.9})
        CHECK(weiss(v, 0.0, lam * rho) == doctest::Approx(weiss(vl, 0.0, rho)).epsilon(1e-10));
}

TEST_CASE("homogeneity defect is small for homogeneous fields and not for others")
{
    const HalfPlane h(128);
    const double hom = homogeneity_defect(h.u, 0.0, 0.4);
    const Field v = sample_field(h.grid, [&](double x, double y) { return eval_halfplane(h.prof, x - 0.2, y); });
    const double non = homogeneity_defect(v, 0.0, 0.4);
    CHECK(hom < 1e-2 * non);
}

TEST_CASE("Monneau of a field against itself vanishes; sweep on the half-plane solution is flat")
{
    const HalfPlane h(96);
    CHECK(monneau(h.u, h.u, 0.0, 0.3) == 0.0);
    CHECK(monneau(h.u, h.prof, 0.0, 0.3) < 1e-5);
    const FunctionalSweep sw = monneau_sweep(h.u, h.prof, 0.0, 1, {0.1, 0.2, 0.3, 0.4});
    CHECK(sw.violation_count == 0);
}

TEST_CASE("balls leaving the grid are rejected")
{
    const HalfPlane h(32);
    CHECK_THROWS_AS(weiss(h.u, 0.8, 0.5), DomainError);
}

TEST_CASE("blow-up of the half-plane solution is stationary")
{
    const HalfPlane h(128, 1.0);
    const BlowupReport b = blowup_sequence(h.u, 0.0, {0.8, 0.5, 0.3}, h.prof, 48);
    REQUIRE(b.radii.size() == 3);
    for (double d : b.successive_distances)
        CHECK(d < 1e-2);
    CHECK(b.best_orientation == 1);
    CHECK(b.final_relative_distance < 1e-2);
}

TEST_CASE("normal fit on a planar trace recovers the direction")
{
    const double beta = 2.0 / 3.0, ang = 0.4;
    auto trace = [&](double x1, double x2) {
        return 1.7 * std::pow(std::max(0.0, std::cos(ang) * x1 + std::sin(ang) * x2), beta);
    };
    const NormalFit f = fit_halfplane_normal_2d(trace, {0.0, 0.0}, 0.5, beta);
    CHECK(f.angle == doctest::Approx(ang).epsilon(1e-3));
    CHECK(f.amplitude == doctest::Approx(1.7).epsilon(1e-3));
}
