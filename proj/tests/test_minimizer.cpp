#include <doctest.h>

#include "fbnl/energy_minimizer.hpp"
#include "fbnl/error.hpp"
#include "fbnl/frac_quadrature.hpp"
#include "fbnl/profile.hpp"

#include <cmath>

using namespace fbnl;

namespace {

struct Small {
    Params P = derive_exponents(0.5, 0.5);
    Profile prof;
    std::shared_ptr<const Grid2D> grid;
    MinimizeConfig cfg = default_minimize_config(1.0);
    MinimizeResult res;

    explicit Small(double shift)
    {
        prof = with_amplitude(solve_profile(P), amplitude_A(P).amplitude_A_flux);
        grid = std::make_shared<const Grid2D>(build_grid(48, 48, 1.0, 1.0, default_grading(P), P));
        res = minimize_energy(
            grid, [&](double x, double y) { return eval_halfplane(prof, x - shift, y); }, cfg);
    }
};

} // namespace

TEST_CASE("configuration validation")
{
    MinimizeConfig c = default_minimize_config(1.0);
    CHECK_NOTHROW(validate(c));
    c.delta_schedule = {1e-4, 1e-3};
    CHECK_THROWS_AS(validate(c), ParameterError);
    c.delta_schedule = {1e-4, -1e-5};
    CHECK_THROWS_AS(validate(c), ParameterError);
}

TEST_CASE("minimizer output is nonnegative and the regularized energy decreases within a stage")
{
    const Small m(0.0);
    for (double v : m.res.field.values)
        CHECK(v >= 0.0);
    for (std::size_t k = 1; k < m.res.log.size(); ++k)
        if (m.res.log[k].stage == m.res.log[k - 1].stage)
            CHECK(m.res.log[k].energy_reg <= m.res.log[k - 1].energy_reg * (1 + 1e-12));
    CHECK(m.res.energy == doctest::Approx(m.res.dirichlet_part + m.res.trace_part));
    CHECK(discrete_energy(m.res.field) == doctest::Approx(m.res.energy).epsilon(1e-10));
}

TEST_CASE("the minimizer does not exceed the energy of the boundary data's extension")
{
    const Small m(0.0);
    const Field data = sample_field(m.grid, [&](double x, double y) { return eval_halfplane(m.prof, x, y); });
    CHECK(m.res.energy <= discrete_energy(data) * (1 + 1e-9));
}

TEST_CASE("free boundary of half-plane data sits at the origin")
{
    const Small m(0.0);
    const FreeBoundaryReport fb = extract_free_boundary(m.res.field, m.cfg);
    REQUIRE(fb.fb_points.size() == 1);
    CHECK(std::abs(fb.fb_points[0]) < 2.0 * m.grid->hx);
    CHECK(fb.fb_orientation[0] == 1);
    CHECK(fb.contact_measure == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("shifting the data shifts the free boundary")
{
    const Small m(0.25);
    const FreeBoundaryReport fb = extract_free_boundary(m.res.field, m.cfg);
    REQUIRE(fb.fb_points.size() == 1);
    CHECK(fb.fb_points[0] == doctest::Approx(0.25).epsilon(0.1));
}

TEST_CASE("contact length is exact for a piecewise-linear trace")
{
    const Params P = derive_exponents(0.5, 0.5);
    auto g = std::make_shared<const Grid2D>(build_grid(20, 8, 1.0, 1.0, 1.0, P));
    const Field u = sample_field(g, [](double x, double) { return x - 0.325; });
    CHECK(contact_length(u, -1.0, 1.0, 0.0) == doctest::Approx(1.325).epsilon(1e-12));
    CHECK(contact_length(u, -1.0, 1.0, 0.2) == doctest::Approx(1.525).epsilon(1e-12));
    CHECK(contact_length(u, 0.5, 1.0, 0.0) == 0.0);
}
