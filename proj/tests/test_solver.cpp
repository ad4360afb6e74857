#include <doctest.h>

#include "fbnl/error.hpp"
#include "fbnl/field_io.hpp"
#include "fbnl/weighted_solver.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace fbnl;

namespace {

std::shared_ptr<const Grid2D> grid_for(double s, int n)
{
    const Params P = derive_exponents(s, 0.5);
    return std::make_shared<const Grid2D>(build_grid(n, n, 1.0, 1.0, default_grading(P), P));
}

} // namespace

TEST_CASE("grid geometry")
{
    auto g = grid_for(0.3, 16);
    CHECK(g->x.front() == doctest::Approx(-1.0));
    CHECK(g->x.back() == doctest::Approx(1.0));
    CHECK(g->y.front() == 0.0);
    CHECK(g->y.back() == doctest::Approx(1.0));
    for (int j = 0; j < g->ny; ++j)
        CHECK(g->y[j + 1] > g->y[j]);
    CHECK(g->cell_x(g->x[3] + 1e-9) == 3);
    CHECK(g->contains(0.0, 0.5));
    CHECK_FALSE(g->contains(1.5, 0.5));
}

TEST_CASE("the discrete operator reproduces 1, x and y^{2s}")
{
    for (double s : {0.25, 0.5, 0.75}) {
        auto g = grid_for(s, 24);
        for (int k = 0; k < 3; ++k) {
            auto fn = [k, s](double x, double y) {
                return k == 0 ? 1.0 : k == 1 ? x : std::pow(y, 2.0 * s);
            };
            BoundarySpec bc;
            bc.dirichlet = fn;
            for (LinearMethod m : {LinearMethod::PCG, LinearMethod::Direct}) {
                const Field u = solve_mixed(g, bc, {m, 1e-13, 200000});
                double e = 0.0;
                for (int j = 0; j <= g->ny; ++j)
                    for (int i = 0; i <= g->nx; ++i)
                        e = std::max(e, std::abs(u.at(i, j) - fn(g->x[i], g->y[j])));
                CHECK(e < 1e-10);
            }
        }
    }
}

TEST_CASE("bottom flux of y^{2s} is 2s")
{
    const double s = 0.4;
    const Field u = sample_field(grid_for(s, 16), [s](double, double y) { return std::pow(y, 2 * s); });
    for (double f : bottom_flux(u).flux)
        CHECK(f == doctest::Approx(2 * s).epsilon(1e-12));
}

TEST_CASE("interpolation is exact on c0 + c1 x + c2 y^{2s}")
{
    const double s = 0.3;
    auto fn = [s](double x, double y) { return 0.5 - 0.25 * x + 2.0 * std::pow(y, 2 * s); };
    const Field u = sample_field(grid_for(s, 12), fn);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const double x = ux(rng), y = uy(rng);
        CHECK(u.eval(x, y) == doctest::Approx(fn(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("maximum principle for random boundary data")
{
    auto g = grid_for(0.6, 20);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = ud(rng), b = ud(rng), c = ud(rng);
        BoundarySpec bc;
        bc.dirichlet = [=](double x, double y) { return std::sin(3 * a * x + b) * std::cos(2 * c * y); };
        const Field u = solve_mixed(g, bc, {LinearMethod::Direct, 1e-12, 1000});
        double lo = 1e300, hi = -1e300;
        for (int j = 0; j <= g->ny; ++j)
            for (int i = 0; i <= g->nx; ++i)
                if (i == 0 || j == 0 || i == g->nx || j == g->ny) {
                    lo = std::min(lo, u.at(i, j));
                    hi = std::max(hi, u.at(i, j));
                }
        for (double v : u.values) {
            CHECK(v >= lo - 1e-12);
            CHECK(v <= hi + 1e-12);
        }
    }
}

TEST_CASE("energy is a quadratic form: E(2u) = 4 E(u), E(const) = 0")
{
    auto g = grid_for(0.5, 10);
    const Field u = sample_field(g, [](double x, double y) { return x * x + y; });
    const Field v = sample_field(g, [](double x, double y) { return 2 * (x * x + y); });
    CHECK(dirichlet_energy(v) == doctest::Approx(4 * dirichlet_energy(u)).epsilon(1e-13));
    CHECK(dirichlet_energy(sample_field(g, [](double, double) { return 3.0; })) ==
          doctest::Approx(0.0));
}

TEST_CASE("snapshot round trip is bit-exact")
{
    const Params P = derive_exponents(0.35, 0.45);
    auto g = std::make_shared<const Grid2D>(build_grid_range(9, 8, -0.3, 1.7, 0.8, 1.7, P));
    const Field u = sample_field(g, [](double x, double y) { return std::exp(x) * std::sin(7 * y) / 3.0; });
    std::stringstream ss;
    write_field(ss, u);
    const Field r = read_field(ss);
    REQUIRE(r.values.size() == u.values.size());
    for (std::size_t k = 0; k < u.values.size(); ++k)
        CHECK(r.values[k] == u.values[k]);
    CHECK(r.grid->x_center() == doctest::Approx(0.7));
    CHECK(r.grid->q == 1.7);
    CHECK(r.grid->params.s == 0.35);
    for (int j = 0; j <= g->ny; ++j)
        CHECK(r.grid->y[j] == doctest::Approx(g->y[j]).epsilon(1e-15));
}

TEST_CASE("malformed snapshots are rejected")
{
    std::stringstream a("not a field\n");
    CHECK_THROWS_AS(read_field(a), ParameterError);
    std::stringstream b("fbnl-field 1\nnx 2\nny 2\nLx 1\nLy 1\nq 1\ns 0.5\ngamma 0.5\nvalues\n1 2 3\n");
    CHECK_THROWS_AS(read_field(b), ParameterError);
}

TEST_CASE("extension cross-check recovers d(s) = 1 at s = 1/2")
{
    const ExtensionReport r = extension_crosscheck(derive_exponents(0.5, 0.5), 1.0, 96, 96);
    CHECK(r.d_fit == doctest::Approx(1.0).epsilon(0.03));
}
