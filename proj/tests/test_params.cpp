#include <doctest.h>

#include "fbnl/error.hpp"
#include "fbnl/params.hpp"

#include <random>

using namespace fbnl;

TEST_CASE("derived exponents satisfy their defining identities")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> us(0.01, 0.99), ug(0.0, 0.99);
    for (int k = 0; k < 500; ++k) {
        const double s = us(rng), g = ug(rng);
        const int n = 1 + k % 3;
        const Params P = derive_exponents(s, g, n);
        CHECK(P.alpha == doctest::Approx(1.0 - 2.0 * s).epsilon(1e-14));
        CHECK(P.beta * (2.0 - g) == doctest::Approx(2.0 * s).epsilon(1e-14));
        CHECK(P.beta - s == doctest::Approx(g * P.beta / 2.0).epsilon(1e-12));
        CHECK(P.kappa_surf - P.kappa_vol == doctest::Approx(1.0));
        CHECK(P.kappa_vol ==
              doctest::Approx(n - 1 + (2.0 - P.alpha * g) / (2.0 - g)).epsilon(1e-14));
        CHECK(P.beta > s);
        CHECK(P.beta < 2.0 * s);
    }
}

TEST_CASE("gamma = 0 gives beta = s")
{
    for (double s : {0.2, 0.5, 0.8})
        CHECK(derive_exponents(s, 0.0).beta == doctest::Approx(s));
}

TEST_CASE("out-of-range parameters are rejected")
{
    CHECK_THROWS_AS(derive_exponents(0.0, 0.5), ParameterError);
    CHECK_THROWS_AS(derive_exponents(1.0, 0.5), ParameterError);
    CHECK_THROWS_AS(derive_exponents(0.5, -0.1), ParameterError);
    CHECK_THROWS_AS(derive_exponents(0.5, 1.0), ParameterError);
    CHECK_THROWS_AS(derive_exponents(0.5, 0.5, 0), ParameterError);
}

TEST_CASE("entries lists every exponent by name")
{
    const auto e = derive_exponents(0.3, 0.4, 2).entries();
    bool has_beta = false;
    for (const auto& [k, v] : e)
        has_beta = has_beta || k == "beta";
    CHECK(has_beta);
}
