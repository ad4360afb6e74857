#include "fbnl/numerics/special.hpp"

#include "fbnl/error.hpp"

#include <cmath>

namespace fbnl {

double gamma_fn(double x)
{
    if (x > 0.0)
        return std::tgamma(x);
    if (x == std::floor(x))
        throw DomainError("gamma_fn: pole at non-positive integer");
    double scale = 1.0;
    while (x < 0.0) {
        scale *= x;
        x += 1.0;
    }
    return std::tgamma(x) / scale;
}

double beta_fn(double a, double b)
{
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double binomial(double a, int k)
{
    double c = 1.0;
    for (int i = 0; i < k; ++i)
        c *= (a - i) / (i + 1);
    return c;
}

} // namespace fbnl
