#pragma once

namespace fbnl {

// Gamma function for any non-pole real argument. Positive arguments go to
// std::tgamma (about 15 digits); negative ones are lifted by the recurrence
// Gamma(x) = Gamma(x+1)/x.
double gamma_fn(double x);

double beta_fn(double a, double b);

// Generalized binomial coefficient C(a, k).
double binomial(double a, int k);

} // namespace fbnl
