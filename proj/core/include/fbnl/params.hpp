#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fbnl {

/*! \brief Problem constants and derived exponents.
 *
 *  Build through derive_exponents(); the derived fields are never recomputed
 *  elsewhere.
 */
struct Params {
    double s = 0.5;
    double gamma = 0.5;
    int n = 1;

    double alpha = 0.0;            // 1 - 2s
    double beta = 2.0 / 3.0;       // 2s / (2 - gamma)
    double kappa_vol = 4.0 / 3.0;  // n - 1 + (2 - alpha*gamma)/(2 - gamma)
    double kappa_surf = 7.0 / 3.0; // kappa_vol + 1
    double energy_scale_exp = 0.0; // -n + 1 - beta*gamma, as conventionally stated

    // Exponent of lambda in J(u_lambda) = lambda^e J(u) from the change of
    // variables in n+1 dimensions: -n - beta*gamma.
    double energy_scaling_exponent() const { return -n - beta * gamma; }

    std::vector<std::pair<std::string, double>> entries() const;
};

Params derive_exponents(double s, double gamma, int n = 1);

} // namespace fbnl
