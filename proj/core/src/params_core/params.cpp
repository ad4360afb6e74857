#include "fbnl/params.hpp"

#include "fbnl/error.hpp"

#include <cmath>
#include <sstream>

namespace fbnl {

Params derive_exponents(double s, double gamma, int n)
{
    if (!(s > 0.0 && s < 1.0)) {
        std::ostringstream os;
        os << "s must lie in (0,1), got " << s;
        throw ParameterError(os.str());
    }
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        std::ostringstream os;
        os << "gamma must lie in [0,1), got " << gamma;
        throw ParameterError(os.str());
    }
    if (n < 1)
        throw ParameterError("dimension n must be >= 1");

    Params p;
    p.s = s;
    p.gamma = gamma;
    p.n = n;
    p.alpha = 1.0 - 2.0 * s;
    p.beta = 2.0 * s / (2.0 - gamma);
    p.kappa_vol = n - 1 + (2.0 - p.alpha * gamma) / (2.0 - gamma);
    p.kappa_surf = p.kappa_vol + 1.0;
    p.energy_scale_exp = -n + 1 - p.beta * gamma;
    return p;
}

std::vector<std::pair<std::string, double>> Params::entries() const
{
    return {{"s", s},
            {"gamma", gamma},
            {"n", static_cast<double>(n)},
            {"alpha", alpha},
            {"beta", beta},
            {"kappa_vol", kappa_vol},
            {"kappa_surf", kappa_surf},
            {"energy_scale_exp", energy_scale_exp}};
}

} // namespace fbnl
