#pragma once

#include <cmath>
#include <numbers>

namespace fbnl::detail {

// Trigonometry measured from the nearer endpoint so that pi - theta keeps its
// relative accuracy near theta = pi.
inline double sin_t(double th)
{
    return th > 0.5 * std::numbers::pi ? std::sin(std::numbers::pi - th) : std::sin(th);
}

inline double cos_t(double th)
{
    return th > 0.5 * std::numbers::pi ? -std::cos(std::numbers::pi - th) : std::cos(th);
}

inline double cot_t(double th) { return cos_t(th) / sin_t(th); }

} // namespace fbnl::detail
