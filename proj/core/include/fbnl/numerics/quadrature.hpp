#pragma once

#include <functional>
#include <vector>

namespace fbnl {

struct Rule {
    std::vector<double> x;
    std::vector<double> w;

    template <class F>
    double apply(F&& f) const
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            acc += w[i] * f(x[i]);
        return acc;
    }
};

/*! \brief Gauss–Jacobi rule for the weight (1-x)^a (1+x)^b on [-1,1].
 *
 *  Golub–Welsch start, Newton polish on the orthonormal recurrence,
 *  Christoffel weights.
 */
Rule gauss_jacobi(int n, double a, double b);

Rule gauss_legendre(int n, double lo, double hi);

// Nodes and weights for the weight (t - lo)^e on [lo, hi].
Rule gauss_jacobi_left(int n, double e, double lo, double hi);

// Nodes and weights for the weight (hi - t)^e on [lo, hi].
Rule gauss_jacobi_right(int n, double e, double lo, double hi);

struct QuadValue {
    double value = 0.0;
    double error = 0.0;
};

// Adaptive Gauss–Kronrod (7/15). Throws ConvergenceError if tol is not met.
QuadValue integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                             double tol, unsigned max_depth = 30);

// Repeatedly doubles the Gauss–Jacobi order for the left-endpoint weight
// until two consecutive levels agree to tol.
QuadValue integrate_jacobi_left(const std::function<double(double)>& smooth, double e,
                                double lo, double hi, double tol, int n0 = 4, int nmax = 512);

QuadValue integrate_jacobi_right(const std::function<double(double)>& smooth, double e,
                                 double lo, double hi, double tol, int n0 = 4, int nmax = 512);

} // namespace fbnl
