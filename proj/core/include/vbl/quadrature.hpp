#ifndef VBL_QUADRATURE_HPP
#define VBL_QUADRATURE_HPP

#include <functional>

namespace vbl {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    int intervals = 0;
};

/// Adaptive Gauss-Kronrod 15(7) quadrature on [a, b]. Bisects the interval
/// with the largest Kronrod-vs-Gauss error estimate until the summed
/// estimate drops below max(abs_tol, rel_tol*|I|). Throws QuadratureFailure
/// if max_intervals is exhausted first.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-12, double abs_tol = 1e-300,
                     int max_intervals = 2000);

/// Fixed-order Gauss-Legendre rule (n nodes) on [a, b], used as an
/// independent oracle in tests. n in {16, 32, 64}.
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int n);

}  // namespace vbl

#endif
