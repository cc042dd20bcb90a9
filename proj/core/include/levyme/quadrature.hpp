#pragma once

#include <complex>
#include <functional>

#include "levyme/linalg.hpp"

namespace levyme {

/// Adaptive composite Gauss-Legendre quadrature on [a, b]. Panels split until
/// the whole-vs-halves discrepancy falls below max(abs_tol, rel_tol * |total|).
/// Throws QuadratureFailureError when the recursion depth runs out before the
/// tolerance is met.
Complex integrate(const std::function<Complex(double)>& f, double a, double b,
                  double abs_tol = 1e-12, double rel_tol = 1e-12, int max_depth = 60);

double integrate_real(const std::function<double(double)>& f, double a, double b,
                      double abs_tol = 1e-12, double rel_tol = 1e-12, int max_depth = 60);

/// Entrywise adaptive quadrature of a matrix-valued integrand (inf-norm error).
RealMatrix integrate_matrix(const std::function<RealMatrix(double)>& f, double a, double b,
                            double abs_tol = 1e-11, double rel_tol = 1e-11, int max_depth = 48);

} // namespace levyme
