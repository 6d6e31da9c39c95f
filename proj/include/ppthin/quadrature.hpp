#pragma once

#include <functional>
#include <span>

#include "ppthin/geometry.hpp"

namespace ppthin {

/// Adaptive Gauss-Kronrod (G7/K15) on [a, b] to the given relative tolerance.
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double rel_tol = 1e-8, int max_depth = 40);

/// Integral of a radial function g(|y|) over the Euclidean shell
/// { a <= |y| <= b } in dimension dim: surface-area reduction to 1D.
double radial_shell_integral(const std::function<double(double)>& g, int dim, double a, double b,
                             double rel_tol = 1e-8);

/// Integral of f(y) over the norm-ball shell { a <= |y| <= b }. Euclidean
/// norms require f to be radial (f is called with a representative vector
/// (s, 0, ..., 0)); the sup norm is integrated cellwise with tensor
/// Gauss-Legendre, supported for dim <= 3.
double shell_integral(Norm norm, int dim, double a, double b,
                      const std::function<double(std::span<const double>)>& f,
                      double rel_tol = 1e-8);

}  // namespace ppthin
