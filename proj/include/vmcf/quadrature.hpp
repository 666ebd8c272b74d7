#ifndef VMCF_QUADRATURE_HPP
#define VMCF_QUADRATURE_HPP

#include "vmcf/grid.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace vmcf {

using Integrand = std::function<double(double)>;
/// Outer integrand receives (r, inner_integral(r)).
using OuterIntegrand = std::function<double(double, double)>;

/// Computes int_a^b outer(r, I(r)) dr with I(r) = int_a^r inner(s) ds as one
/// coupled non-stiff ODE sweep. Integrable endpoint singularities at a must
/// be declared through power hints: integrand ~ C (x-a)^p with p > -1.
double nested_quadrature(const Integrand& inner, const OuterIntegrand& outer,
                         double a, double b, double tol,
                         std::optional<double> inner_power_hint = std::nullopt,
                         std::optional<double> outer_power_hint = std::nullopt);

/// Fixed 7-point Gauss-Legendre on [a, b].
double gauss7(const Integrand& f, double a, double b);

/// Cumulative integral along the grid anchored at `anchor` (which need not be
/// a node): out[i] = int_anchor^{x_i} f. Per-interval Gauss panels, so the
/// result is exactly linear in f.
std::vector<double> cumulative_integral(const RadialGrid& g, const Integrand& f,
                                        double anchor);

} // namespace vmcf

#endif
