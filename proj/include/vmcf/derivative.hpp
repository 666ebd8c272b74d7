#ifndef VMCF_DERIVATIVE_HPP
#define VMCF_DERIVATIVE_HPP

#include "vmcf/grid.hpp"

#include <span>
#include <vector>

namespace vmcf {

/// Finite-difference weights (Fornberg) for the m-th derivative at x0 on the
/// given stencil nodes; exact on polynomials of degree < nodes.size().
std::vector<double> fd_weights(double x0, std::span<const double> nodes, int m);

/// 5-point stencil differentiation: centered in the interior, one-sided at
/// the edges; exact on polynomials up to degree 4.
SampledCurve differentiate_grid(const SampledCurve& curve, int order);

std::vector<double> differentiate_values(const RadialGrid& g,
                                         const std::vector<double>& f, int order);

} // namespace vmcf

#endif
