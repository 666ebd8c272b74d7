#ifndef VMCF_ODE_HPP
#define VMCF_ODE_HPP

#include "vmcf/grid.hpp"

#include <functional>
#include <span>
#include <vector>

namespace vmcf {

/// dy/dx = f(x, y); writes into dydx (same length as y).
using OdeRhs = std::function<void(double x, std::span<const double> y,
                                  std::span<double> dydx)>;

struct IvpSolution {
    std::vector<double> xs;                 // accepted step abscissae
    std::vector<std::vector<double>> ys;    // state per abscissa
    double max_step_error = 0.0;            // largest step-doubling estimate kept
};

/// Classical RK4 with step doubling. Accepts a step when the doubling
/// estimate stays below tol scaled per unit length of the span, so the
/// accumulated error at b is of order tol.
IvpSolution integrate_ivp(const OdeRhs& rhs, std::vector<double> y0,
                          double a, double b, double tol);

/// Same controller, but lands exactly on each requested node and returns the
/// state matrix there (row per node). nodes must start at the initial point.
std::vector<std::vector<double>> integrate_to_nodes(const OdeRhs& rhs,
                                                    std::vector<double> y0,
                                                    std::span<const double> nodes,
                                                    double tol);

} // namespace vmcf

#endif
