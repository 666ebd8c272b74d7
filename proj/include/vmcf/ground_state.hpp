#ifndef VMCF_GROUND_STATE_HPP
#define VMCF_GROUND_STATE_HPP

#include "vmcf/fit.hpp"
#include "vmcf/grid.hpp"
#include "vmcf/series.hpp"

#include <vector>

namespace vmcf {

/// Even Taylor coefficients of the radial stationary profile at the origin,
/// determined order by order from the profile ODE. order is the top degree
/// kept (<= 12); odd entries come out exactly zero.
std::vector<double> taylor_seed(int order = 8);

/// Right-hand side identity Q'' = 3 (1 + Q'^2) (1/Q - Q'/rho).
double q_second_derivative(double rho, double q, double qp);
/// Q''' obtained by differentiating the identity once.
double q_third_derivative(double rho, double q, double qp, double qpp);

struct GroundState {
    SampledCurve curve;           // Q with deriv1, deriv2 (deriv2 from the ODE)
    std::vector<double> taylor;   // gamma coefficients, index = power of rho
    TailFit tail;                 // Q - rho on {rho^-2..rho^-5}
    double rho_max = 0.0;
    double ode_tol = 0.0;

    double d(int n) const { return tail.coefficient(-double(n)); }

    /// Q anywhere: Taylor series below the origin cutoff, Hermite on the
    /// grid, fitted tail beyond rho_max.
    double eval(double rho) const;
    double eval_deriv(double rho) const;

    /// Lambda Q = Q - rho Q' on the stored grid, derivatives filled
    /// analytically via the ODE.
    SampledCurve lambda_q() const;

    void check_invariants() const; // Q > rho and Q'' > 0 everywhere
};

/// Integrates the profile from a Taylor launch at the grid's origin cutoff.
/// The grid defaults to geometric with n nodes on [1e-3, rho_max].
GroundState solve_ground_state(double rho_max, double tol, std::size_t n = 4096);
GroundState solve_ground_state_on(GridPtr grid, double tol);

/// Refit of Q - rho on the default window [rho_max/2, rho_max].
TailFit fit_ground_tail(const GroundState& gs);
TailFit fit_ground_tail(const GroundState& gs, double lo, double hi);

/// Max-norm of the ODE residual evaluated with grid-stencil derivatives.
double ode_residual_max(const GroundState& gs);

} // namespace vmcf

#endif
