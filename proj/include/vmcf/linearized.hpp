#ifndef VMCF_LINEARIZED_HPP
#define VMCF_LINEARIZED_HPP

#include "vmcf/grid.hpp"
#include "vmcf/ground_state.hpp"

#include <cstdint>

namespace vmcf {

/// L = d^2/dy^2 + (3/y + B1) d/dy + B0 around the ground state, with
/// B1 = 9 Q_y^2/y - 6 Q_y/Q and B0 = 3 (1 + Q_y^2)/Q^2.
struct LinearizedOperator {
    const GroundState* gs = nullptr;
    SampledCurve B0, B1;

    explicit LinearizedOperator(const GroundState& ground);

    /// Pointwise L f using the curve's derivative tables, or grid stencils
    /// when the tables are missing.
    SampledCurve apply_L(const SampledCurve& f) const;

    /// e1 = Lambda Q; e2 anchored by e2(1) = 0 via the kernel quadrature.
    std::pair<SampledCurve, SampledCurve> homogeneous_basis() const;

    /// Unique solution of L f = g with f, f' -> 0 at the origin. g's leading
    /// power at 0 may be declared (default 0, i.e. bounded). Exactly linear
    /// in g: fixed RK4 substeps per grid interval.
    SampledCurve duhamel_solve(const SampledCurve& g, double origin_power = 0.0) const;
};

/// Self-adjoint form fL = -q Delta q + P with q = (1+Q'^2)^{-1/2} and
/// H = (1+Q'^2)^{1/4} / Q^{3/2}; P obtained from the conjugation identity
/// applied to H; G = Lambda Q / H spans the kernel.
struct SpectralForm {
    const GroundState* gs = nullptr;
    SampledCurve H;         // with analytic deriv1, deriv2
    SampledCurve q;         // with analytic deriv1, deriv2
    SampledCurve potential; // P values
    SampledCurve zero_mode; // G values with analytic deriv1

    explicit SpectralForm(const GroundState& ground);

    /// Closed-form route to P retained as a cross-check.
    SampledCurve potential_closed_form() const;

    /// fL f on the grid using stencil derivatives of q f.
    SampledCurve apply(const SampledCurve& f) const;

    /// Quadratic form (fL f | f) over rho^3 drho (angular factor dropped).
    double quadratic_form(const std::vector<double>& f,
                          const std::vector<double>& fprime) const;
    /// Dirichlet form |f'|^2 over rho^3 drho.
    double dirichlet_form(const std::vector<double>& fprime) const;

    /// Minimum Rayleigh ratio (fL f|f)/||f'||^2 over random sums of radial
    /// bumps; must come out strictly positive.
    double coercivity_check(int samples, std::uint64_t seed) const;
};

} // namespace vmcf

#endif
