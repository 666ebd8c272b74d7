#ifndef VMCF_INNER_HPP
#define VMCF_INNER_HPP

#include "vmcf/fit.hpp"
#include "vmcf/grid.hpp"
#include "vmcf/ground_state.hpp"
#include "vmcf/linearized.hpp"

#include <cmath>
#include <vector>

namespace vmcf {

/// Shared construction parameters. nu is the blow-up rate exponent; the
/// Sobolev orders are the derived bookkeeping constants used downstream.
struct Config {
    double nu = 0.7071067811865476; // ~ 1/sqrt(2), far from small denominators
    double eps1 = 0.7071067811865476 / 2.0;
    double eps2 = 0.5;
    double delta = 0.1;
    int N = 2;

    int M() const { return int(std::floor(1.5 * nu + 1.25)); }
    int L0() const { return 2 * M() + 1; }
    int K0() const { return int(std::floor(3.0 * nu + 2.5)); }

    void validate() const;
};

/// Layers V_k of the expansion around the ground state, with per-layer
/// gamma-applied curves and fitted tails.
struct InnerProfile {
    Config config;
    const GroundState* gs = nullptr;
    std::vector<SampledCurve> layers;  // k = 0..N, layer 0 is Q itself
    std::vector<SampledCurve> gammas;  // G_k = Gamma_k V_k with stencil deriv1
    std::vector<SampledCurve> sources; // F_k (k >= 1; index 0 unused)
    std::vector<TailFit> tails;        // per layer, template per k

    const SampledCurve& layer(int k) const;
    double tail_coeff(int n, int k, int ell) const; // d_{n,k,ell}
};

/// 2 nu k f + (1+nu)(f - y f'); output carries an analytic deriv1 built from
/// f', f'' when available, else stencil.
SampledCurve gamma_apply(const Config& cfg, int k, const SampledCurve& f);

/// Source F_k = F^(1)_k + F^(2)_k from layers 0..k-1.
SampledCurve source_F(int k, const InnerProfile& profile);

/// Solves layer k by kernel inversion and fits its tail.
SampledCurve solve_layer(int k, InnerProfile& profile, const LinearizedOperator& lin);

/// Builds layers 1..cfg.N on the ground-state grid.
InnerProfile build_inner_profile(const Config& cfg, const GroundState& gs,
                                 const LinearizedOperator& lin);

/// Truncated sum restricted to the inner region y <= t^{eps1 - nu}.
SampledCurve assemble_inner(const InnerProfile& profile, double t);

/// Region Omega_in boundary in y.
double inner_boundary(const Config& cfg, double t);

/// <y>^{3/2}-weighted L2 norm (4-d radial measure) of the flow residual of
/// the truncated sum over Omega_in.
double inner_remainder(const InnerProfile& profile, double t);

/// Pointwise residual array on the profile grid (full nonlinear expression;
/// exact layer algebra, see inner.cpp).
std::vector<double> inner_residual_values(const InnerProfile& profile, double t);

/// Tail template slots (power, log_power) used to fit layer k.
std::vector<TailTerm> inner_tail_basis(int k);

} // namespace vmcf

#endif
