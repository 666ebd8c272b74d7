#ifndef VMCF_REMOTE_HPP
#define VMCF_REMOTE_HPP

#include "vmcf/grid.hpp"
#include "vmcf/self_similar.hpp"

#include <vector>

namespace vmcf {

/// Smooth radial plateau cutoff: 1 on [0,1], 0 beyond 2, bump transition on
/// (1,2). Derivatives available in closed form.
double chi0(double s);
double chi0_d1(double s);
double chi0_d2(double s);

struct RemoteProfile {
    Config config;
    int n_layers = 4; // highest k built
    GridPtr grid;     // rho grid covering (0, 2 delta] plus margin
    std::vector<SampledCurve> g_layers; // g_k with deriv1, deriv2
    std::vector<SampledCurve> u_check;  // series inversion terms
    std::vector<double> mu0, mu1;       // mu^0_{k,0}, mu^1_{k,0}, index k
    std::vector<double> slope_fits;     // near-origin log-log slope per layer

    const SampledCurve& layer(int k) const;
    /// g_k and derivatives at any rho (exactly 0 beyond 2 delta).
    double eval(int k, double rho) const;
    double eval_d1(int k, double rho) const;
    double eval_d2(int k, double rho) const;
};

/// Cutoff Cauchy data (g_0, g_1) out of the self-similar far-field
/// coefficients: beyond the light cone only the plus branch survives, so
/// mu^0_{k,0} = a^k_{0,+} and mu^1_{k,0} = (nu k + 4) a^k_{0,+} / sqrt(2).
RemoteProfile cauchy_data(const SelfSimilarProfile& ss, double delta,
                          std::size_t n_nodes = 3000);

/// Algebraic recursion for g_k, k >= 2, from the layers below.
SampledCurve recurse_g(int k, RemoteProfile& profile);

/// Builds layers through n_layers (default from config).
RemoteProfile build_remote_profile(const SelfSimilarProfile& ss, double delta,
                                   int n_layers = 4, std::size_t n_nodes = 3000);

/// V_out(t, y) = t^{-(nu+1)} u_out(t, t^{nu+1} y) on y >= t^{-eps2-nu}.
SampledCurve assemble_out(const RemoteProfile& profile, double t,
                          std::size_t n_nodes = 1024);

/// u_out and its t/rho partials at one point (all orders needed downstream).
/// max_order < 0 uses every built layer.
struct RemotePoint {
    double u = 0, ut = 0, utt = 0, ur = 0, urr = 0, utr = 0;
};
RemotePoint remote_eval(const RemoteProfile& profile, double t, double rho,
                        int max_order = -1);

/// Max-norm of the true flow residual of u_out over the support at time t
/// (drives the formal-solution order check).
double remote_nw_residual(const RemoteProfile& profile, double t);

} // namespace vmcf

#endif
