#ifndef VMCF_SELF_SIMILAR_HPP
#define VMCF_SELF_SIMILAR_HPP

#include "vmcf/grid.hpp"
#include "vmcf/inner.hpp"

#include <map>
#include <utility>

namespace vmcf {

inline constexpr double kLightCone = 0.70710678118654752440; // 1/sqrt(2)

/// Homogeneous-solution label f^{j,+/-}_{k,ell}; alpha = nu k + 4.
struct BasisElement {
    int j = 0, k = 3, ell = 0;
    int sign = +1; // +1 or -1 branch
    double alpha(double nu) const { return nu * double(k) + 4.0; }
};

/// binom(j,ell) (log|1/sqrt2 +/- z|)^{j-ell} |1/sqrt2 +/- z|^{alpha} / z^3.
double basis_eval(const BasisElement& b, double nu, double z);

/// Value/first/second derivative of the j = ell = 0 branches.
struct BranchValue {
    double f = 0, fp = 0, fpp = 0;
};
BranchValue basis_branch(double nu, int k, int sign, double z);

/// Wronskian closed form sqrt(2) alpha sgn(z - 1/sqrt2) |z^2 - 1/2|^{alpha-1} / z^6.
double basis_wronskian(double nu, int k, double z);

struct SelfSimilarProfile {
    Config config;
    std::map<int, std::pair<double, double>> basis_coeffs; // k -> (a+, a-)
    std::map<std::pair<int, int>, double> lambda_coeffs;   // (k, ell) -> lambda
    std::map<std::pair<int, int>, SampledCurve> w_layers;  // tabulated on zgrid
    GridPtr zgrid;
    std::map<int, std::pair<double, double>> matching;     // k -> (c_{0,-2}, c_{0,-3})

    double a_plus(int k) const { return basis_coeffs.at(k).first; }
    double a_minus(int k) const { return basis_coeffs.at(k).second; }
    double lambda_k(int k) const { return lambda_coeffs.at({k, 0}); }

    /// w_{k,0} and derivatives from the closed form (minus branch dropped
    /// beyond the light cone).
    BranchValue w_eval(int k, double z) const;

    double lambda(double t) const;        // t (1 + sum lambda_k t^{nu k})
    double lambda_prime(double t) const;
    double lambda_second(double t) const;
};

/// (2z^2 - 1) w'' - (4 z nu k + 6/z) w' + (2 nu k (1 + nu k) - 6/z^2) w.
SampledCurve apply_Ltilde(const Config& cfg, int k, const SampledCurve& w);

/// Matching constants (c_{0,-2}, c_{0,-3}) for order k out of the inner tails
/// (parity rule: the slot vanishes when beta + k - 1 is odd).
std::pair<double, double> matching_coeffs(int k, const InnerProfile& inner,
                                          const GroundState& gs);

/// Orders k = 3,4,5: homogeneous solves pinned by the matching constants.
SelfSimilarProfile solve_low_orders(const InnerProfile& inner, const GroundState& gs);

/// Unique solution of Ltilde_k f = g vanishing at the light cone, regular of
/// class C^{floor(alpha)} across it. taylor_kill_order = floor(k nu) + 3 jets
/// of g are removed by a polynomial before the kernel integral.
SampledCurve lightcone_duhamel(const Config& cfg, int k, const SampledCurve& g,
                               int taylor_kill_order);

double lambda_of_t(const SelfSimilarProfile& profile, double t);

/// V_ss(t, y) = y + lambda t^{-nu-1} W(t, y t^{nu+1}/lambda) sampled on the
/// self-similar region t^{eps1-nu}/10 <= y <= 10 t^{-eps2-nu}.
SampledCurve assemble_ss(const SelfSimilarProfile& profile, double t,
                         std::size_t n_nodes = 1024);

GridPtr make_z_grid(std::size_t n_geo = 2600, std::size_t n_band = 1750,
                    double zmax = 500.0);

} // namespace vmcf

#endif
