#ifndef VMCF_COMPOSITE_HPP
#define VMCF_COMPOSITE_HPP

#include "vmcf/grid.hpp"
#include "vmcf/inner.hpp"
#include "vmcf/remote.hpp"
#include "vmcf/self_similar.hpp"

namespace vmcf {

/// Plateau cutoff Theta: 1 for |xi| <= 1/4, 0 for |xi| >= 1/2, same bump
/// template as the remote cutoff rescaled.
double theta_cut(double xi);
double theta_cut_d1(double xi);
double theta_cut_d2(double xi);

/// (u, u_t, u_tt, u_rho, u_rhorho, u_trho) of a regional formula at one point.
struct FlowPoint {
    double u = 0, ut = 0, utt = 0, ur = 0, urr = 0, utr = 0;
};

/// Glue of the three regional profiles; evaluation is analytic in t (all time
/// derivatives come from the regional formulas and the cutoff chain rule).
/// The ladders are truncated at their desk-scale optimal orders: with the
/// constants this construction actually produces, the order-5 light-cone term
/// and the remote layers beyond k = 2 only become ordered for t well below
/// the times the glued object is evaluated at.
struct CompositeApprox {
    Config config;
    const InnerProfile* inner = nullptr;
    const SelfSimilarProfile* ss = nullptr;
    const RemoteProfile* remote = nullptr;
    int ss_order = 4;     // highest t^{nu k} kept from the light-cone ladder
    int remote_order = 4; // highest t^k layer kept from the remote ladder

    FlowPoint eval_inner(double t, double rho) const;
    FlowPoint eval_ss(double t, double rho) const;
    FlowPoint eval_out(double t, double rho) const;

    /// Blended point with exact plateau handoff (deep inner nodes reproduce
    /// the inner formula bit for bit, far nodes the remote one).
    FlowPoint eval(double t, double rho) const;

    /// Cutoff arguments in rho coordinates.
    double s1(double t) const { return std::pow(t, -1.0 - config.eps1); }
    double s2(double t) const { return std::pow(t, config.eps2 - 1.0); }

    void check_regions(double t) const; // RegionGap when the plateaus collide
};

CompositeApprox make_composite(const InnerProfile& inner, const SelfSimilarProfile& ss,
                               const RemoteProfile& remote);

/// V(t,.) and V_t = du/dt expressed in y on the given grid.
std::pair<SampledCurve, SampledCurve> blend(const CompositeApprox& ca, double t,
                                            GridPtr ygrid);

/// Pointwise flow residual of the composite in y-form (t^{nu+1} NW(u)).
double composite_residual(const CompositeApprox& ca, double t, double y);

struct RemainderNorms {
    double total = 0.0;
    double inner_part = 0.0, ss_part = 0.0, out_part = 0.0;
    int sobolev_order = 2;
};

/// <y>^{3/2}-weighted discrete Sobolev norms (default order 2) of the
/// composite residual, plus region-localized contributions.
RemainderNorms global_remainder(const CompositeApprox& ca, double t,
                                int sobolev_order = 2, std::size_t n_nodes = 3000);

/// Sup-norm mismatches on the two region overlaps at time t.
double overlap_in_ss(const CompositeApprox& ca, double t, std::size_t samples = 200);
double overlap_ss_out(const CompositeApprox& ca, double t, std::size_t samples = 200);

} // namespace vmcf

#endif
