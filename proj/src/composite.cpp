#include "vmcf/composite.hpp"
#include "vmcf/derivative.hpp"
#include "vmcf/error.hpp"
#include "vmcf/remote.hpp"

#include <cmath>

namespace vmcf {

double theta_cut(double xi) { return chi0(4.0 * std::abs(xi)); }
double theta_cut_d1(double xi) { return 4.0 * chi0_d1(4.0 * std::abs(xi)) * (xi < 0 ? -1.0 : 1.0); }
double theta_cut_d2(double xi) { return 16.0 * chi0_d2(4.0 * std::abs(xi)); }

CompositeApprox make_composite(const InnerProfile& inner, const SelfSimilarProfile& ss,
                               const RemoteProfile& remote) {
    CompositeApprox ca;
    ca.config = inner.config;
    ca.inner = &inner;
    ca.ss = &ss;
    ca.remote = &remote;
    return ca;
}

FlowPoint CompositeApprox::eval_inner(double t, double rho) const {
    const Config& cfg = config;
    const double a = std::pow(t, cfg.nu + 1.0);
    const double y = rho / a;
    const auto& layers = inner->layers;
    const auto& gammas = inner->gammas;
    const auto& grid = *layers[0].grid;
    const double rho0 = grid.origin_cutoff();

    FlowPoint p;
    double ut_acc = 0.0, utt_acc = 0.0;
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const double Tk = std::pow(t, 2.0 * cfg.nu * double(k));
        double V, Vp, Vpp, G, Gp;
        if (y >= rho0) {
            const auto& L = layers[k];
            const auto& Gm = gammas[k];
            V = hermite_eval(grid, L.values, L.deriv1, y);
            Vp = hermite_eval(grid, L.deriv1, L.deriv2, y);
            Vpp = hermite_eval_deriv(grid, L.deriv1, L.deriv2, y);
            G = hermite_eval(grid, Gm.values, Gm.deriv1, y);
            Gp = hermite_eval(grid, Gm.deriv1, Gm.deriv2, y);
        } else if (k == 0) {
            // even Taylor start of the ground state
            Series seed(inner->gs->taylor);
            V = seed.eval(y);
            Vp = seed.eval_deriv(y);
            Vpp = q_second_derivative(y, V, Vp);
            G = (1.0 + cfg.nu) * (V - y * Vp);
            Gp = -(1.0 + cfg.nu) * y * Vpp;
        } else {
            // layers vanish quadratically at the origin
            const double s = y / rho0;
            const auto& L = layers[k];
            const auto& Gm = gammas[k];
            V = L.values[0] * s * s;
            Vp = L.deriv1[0] * s;
            Vpp = L.deriv2[0];
            G = Gm.values[0] * s * s;
            Gp = Gm.deriv1[0] * s;
        }
        p.u += Tk * V;
        p.ur += Tk * Vp;
        p.urr += Tk * Vpp;
        ut_acc += Tk * G;
        p.utr += Tk * Gp;
        utt_acc += Tk * ((cfg.nu + 2.0 * cfg.nu * double(k)) * G - (1.0 + cfg.nu) * y * Gp);
    }
    p.u *= a;
    p.urr /= a;
    p.ut = std::pow(t, cfg.nu) * ut_acc;
    p.utr /= t;
    p.utt = std::pow(t, cfg.nu - 1.0) * utt_acc;
    return p;
}

FlowPoint CompositeApprox::eval_ss(double t, double rho) const {
    const Config& cfg = config;
    const double lam = ss->lambda(t);
    const double lamp = ss->lambda_prime(t);
    const double lampp = ss->lambda_second(t);
    const double z = rho / lam;

    double F = 0, Fz = 0, Fzz = 0, Ft = 0, Ftt = 0, Ftz = 0;
    for (int k = 3; k <= ss_order; ++k) {
        const double nk = cfg.nu * double(k);
        const double tk = std::pow(t, nk);
        const BranchValue w = ss->w_eval(k, z);
        F += tk * w.f;
        Fz += tk * w.fp;
        Fzz += tk * w.fpp;
        Ft += nk * tk / t * w.f;
        Ftt += nk * (nk - 1.0) * tk / (t * t) * w.f;
        Ftz += nk * tk / t * w.fp;
    }
    FlowPoint p;
    p.u = rho + lam * F;
    p.ur = 1.0 + Fz;
    p.urr = Fzz / lam;
    p.ut = lamp * (F - z * Fz) + lam * Ft;
    p.utr = -(lamp / lam) * z * Fzz + Ftz;
    p.utt = lampp * (F - z * Fz) + 2.0 * lamp * Ft - 2.0 * lamp * z * Ftz +
            (lamp * lamp / lam) * z * z * Fzz + lam * Ftt;
    return p;
}

FlowPoint CompositeApprox::eval_out(double t, double rho) const {
    const RemotePoint r = remote_eval(*remote, t, rho, remote_order);
    return {r.u, r.ut, r.utt, r.ur, r.urr, r.utr};
}

void CompositeApprox::check_regions(double t) const {
    // inner cutoff must die before the remote plateau ends
    const double inner_end = 0.5 / s1(t);
    const double remote_plateau = 0.25 / s2(t);
    if (inner_end > remote_plateau)
        throw RegionGap("cutoff supports fail to overlap at t = " + std::to_string(t));
}

namespace {

struct CutChain {
    double th, d_r, d_rr, d_t, d_tt, d_tr;
};

CutChain cut_chain(double rho, double s, double sdot, double sddot) {
    const double xi = rho * s;
    CutChain c;
    c.th = theta_cut(xi);
    const double t1 = theta_cut_d1(xi), t2 = theta_cut_d2(xi);
    c.d_r = t1 * s;
    c.d_rr = t2 * s * s;
    c.d_t = t1 * rho * sdot;
    c.d_tt = t2 * rho * sdot * rho * sdot + t1 * rho * sddot;
    c.d_tr = t2 * rho * sdot * s + t1 * sdot;
    return c;
}

FlowPoint axpy_cut(const FlowPoint& base, const CutChain& c, const FlowPoint& d) {
    FlowPoint p = base;
    p.u += c.th * d.u;
    p.ur += c.d_r * d.u + c.th * d.ur;
    p.urr += c.d_rr * d.u + 2.0 * c.d_r * d.ur + c.th * d.urr;
    p.ut += c.d_t * d.u + c.th * d.ut;
    p.utt += c.d_tt * d.u + 2.0 * c.d_t * d.ut + c.th * d.utt;
    p.utr += c.d_tr * d.u + c.d_t * d.ur + c.d_r * d.ut + c.th * d.utr;
    return p;
}

FlowPoint diff(const FlowPoint& a, const FlowPoint& b) {
    return {a.u - b.u, a.ut - b.ut, a.utt - b.utt, a.ur - b.ur, a.urr - b.urr, a.utr - b.utr};
}

} // namespace

FlowPoint CompositeApprox::eval(double t, double rho) const {
    const double s1v = s1(t), s2v = s2(t);
    const double xi1 = rho * s1v, xi2 = rho * s2v;

    if (xi1 <= 0.25) return eval_inner(t, rho); // deep inner plateau, bit-exact

    const double sd1 = (-1.0 - config.eps1) * s1v / t;
    const double sdd1 = (-1.0 - config.eps1) * (-2.0 - config.eps1) * s1v / (t * t);
    const double sd2 = (config.eps2 - 1.0) * s2v / t;
    const double sdd2 = (config.eps2 - 1.0) * (config.eps2 - 2.0) * s2v / (t * t);

    if (xi2 <= 0.25) {
        // remote weight identically zero here
        FlowPoint base = eval_ss(t, rho);
        if (xi1 >= 0.5) return base;
        const CutChain c1 = cut_chain(rho, s1v, sd1, sdd1);
        return axpy_cut(base, c1, diff(eval_inner(t, rho), base));
    }

    FlowPoint out = eval_out(t, rho);
    if (xi2 >= 0.5) return out; // far plateau, bit-exact

    const FlowPoint ssp = eval_ss(t, rho);
    const CutChain c2 = cut_chain(rho, s2v, sd2, sdd2);
    FlowPoint p = axpy_cut(out, c2, diff(ssp, out));
    if (xi1 < 0.5) {
        const CutChain c1 = cut_chain(rho, s1v, sd1, sdd1);
        p = axpy_cut(p, c1, diff(eval_inner(t, rho), ssp));
    }
    return p;
}

std::pair<SampledCurve, SampledCurve> blend(const CompositeApprox& ca, double t,
                                            GridPtr ygrid) {
    ca.check_regions(t);
    const double a = std::pow(t, ca.config.nu + 1.0);
    SampledCurve V(ygrid), Vt(ygrid);
    for (std::size_t i = 0; i < ygrid->size(); ++i) {
        const FlowPoint p = ca.eval(t, (*ygrid)[i] * a);
        V.values[i] = p.u / a;
        Vt.values[i] = p.ut;
    }
    V.deriv1 = differentiate_values(*ygrid, V.values, 1);
    Vt.deriv1 = differentiate_values(*ygrid, Vt.values, 1);
    return {std::move(V), std::move(Vt)};
}

double composite_residual(const CompositeApprox& ca, double t, double y) {
    const double a = std::pow(t, ca.config.nu + 1.0);
    const double rho = y * a;
    const FlowPoint p = ca.eval(t, rho);
    const double nw = (1.0 + p.ur * p.ur) * p.utt - (1.0 - p.ut * p.ut) * p.urr -
                      2.0 * p.ut * p.ur * p.utr +
                      3.0 * (1.0 + p.ur * p.ur - p.ut * p.ut) * (1.0 / p.u - p.ur / rho);
    return a * nw;
}

RemainderNorms global_remainder(const CompositeApprox& ca, double t,
                                int sobolev_order, std::size_t n_nodes) {
    ca.check_regions(t);
    const Config& cfg = ca.config;
    const double a = std::pow(t, cfg.nu + 1.0);
    const double ymax = 1.05 * 2.0 * cfg.delta / a;
    const double ycone = ca.ss->lambda(t) / (std::sqrt(2.0) * a);
    auto grid = make_banded_grid(1e-3, ymax, n_nodes, ycone - 0.25 * ycone,
                                 ycone + 0.25 * ycone, n_nodes / 3);

    std::vector<double> R(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i)
        R[i] = composite_residual(ca, t, (*grid)[i]);

    const double b_in = std::pow(t, cfg.eps1 - cfg.nu);
    const double b_out = std::pow(t, -cfg.eps2 - cfg.nu);

    RemainderNorms norms;
    norms.sobolev_order = sobolev_order;
    std::vector<double> work = R;
    double tot = 0, in = 0, mid = 0, out = 0;
    for (int m = 0; m <= sobolev_order; ++m) {
        if (m > 0) work = differentiate_values(*grid, work, 1);
        std::vector<double> weighted(work.size());
        for (std::size_t i = 0; i < work.size(); ++i)
            weighted[i] = work[i] * std::pow(1.0 + (*grid)[i] * (*grid)[i], 0.75);
        auto sq = [&](double lo, double hi) {
            const double v = radial_l2_norm(*grid, weighted, lo, hi);
            return v * v;
        };
        tot += sq((*grid)[0], grid->max());
        in += sq((*grid)[0], b_in);
        mid += sq(b_in / 10.0, 10.0 * b_out);
        out += sq(b_out, grid->max());
    }
    norms.total = std::sqrt(tot);
    norms.inner_part = std::sqrt(in);
    norms.ss_part = std::sqrt(mid);
    norms.out_part = std::sqrt(out);
    return norms;
}

double overlap_in_ss(const CompositeApprox& ca, double t, std::size_t samples) {
    const Config& cfg = ca.config;
    const double a = std::pow(t, cfg.nu + 1.0);
    const double b = std::pow(t, cfg.eps1 - cfg.nu);
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double y = b / 10.0 * std::pow(10.0, double(i) / double(samples - 1));
        const double du = ca.eval_inner(t, y * a).u - ca.eval_ss(t, y * a).u;
        worst = std::max(worst, std::abs(du) / a);
    }
    return worst;
}

double overlap_ss_out(const CompositeApprox& ca, double t, std::size_t samples) {
    const Config& cfg = ca.config;
    const double a = std::pow(t, cfg.nu + 1.0);
    const double b = std::pow(t, -cfg.eps2 - cfg.nu);
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double y = b * std::pow(10.0, double(i) / double(samples - 1));
        const double du = ca.eval_ss(t, y * a).u - ca.eval_out(t, y * a).u;
        worst = std::max(worst, std::abs(du) / a);
    }
    return worst;
}

} // namespace vmcf
