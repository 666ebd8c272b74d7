#include "vmcf/remote.hpp"
#include "vmcf/derivative.hpp"
#include "vmcf/error.hpp"
#include "vmcf/fit.hpp"

#include <cmath>

namespace vmcf {

// C-infinity plateau transition phi(2-s)/(phi(2-s)+phi(s-1)), phi = e^{-1/x}.
// A merely C^1 template is not enough here: the layer recursion applies two
// rho-derivatives per order, so any curvature jump of the cutoff at s = 1
// would make the second layer discontinuous.
namespace {
struct ChiParts {
    double A, Ap, App, B, Bp, Bpp; // phi(s-1), phi(2-s) and s-derivatives
};
ChiParts chi_parts(double s) {
    ChiParts c{};
    const double a = s - 1.0, b = 2.0 - s;
    c.A = std::exp(-1.0 / a);
    c.B = std::exp(-1.0 / b);
    c.Ap = c.A / (a * a);
    c.Bp = -c.B / (b * b);
    c.App = c.A / (a * a * a * a) - 2.0 * c.A / (a * a * a);
    c.Bpp = c.B / (b * b * b * b) - 2.0 * c.B / (b * b * b);
    return c;
}
} // namespace

double chi0(double s) {
    if (s <= 1.001) return 1.0; // e^{-1000} underflows anyway
    if (s >= 1.999) return 0.0;
    const ChiParts c = chi_parts(s);
    return c.B / (c.A + c.B);
}

double chi0_d1(double s) {
    if (s <= 1.001 || s >= 1.999) return 0.0;
    const ChiParts c = chi_parts(s);
    const double D = c.A + c.B;
    return (c.Bp * c.A - c.B * c.Ap) / (D * D);
}

double chi0_d2(double s) {
    if (s <= 1.001 || s >= 1.999) return 0.0;
    const ChiParts c = chi_parts(s);
    const double D = c.A + c.B;
    return (c.Bpp * c.A - c.B * c.App) / (D * D) -
           2.0 * (c.Bp * c.A - c.B * c.Ap) * (c.Ap + c.Bp) / (D * D * D);
}

const SampledCurve& RemoteProfile::layer(int k) const {
    if (k < 0 || std::size_t(k) >= g_layers.size())
        throw MissingLayer("remote layer " + std::to_string(k) + " not built");
    return g_layers[std::size_t(k)];
}

double RemoteProfile::eval(int k, double rho) const {
    const auto& c = layer(k);
    if (rho >= 2.0 * config.delta) return 0.0;
    if (rho < (*grid)[0])
        return c.values[0] * std::pow(rho / (*grid)[0], slope_fits[std::size_t(k)]);
    return hermite_eval(*grid, c.values, c.deriv1, rho);
}

double RemoteProfile::eval_d1(int k, double rho) const {
    const auto& c = layer(k);
    if (rho >= 2.0 * config.delta) return 0.0;
    if (rho < (*grid)[0]) {
        const double s = slope_fits[std::size_t(k)];
        return c.values[0] * s / rho * std::pow(rho / (*grid)[0], s);
    }
    return hermite_eval(*grid, c.deriv1, c.deriv2, rho);
}

double RemoteProfile::eval_d2(int k, double rho) const {
    const auto& c = layer(k);
    if (rho >= 2.0 * config.delta) return 0.0;
    if (rho < (*grid)[0]) {
        const double s = slope_fits[std::size_t(k)];
        return c.values[0] * s * (s - 1.0) / (rho * rho) * std::pow(rho / (*grid)[0], s);
    }
    return hermite_eval_deriv(*grid, c.deriv1, c.deriv2, rho);
}

namespace {

// The subleading structure of each layer is a ladder in rho^nu whose
// coefficients grow quickly with the order, so a raw log-log slope is still
// biased at the grid floor. Fit the slope on two dyadic windows and
// Richardson-extrapolate the rho^nu correction away.
void fit_slope(RemoteProfile& p, int k) {
    const double lo = (*p.grid)[0];
    const auto& layer = p.g_layers[std::size_t(k)];
    const double s1 = loglog_slope(layer, 2.0 * lo, 8.0 * lo);
    const double s2 = loglog_slope(layer, 8.0 * lo, 32.0 * lo);
    const double q = std::pow(4.0, p.config.nu) - 1.0;
    p.slope_fits.resize(std::max(p.slope_fits.size(), std::size_t(k) + 1));
    p.slope_fits[std::size_t(k)] = s1 - (s2 - s1) / q;
}

// series inversion of u_check = (u - rho)/(1 + (u - rho)/rho)
void push_u_check(RemoteProfile& p) {
    const std::size_t k = p.u_check.size();
    const auto& grid = *p.grid;
    SampledCurve uk(p.g_layers[0].grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double rho = grid[i];
        double rhs = p.g_layers[k].values[i];
        for (std::size_t a = 0; a < k; ++a)
            rhs -= p.u_check[a].values[i] * p.g_layers[k - a].values[i] / rho;
        uk.values[i] = rhs / (1.0 + p.g_layers[0].values[i] / rho);
    }
    p.u_check.push_back(std::move(uk));
}

} // namespace

RemoteProfile cauchy_data(const SelfSimilarProfile& ss, double delta, std::size_t n_nodes) {
    RemoteProfile p;
    p.config = ss.config;
    p.config.delta = delta;
    // deep floor: the slope ladder only straightens out well below 1e-3
    p.grid = make_geometric_grid(1e-5, 4.0 * delta, n_nodes);
    const double nu = p.config.nu;

    p.mu0.assign(6, 0.0);
    p.mu1.assign(6, 0.0);
    for (int k = 3; k <= 5; ++k) {
        // only the plus branch survives beyond the light cone (the minus
        // branch is dropped there), so the far-field coefficients are
        // (a+, 0)
        const double ap = ss.a_plus(k);
        p.mu0[std::size_t(k)] = ap;
        p.mu1[std::size_t(k)] = (nu * double(k) + 4.0) * ap / std::sqrt(2.0);
    }

    SampledCurve g0(p.grid), g1(p.grid);
    auto fill = [&](SampledCurve& out, const std::vector<double>& mu, double shift) {
        out.deriv1.resize(out.size());
        out.deriv2.resize(out.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double rho = (*p.grid)[i];
            double v = 0, v1 = 0, v2 = 0;
            for (int k = 3; k <= 5; ++k) {
                const double e = nu * double(k) + shift;
                const double pw = std::pow(rho, e);
                v += mu[std::size_t(k)] * pw;
                v1 += mu[std::size_t(k)] * e * pw / rho;
                v2 += mu[std::size_t(k)] * e * (e - 1.0) * pw / (rho * rho);
            }
            const double s = rho / delta;
            const double chi = chi0(s), chi1 = chi0_d1(s) / delta, chi2 = chi0_d2(s) / (delta * delta);
            out.values[i] = chi * v;
            out.deriv1[i] = chi1 * v + chi * v1;
            out.deriv2[i] = chi2 * v + 2.0 * chi1 * v1 + chi * v2;
        }
    };
    fill(g0, p.mu0, 1.0);
    fill(g1, p.mu1, 0.0);
    p.g_layers.push_back(std::move(g0));
    p.g_layers.push_back(std::move(g1));
    push_u_check(p);
    push_u_check(p);
    fit_slope(p, 0);
    fit_slope(p, 1);
    return p;
}

SampledCurve recurse_g(int k, RemoteProfile& profile) {
    if (k < 2) throw MissingLayer("recursion starts at k = 2");
    if (std::size_t(k) != profile.g_layers.size())
        throw MissingLayer("layers below " + std::to_string(k) + " must exist first");
    const auto& grid = *profile.grid;
    const std::size_t n = grid.size();
    const double two_delta = 2.0 * profile.config.delta;

    auto G = [&](int j) -> const SampledCurve& { return profile.g_layers[std::size_t(j)]; };
    auto U = [&](int j) -> const SampledCurve& { return profile.u_check[std::size_t(j)]; };

    std::vector<double> H(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = grid[i];
        const auto& gm2 = G(k - 2);
        // linear transport of the layer two steps down
        H[i] = gm2.deriv2[i] + 6.0 * (gm2.deriv1[i] / rho + gm2.values[i] / (rho * rho));

        for (int k1 = 0; k1 <= k; ++k1) {
            const int k2 = k - k1;
            if (k2 > 0 && k1 >= 1)
                H[i] -= 2.0 * double(k1) * double(k1 - 1 - k2) * G(k1).values[i] * G(k2).deriv1[i];
        }
        for (int k1 = 0; k1 <= k - 2; ++k1) {
            const int k2 = k - 2 - k1;
            H[i] += 6.0 * (-G(k1).values[i] * U(k2).values[i] / (rho * rho * rho) +
                           G(k1).deriv1[i] * (U(k2).values[i] / (rho * rho) +
                                              G(k2).deriv1[i] / rho));
        }
        for (int k1 = 1; k1 <= k - 1; ++k1)
            for (int k2 = 1; k1 + k2 <= k; ++k2) {
                const int k3 = k - k1 - k2;
                const double w = double(k1) * double(k2);
                H[i] += w * (-G(k1).values[i] * G(k2).values[i] * G(k3).deriv2[i] +
                             2.0 * G(k1).values[i] * G(k2).deriv1[i] * G(k3).deriv1[i] -
                             3.0 * G(k1).values[i] * G(k2).values[i] *
                                 (U(k3).values[i] / (rho * rho) + G(k3).deriv1[i] / rho));
            }
        for (int k1 = 2; k1 <= k - 1; ++k1)
            for (int k2 = 0; k1 + k2 <= k; ++k2) {
                const int k3 = k - k1 - k2;
                H[i] -= double(k1) * double(k1 - 1) * G(k1).values[i] * G(k2).deriv1[i] *
                        G(k3).deriv1[i];
            }
        for (int k1 = 0; k1 <= k - 2; ++k1)
            for (int k2 = 0; k1 + k2 <= k - 2; ++k2) {
                const int k3 = k - 2 - k1 - k2;
                H[i] += 3.0 * G(k1).deriv1[i] * G(k2).deriv1[i] *
                        (U(k3).values[i] / (rho * rho) + G(k3).deriv1[i] / rho);
            }
    }

    SampledCurve gk(profile.g_layers[0].grid);
    for (std::size_t i = 0; i < n; ++i) {
        const double gp = G(0).deriv1[i];
        const double denom = 2.0 + 2.0 * gp + gp * gp;
        if (denom < 0.1)
            throw DivisionNearZero("quasilinear coefficient too small; shrink delta");
        gk.values[i] = (grid[i] >= two_delta) ? 0.0
                                              : H[i] / (double(k) * double(k - 1) * denom);
    }
    gk.deriv1 = differentiate_values(grid, gk.values, 1);
    gk.deriv2 = differentiate_values(grid, gk.values, 2);
    // derivatives vanish with the function beyond the support
    for (std::size_t i = 0; i < n; ++i)
        if (grid[i] >= two_delta) gk.deriv1[i] = gk.deriv2[i] = 0.0;
    return gk;
}

RemoteProfile build_remote_profile(const SelfSimilarProfile& ss, double delta,
                                   int n_layers, std::size_t n_nodes) {
    RemoteProfile p = cauchy_data(ss, delta, n_nodes);
    p.n_layers = n_layers;
    for (int k = 2; k <= n_layers; ++k) {
        p.g_layers.push_back(recurse_g(k, p));
        push_u_check(p);
        fit_slope(p, k);
    }
    return p;
}

RemotePoint remote_eval(const RemoteProfile& profile, double t, double rho,
                        int max_order) {
    RemotePoint out;
    out.u = rho;
    out.ur = 1.0;
    const int top = (max_order < 0) ? int(profile.g_layers.size()) - 1
                                    : std::min(max_order, int(profile.g_layers.size()) - 1);
    for (int k = 0; k <= top; ++k) {
        const double tk = std::pow(t, double(k));
        const double g = profile.eval(k, rho);
        const double g1 = profile.eval_d1(k, rho);
        const double g2 = profile.eval_d2(k, rho);
        out.u += tk * g;
        out.ur += tk * g1;
        out.urr += tk * g2;
        if (k >= 1) {
            out.ut += double(k) * std::pow(t, double(k - 1)) * g;
            out.utr += double(k) * std::pow(t, double(k - 1)) * g1;
        }
        if (k >= 2) out.utt += double(k) * double(k - 1) * std::pow(t, double(k - 2)) * g;
    }
    return out;
}

SampledCurve assemble_out(const RemoteProfile& profile, double t, std::size_t n_nodes) {
    const Config& cfg = profile.config;
    const double scale = std::pow(t, cfg.nu + 1.0);
    const double ylo = std::pow(t, -cfg.eps2 - cfg.nu);
    const double yhi = std::max(4.0 * ylo, 1.2 * 2.0 * cfg.delta / scale);
    auto ygrid = make_geometric_grid(ylo, yhi, n_nodes);
    SampledCurve out;
    out.grid = ygrid;
    out.values.resize(ygrid->size());
    out.deriv1.resize(ygrid->size());
    for (std::size_t i = 0; i < ygrid->size(); ++i) {
        const double rho = (*ygrid)[i] * scale;
        const RemotePoint p = remote_eval(profile, t, rho);
        out.values[i] = p.u / scale;
        out.deriv1[i] = p.ur;
    }
    return out;
}

double remote_nw_residual(const RemoteProfile& profile, double t) {
    const auto& grid = *profile.grid;
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double rho = grid[i];
        // the series is asymptotic in t/rho: stay on the outer half of the
        // support where it is ordered for the t range of interest
        if (rho < profile.config.delta / 2.0 || rho > 2.0 * profile.config.delta) continue;
        const auto& L = profile.g_layers;
        double u = rho, ut = 0, utt = 0, ur = 1, urr = 0, utr = 0;
        for (int k = 0; k < int(L.size()); ++k) {
            const double tk = std::pow(t, double(k));
            u += tk * L[std::size_t(k)].values[i];
            ur += tk * L[std::size_t(k)].deriv1[i];
            urr += tk * L[std::size_t(k)].deriv2[i];
            if (k >= 1) {
                ut += double(k) * std::pow(t, double(k - 1)) * L[std::size_t(k)].values[i];
                utr += double(k) * std::pow(t, double(k - 1)) * L[std::size_t(k)].deriv1[i];
            }
            if (k >= 2)
                utt += double(k) * double(k - 1) * std::pow(t, double(k - 2)) *
                       L[std::size_t(k)].values[i];
        }
        const double res = (1.0 + ur * ur) * utt - (1.0 - ut * ut) * urr -
                           2.0 * ut * ur * utr +
                           3.0 * (1.0 + ur * ur - ut * ut) * (1.0 / u - ur / rho);
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

} // namespace vmcf
