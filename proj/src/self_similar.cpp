#include "vmcf/self_similar.hpp"
#include "vmcf/derivative.hpp"
#include "vmcf/error.hpp"
#include "vmcf/fit.hpp"
#include "vmcf/ode.hpp"
#include "vmcf/series.hpp"

#include <cmath>
#include <span>

namespace vmcf {

namespace {
double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}
} // namespace

double basis_eval(const BasisElement& b, double nu, double z) {
    if (!(z > 0.0)) throw Error("basis defined for z > 0");
    if (b.ell > b.j) return 0.0;
    const double u = kLightCone + double(b.sign) * z;
    const double a = b.alpha(nu);
    const double au = std::abs(u);
    if (au == 0.0) return 0.0; // minus branch on the cone, alpha > 0
    return binom(b.j, b.ell) * std::pow(std::log(au), b.j - b.ell) *
           std::pow(au, a) / (z * z * z);
}

BranchValue basis_branch(double nu, int k, int sign, double z) {
    const double a = nu * double(k) + 4.0;
    const double u = kLightCone + double(sign) * z;
    const double au = std::abs(u), su = (u >= 0.0) ? double(sign) : -double(sign);
    // d/dz |u|^a = sign * a |u|^{a-1} sgn(u)
    const double z3 = z * z * z;
    const double pa = std::pow(au, a);
    const double pa1 = (au > 0.0) ? std::pow(au, a - 1.0) : 0.0;
    const double pa2 = (au > 0.0) ? std::pow(au, a - 2.0) : 0.0;
    BranchValue v;
    v.f = pa / z3;
    v.fp = a * su * pa1 / z3 - 3.0 * pa / (z3 * z);
    v.fpp = a * (a - 1.0) * pa2 / z3 - 6.0 * a * su * pa1 / (z3 * z) + 12.0 * pa / (z3 * z * z);
    return v;
}

double basis_wronskian(double nu, int k, double z) {
    const double a = nu * double(k) + 4.0;
    const double arg = std::abs(z * z - 0.5);
    const double s = (z > kLightCone) ? 1.0 : -1.0;
    return std::sqrt(2.0) * a * s * std::pow(arg, a - 1.0) / std::pow(z, 6.0);
}

GridPtr make_z_grid(std::size_t n_geo, std::size_t n_band, double zmax) {
    // wide uniform band: the minus branch keeps an O(1) sixth derivative all
    // the way out to |z - 1/sqrt2| ~ 0.5, so the fine spacing must extend
    // past the degeneracy itself
    return make_banded_grid(1e-3, zmax, n_geo, kLightCone - 0.45, kLightCone + 0.6, n_band);
}

SampledCurve apply_Ltilde(const Config& cfg, int k, const SampledCurve& w) {
    const auto& g = *w.grid;
    std::vector<double> d1 = w.has_deriv1() ? w.deriv1 : differentiate_values(g, w.values, 1);
    std::vector<double> d2 = w.has_deriv2() ? w.deriv2 : differentiate_values(g, w.values, 2);
    const double nk = cfg.nu * double(k);
    SampledCurve out(w.grid);
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double z = g[i];
        out.values[i] = (2.0 * z * z - 1.0) * d2[i] - (4.0 * z * nk + 6.0 / z) * d1[i] +
                        (2.0 * nk * (1.0 + nk) - 6.0 / (z * z)) * w.values[i];
    }
    return out;
}

std::pair<double, double> matching_coeffs(int k, const InnerProfile& inner,
                                          const GroundState& gs) {
    auto slot = [&](int beta) -> double {
        if ((beta + k - 1) % 2 != 0) return 0.0; // parity rule
        const int m = (beta + k - 1) / 2;
        const int n = -beta;
        if (m == 0) return gs.d(n);
        if (std::size_t(m) >= inner.tails.size())
            throw MissingTailCoefficient("inner tails fitted only through layer " +
                                         std::to_string(inner.tails.size() - 1));
        return inner.tail_coeff(n, m, 0);
    };
    return {slot(-2), slot(-3)};
}

SelfSimilarProfile solve_low_orders(const InnerProfile& inner, const GroundState& gs) {
    SelfSimilarProfile p;
    p.config = inner.config;
    p.zgrid = make_z_grid();
    const double nu = p.config.nu;
    const double c = kLightCone;

    for (int k = 3; k <= 5; ++k) {
        const auto [c_m2, c_m3] = matching_coeffs(k, inner, gs);
        p.matching[k] = {c_m2, c_m3};
        const double a = nu * double(k) + 4.0;
        double ap, am;
        if (k == 3) {
            // c_{0,-3} vanishes by parity, so a+ = -a-
            const double denom = 2.0 * a * std::pow(c, a - 1.0);
            if (std::abs(denom) < 1e-12) throw SingularMatchingSystem("degenerate k=3 solve");
            ap = c_m2 / denom;
            am = -ap;
        } else {
            const double sum = c_m3 / std::pow(c, a);
            const double diff = c_m2 / (a * std::pow(c, a - 1.0));
            ap = 0.5 * (sum + diff);
            am = 0.5 * (sum - diff);
        }
        p.basis_coeffs[k] = {ap, am};

        // lambda_{k,0} = -w_{k,0}(1/sqrt2); only the plus branch survives there
        p.lambda_coeffs[{k, 0}] = -ap * std::pow(2.0, (nu * double(k) + 7.0) / 2.0);
        if (k == 5) p.lambda_coeffs[{5, 1}] = 0.0;

        SampledCurve w(p.zgrid);
        w.deriv1.resize(w.size());
        w.deriv2.resize(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            const BranchValue v = p.w_eval(k, (*p.zgrid)[i]);
            w.values[i] = v.f;
            w.deriv1[i] = v.fp;
            w.deriv2[i] = v.fpp;
        }
        p.w_layers[{k, 0}] = std::move(w);
    }
    return p;
}

BranchValue SelfSimilarProfile::w_eval(int k, double z) const {
    const auto [ap, am] = basis_coeffs.at(k);
    const BranchValue plus = basis_branch(config.nu, k, +1, z);
    BranchValue v{ap * plus.f, ap * plus.fp, ap * plus.fpp};
    if (z <= kLightCone) {
        const BranchValue minus = basis_branch(config.nu, k, -1, z);
        v.f += am * minus.f;
        v.fp += am * minus.fp;
        v.fpp += am * minus.fpp;
    }
    return v;
}

double SelfSimilarProfile::lambda(double t) const {
    double s = 1.0;
    for (const auto& [key, lam] : lambda_coeffs)
        if (key.second == 0) s += lam * std::pow(t, config.nu * double(key.first));
    return t * s;
}

double SelfSimilarProfile::lambda_prime(double t) const {
    double s = 1.0;
    for (const auto& [key, lam] : lambda_coeffs)
        if (key.second == 0)
            s += (config.nu * double(key.first) + 1.0) * lam *
                 std::pow(t, config.nu * double(key.first));
    return s;
}

double SelfSimilarProfile::lambda_second(double t) const {
    double s = 0.0;
    for (const auto& [key, lam] : lambda_coeffs)
        if (key.second == 0) {
            const double nk = config.nu * double(key.first);
            s += (nk + 1.0) * nk * lam * std::pow(t, nk - 1.0);
        }
    return s;
}

double lambda_of_t(const SelfSimilarProfile& profile, double t) {
    if (!(t > 0.0 && t < 1.0)) throw Error("t must lie in (0, 1)");
    return profile.lambda(t);
}

SampledCurve assemble_ss(const SelfSimilarProfile& profile, double t, std::size_t n_nodes) {
    const Config& cfg = profile.config;
    const double ylo = std::pow(t, cfg.eps1 - cfg.nu) / 10.0;
    const double yhi = 10.0 * std::pow(t, -cfg.eps2 - cfg.nu);
    auto ygrid = make_geometric_grid(ylo, yhi, n_nodes);
    const double lam = profile.lambda(t);
    const double scale = std::pow(t, cfg.nu + 1.0);

    SampledCurve out;
    out.grid = ygrid;
    out.values.resize(ygrid->size());
    out.deriv1.resize(ygrid->size());
    for (std::size_t i = 0; i < ygrid->size(); ++i) {
        const double y = (*ygrid)[i];
        const double z = y * scale / lam;
        double w = 0.0, wp = 0.0;
        for (int k = 3; k <= 5; ++k) {
            const double tk = std::pow(t, cfg.nu * double(k));
            const BranchValue v = profile.w_eval(k, z);
            w += tk * v.f;
            wp += tk * v.fp;
        }
        out.values[i] = y + lam * std::pow(t, -cfg.nu - 1.0) * w;
        out.deriv1[i] = 1.0 + wp;
    }
    return out;
}

SampledCurve lightcone_duhamel(const Config& cfg, int k, const SampledCurve& g,
                               int taylor_kill_order) {
    const double nu = cfg.nu;
    const double c = kLightCone;
    const int N = taylor_kill_order;
    const auto& grid = *g.grid;
    if (grid[0] >= c || grid.max() <= c)
        throw RegionGap("grid must straddle the light cone");

    // --- local jet of g at the cone from a least-squares polynomial fit on
    // 9 nodes spaced wide enough to keep high derivatives conditioned
    const int jet_nodes = 9;
    std::vector<double> xs, fs;
    {
        const double spread = 0.025;
        for (int m = 0; m < jet_nodes; ++m) {
            const double target = c + spread * double(m - jet_nodes / 2);
            const std::size_t i = grid.interval_of(target);
            if (!xs.empty() && std::abs(grid[i] - xs.back()) < 1e-12) continue;
            xs.push_back(grid[i]);
            fs.push_back(g.values[i]);
        }
    }
    const int deg = N + 1;
    if (int(xs.size()) < deg + 1)
        throw InsufficientSmoothness("not enough nodes near the cone for the jet fit");
    std::vector<std::vector<double>> A(xs.size(), std::vector<double>(std::size_t(deg + 1)));
    for (std::size_t r = 0; r < xs.size(); ++r) {
        double p = 1.0;
        for (int j = 0; j <= deg; ++j) {
            A[r][std::size_t(j)] = p;
            p *= (xs[r] - c);
        }
    }
    auto gjet = lstsq(A, fs, nullptr); // g ~ sum gjet[j] (z-c)^j

    // --- coefficients alpha_m of f0 = sum_{m=1}^{N+1} a_m (z-c)^m such that
    // the jet of Ltilde f0 matches gjet through order N
    const std::size_t D = std::size_t(N) + 1;
    Series inv_z(D, 0.0); // 1/(u + c) as a series in u = z - c
    {
        Series u(D, 0.0);
        if (D >= 1) u.c[1] = 1.0;
        Series denom(D, c);
        denom = denom + u;
        inv_z = reciprocal(denom);
    }
    const double nk = nu * double(k);
    Series coef1(D, 0.0); // 2z^2 - 1 = 2u^2 + 2 sqrt2 u
    if (D >= 1) coef1.c[1] = 2.0 * std::sqrt(2.0);
    if (D >= 2) coef1.c[2] = 2.0;
    Series coef2(D, 0.0); // -(4 nu k z + 6/z)
    {
        Series zu(D, c);
        if (D >= 1) zu.c[1] = 1.0;
        coef2 = -1.0 * (4.0 * nk * zu + 6.0 * inv_z);
    }
    Series coef3 = (2.0 * nk * (1.0 + nk)) * Series(D, 1.0) - 6.0 * (inv_z * inv_z);

    std::vector<std::vector<double>> M(std::size_t(N + 1), std::vector<double>(std::size_t(N + 1)));
    for (int m = 1; m <= N + 1; ++m) {
        Series um(D, 0.0);
        if (std::size_t(m) <= D) um.c[std::size_t(m)] = 1.0;
        Series ump1(D, 0.0), ump2(D, 0.0);
        if (std::size_t(m - 1) <= D) ump1.c[std::size_t(m - 1)] = double(m);
        if (m >= 2 && std::size_t(m - 2) <= D) ump2.c[std::size_t(m - 2)] = double(m) * double(m - 1);
        Series Lu = coef1 * ump2 + coef2 * ump1 + coef3 * um;
        for (int r = 0; r <= N; ++r) M[std::size_t(r)][std::size_t(m - 1)] = Lu[std::size_t(r)];
    }
    std::vector<double> jet_rhs(static_cast<std::size_t>(N + 1));
    for (int r = 0; r <= N; ++r) jet_rhs[std::size_t(r)] = gjet[std::size_t(r)];
    auto am = lstsq(M, jet_rhs, nullptr);

    auto f0 = [&](double z) {
        double p = 0.0, u = z - c;
        for (int m = N + 1; m >= 1; --m) p = (p + am[std::size_t(m - 1)]) * u;
        return p;
    };
    auto Lf0 = [&](double z) {
        const double u = z - c;
        double f = 0, fp = 0, fpp = 0;
        double um = u; // u^m
        for (int m = 1; m <= N + 1; ++m) {
            const double a = am[std::size_t(m - 1)];
            f += a * um;
            fp += a * double(m) * um / u;
            if (m >= 2) fpp += a * double(m) * double(m - 1) * um / (u * u);
            um *= u;
        }
        return (2.0 * z * z - 1.0) * fpp - (4.0 * z * nk + 6.0 / z) * fp +
               (2.0 * nk * (1.0 + nk) - 6.0 / (z * z)) * f;
    };

    auto gtilde = [&](double z) { return curve_eval(g, z) - Lf0(z); };

    // --- the smooth solution through the cone: jet-killed local polynomial
    // collocation (the polynomial class automatically excludes the
    // |z - c|^alpha branch, which is what uniqueness removes), then ODE
    // marching away from the cone where the equation is regular
    const double r1 = 0.15;
    const int Mdeg = 26;
    std::vector<std::size_t> win;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid[i] - c) <= r1) win.push_back(i);
    if (win.size() < std::size_t(4 * Mdeg))
        throw InsufficientSmoothness("not enough nodes around the cone for collocation");
    std::vector<std::vector<double>> C(win.size(), std::vector<double>(std::size_t(Mdeg)));
    std::vector<double> rbs(win.size());
    for (std::size_t r = 0; r < win.size(); ++r) {
        const double z = grid[win[r]];
        const double u = (z - c) / r1;
        // columns: Ltilde applied to the scaled monomials ((z-c)/r1)^m
        for (int m = 1; m <= Mdeg; ++m) {
            const double fm = std::pow(u, m);
            const double fpm = double(m) * std::pow(u, m - 1) / r1;
            const double fppm =
                (m >= 2) ? double(m) * double(m - 1) * std::pow(u, m - 2) / (r1 * r1) : 0.0;
            C[r][std::size_t(m - 1)] = (2.0 * z * z - 1.0) * fppm -
                                       (4.0 * z * nk + 6.0 / z) * fpm +
                                       (2.0 * nk * (1.0 + nk) - 6.0 / (z * z)) * fm;
        }
        rbs[r] = gtilde(z);
    }
    auto bcoef = lstsq(C, rbs, nullptr); // f1 = sum bcoef[m-1] ((z-c)/r1)^m
    auto f1_loc = [&](double z, double* deriv) {
        const double u = (z - c) / r1;
        double p = 0.0;
        for (int m = Mdeg; m >= 1; --m) p = p * u + bcoef[std::size_t(m - 1)];
        if (deriv) {
            double d = 0.0;
            for (int m = Mdeg; m >= 1; --m) d = d * u + double(m) * bcoef[std::size_t(m - 1)];
            *deriv = d / r1;
        }
        return p * u;
    };

    const std::size_t n = grid.size();
    SampledCurve out(g.grid);
    // window nodes: polynomial value
    for (std::size_t i : win) out.values[i] = f0(grid[i]) + f1_loc(grid[i], nullptr);

    // march outward on each side with the regular ODE
    auto rhs = [&](double z, std::span<const double> y, std::span<double> d) {
        d[0] = y[1];
        d[1] = (curve_eval(g, z) + (4.0 * z * nk + 6.0 / z) * y[1] -
                (2.0 * nk * (1.0 + nk) - 6.0 / (z * z)) * y[0]) /
               (2.0 * z * z - 1.0);
    };
    if (!win.empty() && win.back() + 1 < n) {
        const std::size_t start = win.back();
        double fp = 0.0;
        const double fv = f0(grid[start]) + f1_loc(grid[start], &fp);
        double f0p_val;
        {
            // derivative of the jet polynomial
            const double u = grid[start] - c;
            double dd = 0.0;
            for (int m = N + 1; m >= 1; --m) dd = dd * u + double(m) * am[std::size_t(m - 1)];
            f0p_val = dd;
        }
        std::vector<double> nodes(grid.nodes.begin() + std::ptrdiff_t(start), grid.nodes.end());
        auto states = integrate_to_nodes(rhs, {fv, fp + f0p_val},
                                         std::span<const double>(nodes), 1e-11);
        for (std::size_t j = 1; j < nodes.size(); ++j) out.values[start + j] = states[j][0];
    }
    if (!win.empty() && win.front() > 0) {
        const std::size_t start = win.front();
        double fp = 0.0;
        const double fv = f0(grid[start]) + f1_loc(grid[start], &fp);
        double f0p_val;
        {
            const double u = grid[start] - c;
            double dd = 0.0;
            for (int m = N + 1; m >= 1; --m) dd = dd * u + double(m) * am[std::size_t(m - 1)];
            f0p_val = dd;
        }
        std::vector<double> nodes;
        for (std::size_t i = start + 1; i-- > 0;) nodes.push_back(grid[i]);
        auto states = integrate_to_nodes(rhs, {fv, fp + f0p_val},
                                         std::span<const double>(nodes), 1e-11);
        for (std::size_t j = 1; j < nodes.size(); ++j) out.values[start - j] = states[j][0];
    }
    out.deriv1 = differentiate_values(grid, out.values, 1);
    return out;
}

} // namespace vmcf
