#include "vmcf/inner.hpp"
#include "vmcf/derivative.hpp"
#include "vmcf/error.hpp"

#include <cmath>

namespace vmcf {

void Config::validate() const {
    if (!(nu > 0.5)) throw InvariantViolation("nu must exceed 1/2");
    if (!(eps1 > 0.0 && eps1 < nu)) throw InvariantViolation("eps1 must lie in (0, nu)");
    if (!(eps2 > 0.0 && eps2 < 1.0)) throw InvariantViolation("eps2 must lie in (0, 1)");
    if (!(delta > 0.0)) throw InvariantViolation("delta must be positive");
    if (N < 1) throw InvariantViolation("N must be at least 1");
}

const SampledCurve& InnerProfile::layer(int k) const {
    if (k < 0 || std::size_t(k) >= layers.size())
        throw MissingLayer("layer " + std::to_string(k) + " not built");
    return layers[std::size_t(k)];
}

double InnerProfile::tail_coeff(int n, int k, int ell) const {
    if (k <= 0 || std::size_t(k) >= tails.size())
        throw MissingTailCoefficient("no tail fit for layer " + std::to_string(k));
    return tails[std::size_t(k)].coefficient(-double(n), ell);
}

SampledCurve gamma_apply(const Config& cfg, int k, const SampledCurve& f) {
    if (!f.has_deriv1()) throw GridMismatch("gamma_apply needs deriv1");
    const auto& g = *f.grid;
    SampledCurve out(f.grid);
    const double a = 2.0 * cfg.nu * double(k), b = 1.0 + cfg.nu;
    for (std::size_t i = 0; i < f.size(); ++i)
        out.values[i] = a * f.values[i] + b * (f.values[i] - g[i] * f.deriv1[i]);
    out.deriv1 = differentiate_values(g, out.values, 1);
    out.deriv2 = differentiate_values(g, out.values, 2);
    return out;
}

namespace {

// (Gamma_k^2 - Gamma_k) V_k from the gamma-applied curve:
// Gamma_k(G) - G = (2 nu k + nu) G - (1 + nu) y G'.
std::vector<double> gamma_square_minus(const Config& cfg, int k, const SampledCurve& G) {
    const auto& g = *G.grid;
    std::vector<double> out(G.size());
    const double a = 2.0 * cfg.nu * double(k) + cfg.nu, b = 1.0 + cfg.nu;
    for (std::size_t i = 0; i < G.size(); ++i)
        out[i] = a * G.values[i] - b * g[i] * G.deriv1[i];
    return out;
}

// all (j1..j4) >= 0 with j1+...+j4 = m
template <typename F>
void for_each_quad(int m, F&& fn) {
    for (int a = 0; a <= m; ++a)
        for (int b = 0; a + b <= m; ++b)
            for (int c = 0; a + b + c <= m; ++c) fn(a, b, c, m - a - b - c);
}

} // namespace

SampledCurve source_F(int k, const InnerProfile& profile) {
    if (k < 1) throw MissingLayer("source_F needs k >= 1");
    if (std::size_t(k) > profile.layers.size())
        throw MissingLayer("layers up to k-1 must be present");
    const Config& cfg = profile.config;
    const auto& grid = *profile.layers[0].grid;
    const std::size_t n = grid.size();

    auto V = [&](int j) -> const SampledCurve& { return profile.layers[std::size_t(j)]; };
    auto G = [&](int j) -> const SampledCurve& { return profile.gammas[std::size_t(j)]; };

    std::vector<std::vector<double>> D(static_cast<std::size_t>(k)); // (Gamma^2-Gamma) V_j
    for (int j = 0; j < k; ++j) D[std::size_t(j)] = gamma_square_minus(cfg, j, G(j));

    const auto& Q = profile.gs->curve;
    std::vector<double> out(n, 0.0);

    // first part: no Gamma factors
    for (int a = 1; a <= k - 1; ++a) {
        const int b = k - a;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = grid[i];
            out[i] -= V(a).values[i] *
                      (V(b).deriv2[i] + 3.0 * V(b).deriv1[i] / y) / Q.values[i];
            out[i] += 3.0 * V(a).deriv1[i] * V(b).deriv1[i] / Q.values[i];
        }
    }
    for_each_quad(k, [&](int a, int b, int c, int d) {
        if (a > k - 1 || b > k - 1 || c > k - 1 || d > k - 1) return;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = grid[i];
            out[i] -= 3.0 * V(a).deriv1[i] * V(b).deriv1[i] * V(c).deriv1[i] *
                      V(d).values[i] / (y * Q.values[i]);
        }
    });

    // second part: the Gamma terms, shifted one power down
    const int m = k - 1;
    for (int a = 0; a <= m; ++a) {
        const int b = m - a;
        for (std::size_t i = 0; i < n; ++i) {
            out[i] += V(a).values[i] * D[std::size_t(b)][i] / Q.values[i];
            out[i] -= 3.0 * G(a).values[i] * G(b).values[i] / Q.values[i];
        }
    }
    for_each_quad(m, [&](int a, int b, int c, int d) {
        for (std::size_t i = 0; i < n; ++i) {
            const double y = grid[i];
            const double invq = 1.0 / Q.values[i];
            out[i] += V(a).values[i] * G(b).values[i] * G(c).values[i] *
                      (V(d).deriv2[i] + 3.0 * V(d).deriv1[i] / y) * invq;
            out[i] += V(a).values[i] * V(b).deriv1[i] * V(c).deriv1[i] *
                      D[std::size_t(d)][i] * invq;
            out[i] -= 2.0 * V(a).values[i] * V(b).deriv1[i] * G(c).values[i] *
                      G(d).deriv1[i] * invq;
        }
    });

    SampledCurve F(profile.layers[0].grid);
    F.values = std::move(out);
    F.deriv1 = differentiate_values(grid, F.values, 1);
    return F;
}

std::vector<TailTerm> inner_tail_basis(int k) {
    // generous pure-power range so the log slots are not forced to soak up
    // omitted higher powers (they are nearly collinear over one octave)
    std::vector<TailTerm> basis;
    for (int ell = 0; ell <= k; ++ell) {
        const int n_min = 2 - 2 * (k - ell);
        const int count = (ell == 0) ? 6 : (ell == 1 ? 2 : 1);
        for (int j = 0; j < count; ++j)
            basis.push_back({-double(n_min + j), ell});
    }
    return basis;
}

namespace {

// The y^0 and y^-1 slots of layer one follow from the leading source
// coefficients through the Euler factors (m+2)(m+3) of the far-field
// operator. Peeling them off first leaves a remainder whose LEADING power is
// y^-2, so its coefficient d_{2,1,0} comes out of a well-conditioned fit;
// fitted jointly it is hopelessly collinear over one octave.
TailFit layer_one_tail(const InnerProfile& profile, const SampledCurve& V1,
                       const SampledCurve& F1) {
    const double hi = profile.gs->rho_max;
    auto src = fit_tail(F1, {{-2, 0}, {-3, 0}, {-4, 0}, {-5, 0}}, hi / 2.0, hi);
    const double d0 = src.coefficient(-2) / 6.0;
    const double d1 = src.coefficient(-3) / 2.0;

    SampledCurve W(V1.grid);
    for (std::size_t i = 0; i < W.size(); ++i)
        W.values[i] = V1.values[i] - d0 - d1 / (*V1.grid)[i];
    const std::vector<TailTerm> wbasis = {{-2, 0}, {-3, 0}, {-4, 0}, {-5, 0},
                                          {-2, 1}, {-3, 1}};
    auto wfit = fit_tail(W, wbasis, hi / 2.0, hi);

    TailFit merged;
    merged.basis = {{0, 0}, {-1, 0}};
    merged.coefficients = {d0, d1};
    merged.sigma = {src.sigma.empty() ? 0.0 : src.sigma[0] / 6.0,
                    src.sigma.size() > 1 ? src.sigma[1] / 2.0 : 0.0};
    for (std::size_t j = 0; j < wbasis.size(); ++j) {
        merged.basis.push_back(wbasis[j]);
        merged.coefficients.push_back(wfit.coefficients[j]);
        merged.sigma.push_back(j < wfit.sigma.size() ? wfit.sigma[j] : 0.0);
    }
    merged.window_lo = wfit.window_lo;
    merged.window_hi = wfit.window_hi;
    merged.residual = wfit.residual;
    return merged;
}

} // namespace

SampledCurve solve_layer(int k, InnerProfile& profile, const LinearizedOperator& lin) {
    auto F = source_F(k, profile);
    auto Vk = lin.duhamel_solve(F, 0.0);
    if (profile.layers.size() == std::size_t(k)) {
        profile.layers.push_back(Vk);
        profile.gammas.push_back(gamma_apply(profile.config, k, Vk));
        profile.sources.push_back(F);
        const double hi = profile.gs->rho_max;
        if (k == 1)
            profile.tails.push_back(layer_one_tail(profile, Vk, F));
        else
            profile.tails.push_back(fit_tail(Vk, inner_tail_basis(k), hi / 2.0, hi));
    }
    return Vk;
}

InnerProfile build_inner_profile(const Config& cfg, const GroundState& gs,
                                 const LinearizedOperator& lin) {
    cfg.validate();
    InnerProfile p;
    p.config = cfg;
    p.gs = &gs;
    p.layers.push_back(gs.curve);
    p.gammas.push_back(gamma_apply(cfg, 0, gs.curve));
    p.sources.emplace_back(); // slot 0 unused
    p.tails.emplace_back();
    for (int k = 1; k <= cfg.N; ++k) solve_layer(k, p, lin);
    return p;
}

double inner_boundary(const Config& cfg, double t) {
    return std::pow(t, cfg.eps1 - cfg.nu);
}

SampledCurve assemble_inner(const InnerProfile& profile, double t) {
    if (!(t > 0.0 && t < 1.0)) throw Error("t must lie in (0, 1)");
    const auto& grid = *profile.layers[0].grid;
    const double ymax = inner_boundary(profile.config, t);
    auto sub = std::make_shared<RadialGrid>();
    sub->policy = grid.policy;
    for (std::size_t i = 0; i < grid.size() && grid[i] <= ymax; ++i)
        sub->nodes.push_back(grid[i]);
    SampledCurve out;
    out.grid = sub;
    out.values.resize(sub->size());
    out.deriv1.resize(sub->size());
    for (std::size_t i = 0; i < sub->size(); ++i) {
        double v = 0.0, vp = 0.0;
        for (std::size_t kk = 0; kk < profile.layers.size(); ++kk) {
            const double tk = std::pow(t, 2.0 * profile.config.nu * double(kk));
            v += tk * profile.layers[kk].values[i];
            vp += tk * profile.layers[kk].deriv1[i];
        }
        out.values[i] = v;
        out.deriv1[i] = vp;
    }
    return out;
}

std::vector<double> inner_residual_values(const InnerProfile& profile, double t) {
    const Config& cfg = profile.config;
    const auto& grid = *profile.layers[0].grid;
    const std::size_t n = grid.size();
    const std::size_t layers = profile.layers.size();

    std::vector<double> Tk(layers);
    for (std::size_t k = 0; k < layers; ++k) Tk[k] = std::pow(t, 2.0 * cfg.nu * double(k));
    const double t2nu = std::pow(t, 2.0 * cfg.nu);

    std::vector<double> res(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = grid[i];
        double V = 0, Vy = 0, Vyy = 0, G = 0, Gy = 0, D = 0;
        for (std::size_t k = 0; k < layers; ++k) {
            const auto& L = profile.layers[k];
            const auto& Gm = profile.gammas[k];
            const double a2 = 2.0 * cfg.nu * double(k) + cfg.nu, b2 = 1.0 + cfg.nu;
            V += Tk[k] * L.values[i];
            Vy += Tk[k] * L.deriv1[i];
            Vyy += Tk[k] * L.deriv2[i];
            G += Tk[k] * Gm.values[i];
            Gy += Tk[k] * Gm.deriv1[i];
            D += Tk[k] * (a2 * Gm.values[i] - b2 * y * Gm.deriv1[i]);
        }
        res[i] = (1.0 + Vy * Vy) * t2nu * D - (1.0 - t2nu * G * G) * Vyy -
                 2.0 * t2nu * Vy * G * Gy +
                 3.0 * (1.0 + Vy * Vy - t2nu * G * G) * (1.0 / V - Vy / y);
    }
    return res;
}

double inner_remainder(const InnerProfile& profile, double t) {
    const auto& grid = *profile.layers[0].grid;
    auto res = inner_residual_values(profile, t);
    for (std::size_t i = 0; i < res.size(); ++i) {
        const double y = grid[i];
        res[i] *= std::pow(1.0 + y * y, 0.75); // <y>^{3/2}
    }
    return radial_l2_norm(grid, res, grid[0], inner_boundary(profile.config, t));
}

} // namespace vmcf
