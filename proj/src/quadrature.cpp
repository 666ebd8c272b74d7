#include "vmcf/quadrature.hpp"
#include "vmcf/error.hpp"
#include "vmcf/ode.hpp"

#include <cmath>

namespace vmcf {

namespace {
// 7-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr double gx[7] = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
constexpr double gw[7] = {
    0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
    0.4179591836734694,
    0.3818300505051189, 0.2797053914892766, 0.1294849661688697};
} // namespace

double gauss7(const Integrand& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 7; ++i) s += gw[i] * f(c + h * gx[i]);
    return s * h;
}

std::vector<double> cumulative_integral(const RadialGrid& g, const Integrand& f,
                                        double anchor) {
    const std::size_t n = g.size();
    std::vector<double> out(n, 0.0);
    // accumulate outward from the anchor on each side; summing from a grid
    // end instead would cancel two huge prefix values for kernels that blow
    // up there
    if (anchor <= g[0]) {
        double acc = gauss7(f, anchor, g[0]);
        out[0] = acc;
        for (std::size_t i = 1; i < n; ++i) {
            acc += gauss7(f, g[i - 1], g[i]);
            out[i] = acc;
        }
        return out;
    }
    if (anchor >= g[n - 1]) {
        double acc = -gauss7(f, g[n - 1], anchor);
        out[n - 1] = acc;
        for (std::size_t i = n - 1; i-- > 0;) {
            acc -= gauss7(f, g[i], g[i + 1]);
            out[i] = acc;
        }
        return out;
    }
    const std::size_t k = g.interval_of(anchor);
    {
        double acc = gauss7(f, anchor, g[k + 1]);
        out[k + 1] = acc;
        for (std::size_t i = k + 2; i < n; ++i) {
            acc += gauss7(f, g[i - 1], g[i]);
            out[i] = acc;
        }
    }
    {
        double acc = -gauss7(f, g[k], anchor);
        out[k] = acc;
        for (std::size_t i = k; i-- > 0;) {
            acc -= gauss7(f, g[i], g[i + 1]);
            out[i] = acc;
        }
    }
    return out;
}

double nested_quadrature(const Integrand& inner, const OuterIntegrand& outer,
                         double a, double b, double tol,
                         std::optional<double> inner_power_hint,
                         std::optional<double> outer_power_hint) {
    if (!(tol > 0)) throw Error("tolerance must be positive");
    const double len = std::abs(b - a);
    double x0 = a, I0 = 0.0, J0 = 0.0;

    // Probe the left endpoint; a divergence without a power hint is an error,
    // with a hint the first sliver is summed from the leading power law.
    const double eps1 = 1e-7 * len, eps2 = 2e-7 * len;
    const double fi1 = inner(a + eps1), fi2 = inner(a + eps2);
    auto diverges = [](double v1, double v2) {
        if (!std::isfinite(v1) || !std::isfinite(v2)) return true;
        // still growing visibly at 1e-7 of the span: treat as divergent
        return std::abs(v1) > 1.3 * std::abs(v2) + 1.0 && std::abs(v1) > 1e4;
    };
    const double pin = inner_power_hint.value_or(0.0);
    if (!inner_power_hint && diverges(fi1, fi2))
        throw SingularEndpoint("inner integrand diverges at the left endpoint; declare a power hint");
    if (inner_power_hint || outer_power_hint) {
        const double h0 = 1e-5 * len;
        x0 = a + h0;
        if (pin <= -1.0) throw SingularEndpoint("inner power hint not integrable");
        // inner ~ C (x-a)^pin near a
        const double Ci = inner(x0) / std::pow(h0, pin);
        I0 = Ci * std::pow(h0, pin + 1.0) / (pin + 1.0);
        const double pout = outer_power_hint.value_or(0.0);
        if (pout <= -1.0) throw SingularEndpoint("outer power hint not integrable");
        const double Co = outer(x0, I0) / std::pow(h0, pout);
        J0 = Co * std::pow(h0, pout + 1.0) / (pout + 1.0);
    } else {
        const double fo1 = outer(a + eps1, fi1 * eps1), fo2 = outer(a + eps2, fi2 * eps2);
        if (diverges(fo1, fo2))
            throw SingularEndpoint("outer integrand diverges at the left endpoint; declare a power hint");
        // start a sliver off the endpoint so kernels of the form
        // (1/r^k) * I(r) never see r = a exactly
        const double h0 = 1e-9 * len;
        x0 = a + h0;
        I0 = inner(a + 0.5 * h0) * h0;
        J0 = outer(a + 0.5 * h0, 0.5 * I0) * h0;
    }

    OdeRhs rhs = [&](double x, std::span<const double> y, std::span<double> d) {
        d[0] = inner(x);
        d[1] = outer(x, y[0]);
    };
    auto sol = integrate_ivp(rhs, {I0, J0}, x0, b, tol);
    return sol.ys.back()[1];
}

} // namespace vmcf
