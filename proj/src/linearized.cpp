#include "vmcf/linearized.hpp"
#include "vmcf/derivative.hpp"
#include "vmcf/error.hpp"
#include "vmcf/quadrature.hpp"

#include <cmath>
#include <random>

namespace vmcf {

LinearizedOperator::LinearizedOperator(const GroundState& ground) : gs(&ground) {
    const auto& c = ground.curve;
    B0 = SampledCurve(c.grid);
    B1 = SampledCurve(c.grid);
    B0.deriv1.resize(c.size());
    B1.deriv1.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double y = (*c.grid)[i];
        const double q = c.values[i], qp = c.deriv1[i], qpp = c.deriv2[i];
        B1.values[i] = 9.0 * qp * qp / y - 6.0 * qp / q;
        B0.values[i] = 3.0 * (1.0 + qp * qp) / (q * q);
        B1.deriv1[i] = 9.0 * (2.0 * qp * qpp * y - qp * qp) / (y * y) -
                       6.0 * (qpp * q - qp * qp) / (q * q);
        B0.deriv1[i] = 6.0 * qp * (qpp * q - (1.0 + qp * qp)) / (q * q * q);
    }
}

SampledCurve LinearizedOperator::apply_L(const SampledCurve& f) const {
    require_same_grid(f, B0);
    std::vector<double> d1 = f.has_deriv1() ? f.deriv1
                                            : differentiate_values(*f.grid, f.values, 1);
    std::vector<double> d2 = f.has_deriv2() ? f.deriv2
                                            : differentiate_values(*f.grid, f.values, 2);
    SampledCurve out(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double y = (*f.grid)[i];
        out.values[i] = d2[i] + (3.0 / y + B1.values[i]) * d1[i] + B0.values[i] * f.values[i];
    }
    return out;
}

namespace {

// kernel weights evaluated pointwise from the smooth profile interpolant:
// w_in(s) = Q^3 s^3 LQ / (1+Q'^2)^{3/2}, w_out = (1+Q'^2)^{3/2}/(Q^3 r^3 LQ^2)
struct KernelEval {
    const GroundState* gs;
    double win(double s) const {
        const double q = gs->eval(s), qp = gs->eval_deriv(s);
        const double lq = q - s * qp;
        return q * q * q * s * s * s * lq / std::pow(1.0 + qp * qp, 1.5);
    }
    double wout(double r) const {
        const double q = gs->eval(r), qp = gs->eval_deriv(r);
        const double lq = q - r * qp;
        return std::pow(1.0 + qp * qp, 1.5) / (q * q * q * r * r * r * lq * lq);
    }
};

} // namespace

std::pair<SampledCurve, SampledCurve> LinearizedOperator::homogeneous_basis() const {
    const auto& c = gs->curve;
    SampledCurve e1 = gs->lambda_q();
    KernelEval k{gs};
    auto integrand = [&](double r) { return k.wout(r); };
    auto I = cumulative_integral(*c.grid, integrand, 1.0);
    SampledCurve e2(c.grid);
    e2.deriv1.resize(c.size());
    e2.deriv2.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double y = (*c.grid)[i];
        e2.values[i] = e1.values[i] * I[i];
        e2.deriv1[i] = e1.deriv1[i] * I[i] + e1.values[i] * k.wout(y);
        e2.deriv2[i] = -(3.0 / y + B1.values[i]) * e2.deriv1[i] - B0.values[i] * e2.values[i];
    }
    return {std::move(e1), std::move(e2)};
}

SampledCurve LinearizedOperator::duhamel_solve(const SampledCurve& g,
                                               double origin_power) const {
    require_same_grid(g, B0);
    if (origin_power < 0.0)
        throw SingularEndpoint("source must stay bounded at the origin");
    const auto& grid = *g.grid;
    KernelEval k{gs};

    SampledCurve gi = g;
    if (!gi.has_deriv1()) gi.deriv1 = differentiate_values(grid, gi.values, 1);

    const double rho0 = grid.origin_cutoff();
    const double p = origin_power;
    const double g0 = g.values[0];
    // series start over [0, rho0]: kernels behave like s^3 there
    double I = g0 * std::pow(rho0, 4.0) / (4.0 + p);
    double J = g0 * rho0 * rho0 / ((4.0 + p) * (2.0 + p));

    const std::size_t n = grid.size();
    std::vector<double> Iv(n), Jv(n);
    Iv[0] = I;
    Jv[0] = J;
    // dI/dx = win(x) g(x), dJ/dx = wout(x) I; fixed substeps keep the sweep
    // exactly linear in g
    auto dI = [&](double x) { return k.win(x) * curve_eval(gi, x); };
    auto dJ = [&](double x, double Icur) { return k.wout(x) * Icur; };
    for (std::size_t i = 1; i < n; ++i) {
        double x = grid[i - 1];
        const double h = (grid[i] - grid[i - 1]) / 2.0; // two RK4 substeps
        for (int s = 0; s < 2; ++s) {
            const double I1 = dI(x), J1 = dJ(x, I);
            const double I2 = dI(x + h / 2), J2 = dJ(x + h / 2, I + h / 2 * I1);
            const double I3 = I2, J3 = dJ(x + h / 2, I + h / 2 * I2);
            const double I4 = dI(x + h), J4 = dJ(x + h, I + h * I3);
            J += h / 6.0 * (J1 + 2 * J2 + 2 * J3 + J4);
            I += h / 6.0 * (I1 + 2 * I2 + 2 * I3 + I4);
            x += h;
        }
        Iv[i] = I;
        Jv[i] = J;
    }

    // variation of parameters: f = (Lambda Q)(y) int_0^y wout int_0^r win g;
    // checked against the origin series f ~ g(0) y^2 / 8 (the printed closed
    // form carries a stray minus sign)
    SampledCurve f(g.grid);
    f.deriv1.resize(n);
    f.deriv2.resize(n);
    SampledCurve lq = gs->lambda_q();
    for (std::size_t i = 0; i < n; ++i) {
        const double y = grid[i];
        f.values[i] = lq.values[i] * Jv[i];
        f.deriv1[i] = lq.deriv1[i] * Jv[i] + lq.values[i] * k.wout(y) * Iv[i];
        f.deriv2[i] = g.values[i] - (3.0 / y + B1.values[i]) * f.deriv1[i] -
                      B0.values[i] * f.values[i];
    }
    return f;
}

SpectralForm::SpectralForm(const GroundState& ground) : gs(&ground) {
    const auto& c = ground.curve;
    const std::size_t n = c.size();
    H = SampledCurve(c.grid);
    q = SampledCurve(c.grid);
    potential = SampledCurve(c.grid);
    zero_mode = SampledCurve(c.grid);
    H.deriv1.resize(n);
    H.deriv2.resize(n);
    q.deriv1.resize(n);
    q.deriv2.resize(n);
    zero_mode.deriv1.resize(n);

    LinearizedOperator lin(ground);
    SampledCurve lq = ground.lambda_q();

    for (std::size_t i = 0; i < n; ++i) {
        const double rho = (*c.grid)[i];
        const double Q = c.values[i], Qp = c.deriv1[i], Qpp = c.deriv2[i];
        const double Qppp = q_third_derivative(rho, Q, Qp, Qpp);
        const double A = 1.0 + Qp * Qp;
        const double Ap = 2.0 * Qp * Qpp;
        const double App = 2.0 * Qpp * Qpp + 2.0 * Qp * Qppp;

        q.values[i] = 1.0 / std::sqrt(A);
        q.deriv1[i] = -0.5 * Ap / std::pow(A, 1.5);
        q.deriv2[i] = -0.5 * App / std::pow(A, 1.5) + 0.75 * Ap * Ap / std::pow(A, 2.5);

        const double h = std::pow(A, 0.25) / std::pow(Q, 1.5);
        const double hln = 0.25 * Ap / A - 1.5 * Qp / Q;
        const double hln_p = 0.25 * (App / A - Ap * Ap / (A * A)) -
                             1.5 * (Qpp / Q - Qp * Qp / (Q * Q));
        H.values[i] = h;
        H.deriv1[i] = h * hln;
        H.deriv2[i] = h * (hln * hln + hln_p);

        // L H with the analytic tables, then P = q Delta q - (L H)/(H A)
        const double LH = H.deriv2[i] + (3.0 / rho + lin.B1.values[i]) * H.deriv1[i] +
                          lin.B0.values[i] * h;
        const double laplacian_q = q.deriv2[i] + 3.0 * q.deriv1[i] / rho;
        potential.values[i] = q.values[i] * laplacian_q - LH / (h * A);

        zero_mode.values[i] = lq.values[i] / h;
        zero_mode.deriv1[i] = (lq.deriv1[i] * h - lq.values[i] * H.deriv1[i]) / (h * h);
    }
}

SampledCurve SpectralForm::potential_closed_form() const {
    const auto& c = gs->curve;
    LinearizedOperator lin(*gs);
    SampledCurve out(c.grid);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double rho = (*c.grid)[i];
        const double Q = c.values[i], Qp = c.deriv1[i];
        const double A = 1.0 + Qp * Qp;
        const double b1 = lin.B1.values[i], b1p = lin.B1.deriv1[i];
        const double vflat = -3.0 * A / (Q * Q) + 0.5 * b1p - 0.25 * b1 * b1 -
                             1.5 * b1 * (-A / rho + 2.0 * Qp * (1.0 / Q - Qp / rho));
        out.values[i] = vflat / A;
    }
    return out;
}

SampledCurve SpectralForm::apply(const SampledCurve& f) const {
    require_same_grid(f, q);
    const auto& g = *f.grid;
    std::vector<double> qf(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) qf[i] = q.values[i] * f.values[i];
    auto d1 = differentiate_values(g, qf, 1);
    auto d2 = differentiate_values(g, qf, 2);
    SampledCurve out(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double rho = g[i];
        out.values[i] = -q.values[i] * (d2[i] + 3.0 * d1[i] / rho) +
                        potential.values[i] * f.values[i];
    }
    return out;
}

double SpectralForm::quadratic_form(const std::vector<double>& f,
                                    const std::vector<double>& fprime) const {
    const auto& g = *q.grid;
    std::vector<double> integrand(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double rho = g[i];
        const double qfp = q.deriv1[i] * f[i] + q.values[i] * fprime[i];
        integrand[i] = (qfp * qfp + potential.values[i] * f[i] * f[i]) * rho * rho * rho;
    }
    return grid_integral(g, integrand);
}

double SpectralForm::dirichlet_form(const std::vector<double>& fprime) const {
    const auto& g = *q.grid;
    std::vector<double> integrand(fprime.size());
    for (std::size_t i = 0; i < fprime.size(); ++i)
        integrand[i] = fprime[i] * fprime[i] * g[i] * g[i] * g[i];
    return grid_integral(g, integrand);
}

double SpectralForm::coercivity_check(int samples, std::uint64_t seed) const {
    if (samples < 1) throw Error("need at least one sample");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> center(0.5, 40.0);
    std::uniform_real_distribution<double> width(0.2, 5.0);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_int_distribution<int> nbumps(1, 3);

    const auto& g = *q.grid;
    double worst = 1e300;
    for (int s = 0; s < samples; ++s) {
        const int nb = nbumps(rng);
        std::vector<double> cs(nb), ws(nb), as(nb);
        for (int b = 0; b < nb; ++b) { cs[b] = center(rng); ws[b] = width(rng); as[b] = amp(rng); }
        std::vector<double> f(g.size()), fp(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            double v = 0.0, vp = 0.0;
            for (int b = 0; b < nb; ++b) {
                const double u = (g[i] - cs[b]) / ws[b];
                const double e = as[b] * std::exp(-u * u);
                v += e;
                vp += -2.0 * u / ws[b] * e;
            }
            f[i] = v;
            fp[i] = vp;
        }
        const double D = dirichlet_form(fp);
        if (D < 1e-12) continue; // essentially null sample
        worst = std::min(worst, quadratic_form(f, fp) / D);
    }
    return worst;
}

} // namespace vmcf
