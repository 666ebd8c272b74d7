#include "vmcf/ground_state.hpp"
#include "vmcf/derivative.hpp"
#include "vmcf/error.hpp"
#include "vmcf/ode.hpp"

#include <cmath>

namespace vmcf {

double q_second_derivative(double rho, double q, double qp) {
    return 3.0 * (1.0 + qp * qp) * (1.0 / q - qp / rho);
}

double q_third_derivative(double rho, double q, double qp, double qpp) {
    const double bracket = 1.0 / q - qp / rho;
    return 6.0 * qp * qpp * bracket +
           3.0 * (1.0 + qp * qp) * (-qp / (q * q) - qpp / rho + qp / (rho * rho));
}

std::vector<double> taylor_seed(int order) {
    if (order < 2 || order > 12) throw Error("taylor_seed order must be in [2, 12]");
    const std::size_t deg = std::size_t(order);
    std::vector<double> gamma(deg + 1, 0.0);
    gamma[0] = 1.0;

    // Residual series of rho Q Q'' - 3 (1 + Q'^2)(rho - Q Q'); its
    // coefficient at rho^{2n-1} is linear in gamma_{2n}, so each order is a
    // scalar solve.
    auto residual = [&](const std::vector<double>& gcoef) {
        Series Q(deg + 2, 0.0);
        for (std::size_t j = 0; j < gcoef.size(); ++j) Q.c[j] = gcoef[j];
        Series Qp = derivative(Q);
        Series Qpp = derivative(Qp);
        Series rho(deg + 2, 0.0);
        rho.c[1] = 1.0;
        Series one(deg + 2, 1.0);
        return rho * Q * Qpp - 3.0 * ((one + Qp * Qp) * (rho - Q * Qp));
    };

    for (std::size_t n = 1; 2 * n <= deg; ++n) {
        const std::size_t slot = 2 * n, row = 2 * n - 1;
        gamma[slot] = 0.0;
        const double r0 = residual(gamma)[row];
        gamma[slot] = 1.0;
        const double r1 = residual(gamma)[row];
        gamma[slot] = -r0 / (r1 - r0);
    }
    return gamma;
}

GroundState solve_ground_state(double rho_max, double tol, std::size_t n) {
    if (rho_max < 20.0) throw Error("rho_max must be at least 20");
    return solve_ground_state_on(make_profile_grid(1e-3, rho_max, n), tol);
}

GroundState solve_ground_state_on(GridPtr grid, double tol) {
    GroundState gs;
    gs.taylor = taylor_seed(8);
    gs.rho_max = grid->max();
    gs.ode_tol = tol;

    Series seed(gs.taylor);
    const double rho0 = grid->origin_cutoff();

    OdeRhs rhs = [](double rho, std::span<const double> y, std::span<double> d) {
        d[0] = y[1];
        d[1] = q_second_derivative(rho, y[0], y[1]);
    };
    auto states = integrate_to_nodes(rhs, {seed.eval(rho0), seed.eval_deriv(rho0)},
                                     grid->nodes, tol);

    gs.curve.grid = grid;
    gs.curve.values.resize(grid->size());
    gs.curve.deriv1.resize(grid->size());
    gs.curve.deriv2.resize(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) {
        gs.curve.values[i] = states[i][0];
        gs.curve.deriv1[i] = states[i][1];
        gs.curve.deriv2[i] = q_second_derivative((*grid)[i], states[i][0], states[i][1]);
    }
    gs.curve.validate();
    gs.check_invariants();

    if (gs.rho_max >= 40.0) gs.tail = fit_ground_tail(gs);
    return gs;
}

void GroundState::check_invariants() const {
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (!(curve.values[i] > (*curve.grid)[i]))
            throw InvariantViolation("Q <= rho at a node (integration failure)");
        if (!(curve.deriv2[i] > 0.0))
            throw InvariantViolation("Q'' <= 0 at a node (integration failure)");
    }
}

TailFit fit_ground_tail(const GroundState& gs) {
    return fit_ground_tail(gs, gs.rho_max / 2.0, gs.rho_max);
}

TailFit fit_ground_tail(const GroundState& gs, double lo, double hi) {
    SampledCurve diff = gs.curve;
    for (std::size_t i = 0; i < diff.size(); ++i) diff.values[i] -= (*diff.grid)[i];
    const std::vector<TailTerm> basis = {{-2, 0}, {-3, 0}, {-4, 0}, {-5, 0}};
    return fit_tail(diff, basis, lo, hi);
}

double GroundState::eval(double rho) const {
    const auto& g = *curve.grid;
    if (rho < g[0]) {
        Series seed(taylor);
        return seed.eval(rho);
    }
    if (rho > g.max()) return rho + tail.eval(rho);
    return curve_eval(curve, rho);
}

double GroundState::eval_deriv(double rho) const {
    const auto& g = *curve.grid;
    if (rho < g[0]) {
        Series seed(taylor);
        return seed.eval_deriv(rho);
    }
    if (rho > g.max()) {
        double s = 1.0;
        const double lr = std::log(rho);
        for (std::size_t j = 0; j < tail.basis.size(); ++j) {
            const auto& t = tail.basis[j];
            s += tail.coefficients[j] * t.power * std::pow(rho, t.power - 1.0) *
                 std::pow(lr, t.log_power);
            if (t.log_power > 0)
                s += tail.coefficients[j] * t.log_power * std::pow(rho, t.power - 1.0) *
                     std::pow(lr, t.log_power - 1);
        }
        return s;
    }
    // Q' interpolated from its own (deriv1, deriv2) tables: one order better
    // than differentiating the value interpolant
    return hermite_eval(*curve.grid, curve.deriv1, curve.deriv2, rho);
}

SampledCurve GroundState::lambda_q() const {
    SampledCurve lq(curve.grid);
    lq.deriv1.resize(lq.size());
    lq.deriv2.resize(lq.size());
    for (std::size_t i = 0; i < lq.size(); ++i) {
        const double rho = (*curve.grid)[i];
        const double q = curve.values[i], qp = curve.deriv1[i], qpp = curve.deriv2[i];
        lq.values[i] = q - rho * qp;
        lq.deriv1[i] = -rho * qpp;
        lq.deriv2[i] = -qpp - rho * q_third_derivative(rho, q, qp, qpp);
    }
    return lq;
}

double ode_residual_max(const GroundState& gs) {
    auto d1 = differentiate_values(*gs.curve.grid, gs.curve.values, 1);
    auto d2 = differentiate_values(*gs.curve.grid, gs.curve.values, 2);
    double worst = 0.0;
    for (std::size_t i = 0; i < gs.curve.size(); ++i) {
        const double rho = (*gs.curve.grid)[i];
        const double r = -d2[i] + 3.0 * (1.0 + d1[i] * d1[i]) *
                                      (1.0 / gs.curve.values[i] - d1[i] / rho);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

} // namespace vmcf
