#include "vmcf/ode.hpp"
#include "vmcf/error.hpp"

#include <algorithm>
#include <cmath>

namespace vmcf {

namespace {

void rk4_step(const OdeRhs& rhs, double x, std::span<const double> y, double h,
              std::vector<double>& out,
              std::vector<double>& k1, std::vector<double>& k2,
              std::vector<double>& k3, std::vector<double>& k4,
              std::vector<double>& tmp) {
    const std::size_t n = y.size();
    rhs(x, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(x + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(x + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(x + h, tmp, k4);
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

struct Stepper {
    const OdeRhs& rhs;
    double span_len;
    double tol;
    double max_err = 0.0;
    std::vector<double> k1, k2, k3, k4, tmp, big, half, full;

    explicit Stepper(const OdeRhs& r, double len, double tol_, std::size_t n)
        : rhs(r), span_len(len), tol(tol_),
          k1(n), k2(n), k3(n), k4(n), tmp(n), big(n), half(n), full(n) {}

    // Advances y from x by at most h_try; returns the step actually taken and
    // updates the step-size suggestion.
    double advance(double& x, std::vector<double>& y, double h_try, double& h_next) {
        double h = h_try;
        const double dir = (h > 0) ? 1.0 : -1.0;
        for (int attempt = 0; attempt < 60; ++attempt) {
            rk4_step(rhs, x, y, h, big, k1, k2, k3, k4, tmp);
            rk4_step(rhs, x, y, 0.5 * h, half, k1, k2, k3, k4, tmp);
            rk4_step(rhs, x + 0.5 * h, half, 0.5 * h, full, k1, k2, k3, k4, tmp);
            double err = 0.0, scale = 1.0;
            bool finite = true;
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (!std::isfinite(full[i]) || !std::isfinite(big[i])) { finite = false; break; }
                err = std::max(err, std::abs(full[i] - big[i]) / 15.0);
                scale = std::max(scale, std::abs(full[i]));
            }
            const double budget = tol * scale * std::max(std::abs(h) / span_len, 1e-3);
            if (finite && err <= budget) {
                // 5th-order local Richardson update
                for (std::size_t i = 0; i < y.size(); ++i)
                    y[i] = full[i] + (full[i] - big[i]) / 15.0;
                x += h;
                max_err = std::max(max_err, err);
                const double grow = (err > 0) ? 0.9 * std::pow(budget / err, 0.2) : 4.0;
                h_next = h * std::clamp(grow, 0.5, 4.0);
                return h;
            }
            const double shrink = finite ? std::clamp(0.9 * std::pow(budget / (err + 1e-300), 0.25), 0.1, 0.7)
                                         : 0.25;
            h *= shrink;
            if (std::abs(h) < 1e-14 * span_len)
                throw StepUnderflow("step controller cannot meet tolerance");
            (void)dir;
        }
        throw StepUnderflow("too many step rejections");
    }
};

} // namespace

IvpSolution integrate_ivp(const OdeRhs& rhs, std::vector<double> y0,
                          double a, double b, double tol) {
    if (!(tol > 0)) throw Error("tolerance must be positive");
    for (double v : y0)
        if (!std::isfinite(v)) throw NonFinite("initial state not finite");
    IvpSolution sol;
    sol.xs.push_back(a);
    sol.ys.push_back(y0);
    if (a == b) return sol;
    const double len = std::abs(b - a);
    Stepper st(rhs, len, tol, y0.size());
    double x = a;
    double h = (b - a) / 64.0;
    std::vector<double> y = std::move(y0);
    while ((b - x) * (b > a ? 1.0 : -1.0) > 1e-14 * len) {
        if ((b > a && x + h > b) || (b < a && x + h < b)) h = b - x;
        double h_next = h;
        st.advance(x, y, h, h_next);
        for (double v : y)
            if (!std::isfinite(v)) throw NonFinite("state left the finite range");
        sol.xs.push_back(x);
        sol.ys.push_back(y);
        h = h_next;
    }
    sol.max_step_error = st.max_err;
    return sol;
}

std::vector<std::vector<double>> integrate_to_nodes(const OdeRhs& rhs,
                                                    std::vector<double> y0,
                                                    std::span<const double> nodes,
                                                    double tol) {
    if (nodes.size() < 2) throw TooFewNodes("need at least two nodes");
    std::vector<std::vector<double>> out;
    out.reserve(nodes.size());
    out.push_back(y0);
    const double len = std::abs(nodes.back() - nodes.front());
    Stepper st(rhs, len, tol, y0.size());
    std::vector<double> y = std::move(y0);
    double x = nodes.front();
    double h = (nodes[1] - nodes[0]);
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        const double target = nodes[k];
        while (std::abs(target - x) > 1e-14 * std::max(1.0, std::abs(target))) {
            double step = h;
            if ((target > x && x + step > target) || (target < x && x + step < target))
                step = target - x;
            double h_next = h;
            st.advance(x, y, step, h_next);
            h = h_next;
        }
        x = target;
        out.push_back(y);
    }
    return out;
}

} // namespace vmcf
