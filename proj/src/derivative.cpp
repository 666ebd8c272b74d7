#include "vmcf/derivative.hpp"
#include "vmcf/error.hpp"

#include <algorithm>

namespace vmcf {

// Fornberg's recursion, Math. Comp. 51 (1988).
std::vector<double> fd_weights(double x0, std::span<const double> nodes, int m) {
    const int n = int(nodes.size());
    std::vector<double> C(std::size_t(n) * std::size_t(m + 1), 0.0);
    auto at = [&](int i, int k) -> double& { return C[std::size_t(i) * std::size_t(m + 1) + std::size_t(k)]; };
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    at(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[std::size_t(i)] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[std::size_t(i)] - nodes[std::size_t(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    at(i, k) = c1 * (double(k) * at(i - 1, k - 1) - c5 * at(i - 1, k)) / c2;
                at(i, 0) = -c1 * c5 * at(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                at(j, k) = (c4 * at(j, k) - double(k) * at(j, k - 1)) / c3;
            at(j, 0) = c4 * at(j, 0) / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) w[std::size_t(i)] = at(i, m);
    return w;
}

std::vector<double> differentiate_values(const RadialGrid& g,
                                         const std::vector<double>& f, int order) {
    if (order != 1 && order != 2) throw Error("derivative order must be 1 or 2");
    const std::size_t n = g.size();
    if (n < 5) throw TooFewNodes("differentiation needs at least 5 nodes");
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = (i < 2) ? 0 : i - 2;
        if (lo + 5 > n) lo = n - 5;
        auto w = fd_weights(g[i], std::span<const double>(&g.nodes[lo], 5), order);
        double s = 0.0;
        for (std::size_t j = 0; j < 5; ++j) s += w[j] * f[lo + j];
        out[i] = s;
    }
    return out;
}

SampledCurve differentiate_grid(const SampledCurve& curve, int order) {
    SampledCurve out(curve.grid);
    out.values = differentiate_values(*curve.grid, curve.values, order);
    return out;
}

} // namespace vmcf
