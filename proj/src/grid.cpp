#include "vmcf/grid.hpp"
#include "vmcf/error.hpp"

#include <algorithm>
#include <cmath>

namespace vmcf {

void RadialGrid::validate() const {
    if (nodes.size() < 16) throw TooFewNodes("radial grid needs at least 16 nodes");
    if (nodes.front() <= 0.0) throw InvariantViolation("origin cutoff must be positive");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1]))
            throw InvariantViolation("grid nodes must increase strictly");
}

std::size_t RadialGrid::interval_of(double x) const {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    std::size_t i = (it == nodes.begin()) ? 0 : std::size_t(it - nodes.begin()) - 1;
    if (i + 1 >= nodes.size()) i = nodes.size() - 2;
    return i;
}

GridPtr make_uniform_grid(double a, double b, std::size_t n) {
    auto g = std::make_shared<RadialGrid>();
    g->policy = SpacingPolicy::Uniform;
    g->nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        g->nodes[i] = a + (b - a) * double(i) / double(n - 1);
    g->nodes.back() = b;
    g->validate();
    return g;
}

GridPtr make_geometric_grid(double a, double b, std::size_t n) {
    auto g = std::make_shared<RadialGrid>();
    g->policy = SpacingPolicy::Geometric;
    g->nodes.resize(n);
    const double la = std::log(a), lb = std::log(b);
    for (std::size_t i = 0; i < n; ++i)
        g->nodes[i] = std::exp(la + (lb - la) * double(i) / double(n - 1));
    g->nodes.front() = a;
    g->nodes.back() = b;
    g->validate();
    return g;
}

GridPtr make_profile_grid(double a, double b, std::size_t n, double h_min) {
    const double ratio = std::expm1(std::log(b / a) / double(n - 1));
    auto g = std::make_shared<RadialGrid>();
    g->policy = SpacingPolicy::Geometric;
    double x = a;
    g->nodes.push_back(x);
    while (x < b) {
        x += std::max(h_min, x * ratio);
        g->nodes.push_back(std::min(x, b));
    }
    if (g->nodes.back() != b) g->nodes.push_back(b);
    g->validate();
    return g;
}

GridPtr make_banded_grid(double a, double b, std::size_t n_geo,
                         double band_lo, double band_hi, std::size_t n_band) {
    std::vector<double> pts;
    pts.reserve(n_geo + n_band);
    const double la = std::log(a), lb = std::log(b);
    for (std::size_t i = 0; i < n_geo; ++i) {
        double x = std::exp(la + (lb - la) * double(i) / double(n_geo - 1));
        if (x < band_lo || x > band_hi) pts.push_back(x);
    }
    for (std::size_t i = 0; i < n_band; ++i)
        pts.push_back(band_lo + (band_hi - band_lo) * double(i) / double(n_band - 1));
    std::sort(pts.begin(), pts.end());
    // drop near-duplicates at the band seams
    std::vector<double> nodes;
    nodes.reserve(pts.size());
    for (double x : pts)
        if (nodes.empty() || x - nodes.back() > 1e-12 * std::max(1.0, std::abs(x)))
            nodes.push_back(x);
    auto g = std::make_shared<RadialGrid>();
    g->policy = SpacingPolicy::Composite;
    g->nodes = std::move(nodes);
    g->validate();
    return g;
}

void SampledCurve::validate() const {
    if (!grid || values.size() != grid->size())
        throw GridMismatch("curve values do not match grid");
    for (double v : values)
        if (!std::isfinite(v)) throw NonFinite("curve holds a non-finite value");
    if (!deriv1.empty() && deriv1.size() != values.size())
        throw GridMismatch("deriv1 length mismatch");
    if (!deriv2.empty() && deriv2.size() != values.size())
        throw GridMismatch("deriv2 length mismatch");
}

void require_same_grid(const SampledCurve& a, const SampledCurve& b) {
    if (a.grid == b.grid) return;
    if (!a.grid || !b.grid || a.grid->nodes != b.grid->nodes)
        throw GridMismatch("curves live on different grids");
}

double curve_eval(const SampledCurve& c, double x) {
    const auto& xs = c.grid->nodes;
    std::size_t i = c.grid->interval_of(x);
    const double x0 = xs[i], x1 = xs[i + 1], h = x1 - x0;
    const double s = (x - x0) / h;
    const double v0 = c.values[i], v1 = c.values[i + 1];
    if (!c.has_deriv1()) // linear fallback
        return v0 + s * (v1 - v0);
    const double d0 = c.deriv1[i] * h, d1 = c.deriv1[i + 1] * h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * v0 + (s3 - 2 * s2 + s) * d0 +
           (-2 * s3 + 3 * s2) * v1 + (s3 - s2) * d1;
}

double curve_eval_deriv(const SampledCurve& c, double x) {
    const auto& xs = c.grid->nodes;
    std::size_t i = c.grid->interval_of(x);
    const double x0 = xs[i], x1 = xs[i + 1], h = x1 - x0;
    const double s = (x - x0) / h;
    const double v0 = c.values[i], v1 = c.values[i + 1];
    if (!c.has_deriv1()) return (v1 - v0) / h;
    const double d0 = c.deriv1[i] * h, d1 = c.deriv1[i + 1] * h;
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * v0 + (3 * s2 - 4 * s + 1) * d0 +
            (-6 * s2 + 6 * s) * v1 + (3 * s2 - 2 * s) * d1) / h;
}

double hermite_eval(const RadialGrid& g, const std::vector<double>& vals,
                    const std::vector<double>& slopes, double x) {
    std::size_t i = g.interval_of(x);
    const double x0 = g[i], x1 = g[i + 1], h = x1 - x0;
    const double s = (x - x0) / h;
    const double v0 = vals[i], v1 = vals[i + 1];
    const double d0 = slopes[i] * h, d1 = slopes[i + 1] * h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * v0 + (s3 - 2 * s2 + s) * d0 +
           (-2 * s3 + 3 * s2) * v1 + (s3 - s2) * d1;
}

double hermite_eval_deriv(const RadialGrid& g, const std::vector<double>& vals,
                          const std::vector<double>& slopes, double x) {
    std::size_t i = g.interval_of(x);
    const double x0 = g[i], x1 = g[i + 1], h = x1 - x0;
    const double s = (x - x0) / h;
    const double v0 = vals[i], v1 = vals[i + 1];
    const double d0 = slopes[i] * h, d1 = slopes[i + 1] * h;
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * v0 + (3 * s2 - 4 * s + 1) * d0 +
            (-6 * s2 + 6 * s) * v1 + (3 * s2 - 2 * s) * d1) / h;
}

double grid_integral(const RadialGrid& g, const std::vector<double>& f) {
    double sum = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i)
        sum += 0.5 * (f[i] + f[i - 1]) * (g[i] - g[i - 1]);
    return sum;
}

double radial_l2_norm(const RadialGrid& g, const std::vector<double>& f,
                      double lo, double hi) {
    constexpr double two_pi_sq = 2.0 * 9.869604401089358; // 2 pi^2
    double sum = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double xa = g[i - 1], xb = g[i];
        if (xb < lo || xa > hi) continue;
        const double fa = f[i - 1] * f[i - 1] * xa * xa * xa;
        const double fb = f[i] * f[i] * xb * xb * xb;
        sum += 0.5 * (fa + fb) * (xb - xa);
    }
    return std::sqrt(two_pi_sq * sum);
}

} // namespace vmcf
