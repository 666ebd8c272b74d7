#include "vmcf/fit.hpp"
#include "vmcf/error.hpp"

#include <algorithm>
#include <cmath>

namespace vmcf {

double TailFit::coefficient(double power, int log_power) const {
    for (std::size_t j = 0; j < basis.size(); ++j)
        if (std::abs(basis[j].power - power) < 1e-12 && basis[j].log_power == log_power)
            return coefficients[j];
    throw MissingTailCoefficient("no such basis slot in fit");
}

double TailFit::uncertainty(double power, int log_power) const {
    for (std::size_t j = 0; j < basis.size(); ++j)
        if (std::abs(basis[j].power - power) < 1e-12 && basis[j].log_power == log_power)
            return j < sigma.size() ? sigma[j] : 0.0;
    throw MissingTailCoefficient("no such basis slot in fit");
}

double TailFit::eval(double rho) const {
    double s = 0.0;
    const double lr = std::log(rho);
    for (std::size_t j = 0; j < basis.size(); ++j)
        s += coefficients[j] * std::pow(rho, basis[j].power) * std::pow(lr, basis[j].log_power);
    return s;
}

std::vector<double> lstsq(const std::vector<std::vector<double>>& A_in,
                          const std::vector<double>& b_in, double* cond_estimate,
                          std::vector<double>* sigma) {
    const std::size_t m = A_in.size();
    const std::size_t n = m ? A_in[0].size() : 0;
    if (m < n || n == 0) throw Error("least squares needs m >= n >= 1");
    std::vector<std::vector<double>> A = A_in;
    std::vector<double> b = b_in;

    // column scaling
    std::vector<double> colscale(n, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += A[i][j] * A[i][j];
        colscale[j] = (s > 0) ? std::sqrt(s) : 1.0;
        for (std::size_t i = 0; i < m; ++i) A[i][j] /= colscale[j];
    }

    // Householder QR (JAMA convention: rdiag holds -nrm)
    std::vector<double> rdiag(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double nrm = 0.0;
        for (std::size_t i = k; i < m; ++i) nrm += A[i][k] * A[i][k];
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) { rdiag[k] = 0.0; continue; }
        if (A[k][k] < 0) nrm = -nrm;
        for (std::size_t i = k; i < m; ++i) A[i][k] /= nrm;
        A[k][k] += 1.0;
        for (std::size_t j = k + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += A[i][k] * A[i][j];
            s = -s / A[k][k];
            for (std::size_t i = k; i < m; ++i) A[i][j] += s * A[i][k];
        }
        double s = 0.0;
        for (std::size_t i = k; i < m; ++i) s += A[i][k] * b[i];
        s = -s / A[k][k];
        for (std::size_t i = k; i < m; ++i) b[i] += s * A[i][k];
        rdiag[k] = -nrm;
    }

    double rmax = 0.0, rmin = 1e300;
    for (std::size_t k = 0; k < n; ++k) {
        rmax = std::max(rmax, std::abs(rdiag[k]));
        rmin = std::min(rmin, std::abs(rdiag[k]));
    }
    if (cond_estimate) *cond_estimate = (rmin > 0) ? rmax / rmin : 1e300;

    // back-substitution: x[k] = (y[k] - sum_{j>k} R_{kj} x[j]) / R_{kk};
    // the strictly-upper part of A holds R, the diagonal sits in rdiag
    std::vector<double> x(n, 0.0);
    std::vector<double> y(b.begin(), b.begin() + std::ptrdiff_t(n));
    for (std::size_t k = n; k-- > 0;) {
        if (rdiag[k] == 0.0) { x[k] = 0.0; continue; }
        x[k] = y[k] / rdiag[k];
        for (std::size_t i = 0; i < k; ++i) y[i] -= x[k] * A[i][k];
    }
    for (std::size_t j = 0; j < n; ++j) x[j] /= colscale[j];

    if (sigma) {
        // rms of the unexplained part of b
        double ss = 0.0;
        for (std::size_t i = n; i < m; ++i) ss += b[i] * b[i];
        const double s = (m > n) ? std::sqrt(ss / double(m - n)) : 0.0;
        // diag of (A^T A)^{-1} = row norms of R^{-T}: forward-solve R^T v = e_j
        sigma->assign(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> v(n, 0.0);
            for (std::size_t i = j; i < n; ++i) {
                double acc = (i == j) ? 1.0 : 0.0;
                for (std::size_t l = j; l < i; ++l) acc -= (l < i ? A[l][i] : 0.0) * v[l];
                v[i] = (rdiag[i] != 0.0) ? acc / rdiag[i] : 0.0;
            }
            double nrm = 0.0;
            for (double w : v) nrm += w * w;
            (*sigma)[j] = s * std::sqrt(nrm) / colscale[j];
        }
    }
    return x;
}

TailFit fit_tail(const SampledCurve& curve, const std::vector<TailTerm>& basis,
                 double window_lo, double window_hi, double cond_bound) {
    const auto& g = *curve.grid;
    if (window_lo < g[0] || window_hi > g.max())
        throw Error("fit window outside sampled range");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g[i] >= window_lo && g[i] <= window_hi) idx.push_back(i);
    if (idx.size() < 4 * basis.size())
        throw TooFewNodes("fit window must contain at least 4x basis-size nodes");

    std::vector<std::vector<double>> A(idx.size(), std::vector<double>(basis.size()));
    std::vector<double> b(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const double rho = g[idx[r]], lr = std::log(rho);
        for (std::size_t j = 0; j < basis.size(); ++j)
            A[r][j] = std::pow(rho, basis[j].power) * std::pow(lr, basis[j].log_power);
        b[r] = curve.values[idx[r]];
    }
    double cond = 0.0;
    TailFit fit;
    fit.basis = basis;
    fit.coefficients = lstsq(A, b, &cond, &fit.sigma);
    if (cond > cond_bound) throw IllConditioned("tail fit design matrix condition too large");
    fit.window_lo = window_lo;
    fit.window_hi = window_hi;

    double num = 0.0, den = 0.0;
    for (std::size_t r = 0; r < idx.size(); ++r) {
        double model = 0.0;
        for (std::size_t j = 0; j < basis.size(); ++j) model += A[r][j] * fit.coefficients[j];
        num += (b[r] - model) * (b[r] - model);
        den += b[r] * b[r];
    }
    fit.residual = std::sqrt(num / std::max(den, 1e-300));
    return fit;
}

double loglog_slope(const SampledCurve& curve, double lo, double hi) {
    const auto& g = *curve.grid;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] < lo || g[i] > hi) continue;
        const double v = std::abs(curve.values[i]);
        if (v < 1e-300) continue;
        const double x = std::log(g[i]), y = std::log(v);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    if (n < 3) throw TooFewNodes("slope fit needs at least 3 usable nodes");
    const double d = double(n) * sxx - sx * sx;
    return (double(n) * sxy - sx * sy) / d;
}

double power_fit_exponent(const std::vector<std::pair<double, double>>& xy) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    if (xy.size() < 2) throw TooFewNodes("need at least two samples");
    for (auto [x, y] : xy) {
        const double lx = std::log(x), ly = std::log(std::max(y, 1e-300));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    const double n = double(xy.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace vmcf
