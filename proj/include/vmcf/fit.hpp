#ifndef VMCF_FIT_HPP
#define VMCF_FIT_HPP

#include "vmcf/grid.hpp"

#include <utility>
#include <vector>

namespace vmcf {

/// One tail basis element rho^power * (log rho)^log_power.
struct TailTerm {
    double power = 0.0;
    int log_power = 0;
};

struct TailFit {
    std::vector<TailTerm> basis;
    std::vector<double> coefficients;
    std::vector<double> sigma; // residual-propagated 1-sigma per coefficient
    double window_lo = 0.0, window_hi = 0.0;
    double residual = 0.0; // relative least-squares misfit on the window

    double coefficient(double power, int log_power = 0) const;
    double uncertainty(double power, int log_power = 0) const;
    double eval(double rho) const;
};

/// Least squares of curve values against the log-power basis on the window.
/// Throws IllConditioned when the column-scaled design matrix has a condition
/// estimate above cond_bound.
TailFit fit_tail(const SampledCurve& curve, const std::vector<TailTerm>& basis,
                 double window_lo, double window_hi, double cond_bound = 1e12);

/// General linear least squares min ||A x - b||_2 via Householder QR.
/// cond_estimate receives max|R_ii|/min|R_ii| of the column-scaled system;
/// sigma (when non-null) the usual residual-propagated coefficient
/// uncertainties sqrt(diag (A^T A)^{-1}) * rms residual.
std::vector<double> lstsq(const std::vector<std::vector<double>>& A,
                          const std::vector<double>& b, double* cond_estimate,
                          std::vector<double>* sigma = nullptr);

/// Slope of log|f| vs log rho on [lo, hi] (least squares).
double loglog_slope(const SampledCurve& curve, double lo, double hi);

/// Slope of log(y) vs log(x) for a small set of pairs (exponent regressions).
double power_fit_exponent(const std::vector<std::pair<double, double>>& xy);

} // namespace vmcf

#endif
