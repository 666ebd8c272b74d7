#include "vmcf/series.hpp"
#include "vmcf/error.hpp"

#include <algorithm>
#include <cmath>

namespace vmcf {

double Series::eval(double x) const {
    double r = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) r = r * x + c[j];
    return r;
}

double Series::eval_deriv(double x) const {
    double r = 0.0;
    for (std::size_t j = c.size(); j-- > 1;) r = r * x + double(j) * c[j];
    return r;
}

static std::size_t common_deg(const Series& a, const Series& b) {
    return std::max(a.c.size(), b.c.size()) - 1;
}

Series operator+(const Series& a, const Series& b) {
    Series r(common_deg(a, b), 0.0);
    for (std::size_t j = 0; j < r.c.size(); ++j) r.c[j] = a[j] + b[j];
    return r;
}

Series operator-(const Series& a, const Series& b) {
    Series r(common_deg(a, b), 0.0);
    for (std::size_t j = 0; j < r.c.size(); ++j) r.c[j] = a[j] - b[j];
    return r;
}

Series operator*(const Series& a, const Series& b) {
    Series r(common_deg(a, b), 0.0);
    for (std::size_t i = 0; i < r.c.size(); ++i)
        for (std::size_t j = 0; i + j < r.c.size(); ++j)
            if (i < a.c.size() && j < b.c.size()) r.c[i + j] += a.c[i] * b.c[j];
    return r;
}

Series operator*(double s, const Series& a) {
    Series r = a;
    for (double& x : r.c) x *= s;
    return r;
}

Series derivative(const Series& a) {
    Series r(a.degree(), 0.0);
    for (std::size_t j = 1; j < a.c.size(); ++j) r.c[j - 1] = double(j) * a.c[j];
    return r;
}

Series reciprocal(const Series& a) {
    if (a[0] == 0.0) throw Error("series reciprocal needs nonzero constant term");
    Series r(a.degree(), 0.0);
    r.c[0] = 1.0 / a[0];
    for (std::size_t n = 1; n <= r.degree(); ++n) {
        double s = 0.0;
        for (std::size_t j = 1; j <= n; ++j) s += a[j] * r.c[n - j];
        r.c[n] = -s / a[0];
    }
    return r;
}

Series series_sqrt(const Series& a) {
    if (!(a[0] > 0.0)) throw Error("series sqrt needs positive constant term");
    Series r(a.degree(), 0.0);
    r.c[0] = std::sqrt(a[0]);
    for (std::size_t n = 1; n <= r.degree(); ++n) {
        double s = 0.0;
        for (std::size_t j = 1; j < n; ++j) s += r.c[j] * r.c[n - j];
        r.c[n] = (a[n] - s) / (2.0 * r.c[0]);
    }
    return r;
}

Series antiderivative(const Series& a) {
    Series r(a.degree(), 0.0);
    for (std::size_t j = 0; j + 1 <= r.degree(); ++j) r.c[j + 1] = a[j] / double(j + 1);
    return r;
}

} // namespace vmcf
