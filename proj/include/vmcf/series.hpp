#ifndef VMCF_SERIES_HPP
#define VMCF_SERIES_HPP

#include <cstddef>
#include <vector>

namespace vmcf {

/// Truncated power series sum_j c[j] x^j with fixed truncation degree.
/// Arithmetic drops everything beyond the shared degree.
struct Series {
    std::vector<double> c;

    Series() = default;
    Series(std::size_t degree, double c0) : c(degree + 1, 0.0) { c[0] = c0; }
    explicit Series(std::vector<double> coeffs) : c(std::move(coeffs)) {}

    std::size_t degree() const { return c.size() - 1; }
    double operator[](std::size_t j) const { return j < c.size() ? c[j] : 0.0; }

    double eval(double x) const;
    double eval_deriv(double x) const;
};

Series operator+(const Series& a, const Series& b);
Series operator-(const Series& a, const Series& b);
Series operator*(const Series& a, const Series& b);
Series operator*(double s, const Series& a);
Series derivative(const Series& a);
Series reciprocal(const Series& a);        // 1/a, needs a[0] != 0
Series series_sqrt(const Series& a);       // sqrt(a), needs a[0] > 0
Series antiderivative(const Series& a);    // int_0^x a, constant term 0

} // namespace vmcf

#endif
