#ifndef VMCF_IO_HPP
#define VMCF_IO_HPP

#include "vmcf/grid.hpp"

#include <string>

namespace vmcf {

/// Shortest decimal string that round-trips the IEEE-754 double.
std::string fmt_double(double v);

/// CSV with header `rho,value,deriv1,deriv2`; missing derivative tables
/// produce empty fields. LF line endings.
void write_curve_csv(const std::string& path, const SampledCurve& curve);

SampledCurve read_curve_csv(const std::string& path);

} // namespace vmcf

#endif
