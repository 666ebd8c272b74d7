#ifndef VMCF_CONFIG_HPP
#define VMCF_CONFIG_HPP

#include "vmcf/inner.hpp"

#include <cstdint>
#include <string>

namespace vmcf {

/// Everything a pipeline run needs; parsed from a flat key=value file with
/// strict unknown-key checking.
struct RunConfig {
    Config model; // nu, eps1, eps2, delta, N
    double rho_max = 150.0;
    std::size_t grid_n = 4096;
    double ode_tol = 1e-10;
    int remote_layers = 4;
    double t1 = 0.05;
    double t_end = 0.1;
    double cfl = 0.4;
    std::uint64_t seed = 12345;
    int rayleigh_samples = 50;
    std::string out_dir = "out";

    void validate() const;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<memory>");
std::string serialize_config(const RunConfig& cfg);

} // namespace vmcf

#endif
