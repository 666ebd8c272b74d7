#include "vmcf/config.hpp"
#include "vmcf/error.hpp"
#include "vmcf/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace vmcf {

void RunConfig::validate() const {
    model.validate();
    if (!(rho_max >= 20.0)) throw InvariantViolation("rho_max must be at least 20");
    if (grid_n < 16) throw InvariantViolation("grid_n too small");
    if (!(ode_tol > 0.0)) throw InvariantViolation("ode_tol must be positive");
    if (remote_layers < 1) throw InvariantViolation("remote_layers must be >= 1");
    if (!(t1 > 0.0 && t1 < 1.0)) throw InvariantViolation("t1 must lie in (0,1)");
    if (!(cfl > 0.0 && cfl < 1.0)) throw InvariantViolation("cfl must lie in (0,1)");
    if (rayleigh_samples < 1) throw InvariantViolation("rayleigh_samples must be >= 1");
}

namespace {

double parse_double(const std::string& v, const std::string& where) {
    double x = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ParseError(where + ": bad number '" + v + "'");
    return x;
}

long parse_int(const std::string& v, const std::string& where) {
    long x = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ParseError(where + ": bad integer '" + v + "'");
    return x;
}

} // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t'))
            line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        line = line.substr(start);
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw ParseError(where + ": expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "nu") cfg.model.nu = parse_double(val, where);
        else if (key == "eps1") cfg.model.eps1 = parse_double(val, where);
        else if (key == "eps2") cfg.model.eps2 = parse_double(val, where);
        else if (key == "delta") cfg.model.delta = parse_double(val, where);
        else if (key == "N") cfg.model.N = int(parse_int(val, where));
        else if (key == "rho_max") cfg.rho_max = parse_double(val, where);
        else if (key == "grid_n") cfg.grid_n = std::size_t(parse_int(val, where));
        else if (key == "ode_tol") cfg.ode_tol = parse_double(val, where);
        else if (key == "remote_layers") cfg.remote_layers = int(parse_int(val, where));
        else if (key == "t1") cfg.t1 = parse_double(val, where);
        else if (key == "t_end") cfg.t_end = parse_double(val, where);
        else if (key == "cfl") cfg.cfl = parse_double(val, where);
        else if (key == "seed") cfg.seed = std::uint64_t(parse_int(val, where));
        else if (key == "rayleigh_samples") cfg.rayleigh_samples = int(parse_int(val, where));
        else if (key == "out_dir") cfg.out_dir = val;
        else throw ParseError(where + ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "nu=" << fmt_double(cfg.model.nu) << '\n'
        << "eps1=" << fmt_double(cfg.model.eps1) << '\n'
        << "eps2=" << fmt_double(cfg.model.eps2) << '\n'
        << "delta=" << fmt_double(cfg.model.delta) << '\n'
        << "N=" << cfg.model.N << '\n'
        << "rho_max=" << fmt_double(cfg.rho_max) << '\n'
        << "grid_n=" << cfg.grid_n << '\n'
        << "ode_tol=" << fmt_double(cfg.ode_tol) << '\n'
        << "remote_layers=" << cfg.remote_layers << '\n'
        << "t1=" << fmt_double(cfg.t1) << '\n'
        << "t_end=" << fmt_double(cfg.t_end) << '\n'
        << "cfl=" << fmt_double(cfg.cfl) << '\n'
        << "seed=" << cfg.seed << '\n'
        << "rayleigh_samples=" << cfg.rayleigh_samples << '\n'
        << "out_dir=" << cfg.out_dir << '\n';
    return out.str();
}

} // namespace vmcf
