#include "vmcf/io.hpp"
#include "vmcf/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace vmcf {

std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_curve_csv(const std::string& path, const SampledCurve& curve) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "rho,value,deriv1,deriv2\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        out << fmt_double((*curve.grid)[i]) << ',' << fmt_double(curve.values[i]) << ',';
        if (curve.has_deriv1()) out << fmt_double(curve.deriv1[i]);
        out << ',';
        if (curve.has_deriv2()) out << fmt_double(curve.deriv2[i]);
        out << '\n';
    }
}

SampledCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file " + path);
    auto grid = std::make_shared<RadialGrid>();
    SampledCurve c;
    std::vector<double> d1, d2;
    bool have_d1 = true, have_d2 = true;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        double vals[4];
        bool present[4] = {false, false, false, false};
        for (int j = 0; j < 4 && std::getline(ss, cell, ','); ++j) {
            if (cell.empty()) continue;
            auto res = std::from_chars(cell.data(), cell.data() + cell.size(), vals[j]);
            if (res.ec != std::errc())
                throw ParseError(path + ":" + std::to_string(lineno) + ": bad number");
            present[j] = true;
        }
        if (!present[0] || !present[1])
            throw ParseError(path + ":" + std::to_string(lineno) + ": missing rho/value");
        grid->nodes.push_back(vals[0]);
        c.values.push_back(vals[1]);
        if (present[2]) d1.push_back(vals[2]); else have_d1 = false;
        if (present[3]) d2.push_back(vals[3]); else have_d2 = false;
    }
    grid->policy = SpacingPolicy::Composite;
    c.grid = grid;
    if (have_d1 && d1.size() == c.values.size()) c.deriv1 = std::move(d1);
    if (have_d2 && d2.size() == c.values.size()) c.deriv2 = std::move(d2);
    return c;
}

} // namespace vmcf
