#ifndef VMCF_GRID_HPP
#define VMCF_GRID_HPP

#include <memory>
#include <vector>

namespace vmcf {

enum class SpacingPolicy { Uniform, Geometric, Composite };

/// Strictly increasing radial abscissae. The first node doubles as the
/// origin cutoff rho0 > 0 that keeps 1/rho coefficients finite.
struct RadialGrid {
    std::vector<double> nodes;
    SpacingPolicy policy = SpacingPolicy::Geometric;

    double origin_cutoff() const { return nodes.front(); }
    double max() const { return nodes.back(); }
    std::size_t size() const { return nodes.size(); }
    double operator[](std::size_t i) const { return nodes[i]; }

    void validate() const;

    /// Index of the last node <= x (clamped to [0, size-2] for interval use).
    std::size_t interval_of(double x) const;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_uniform_grid(double a, double b, std::size_t n);
GridPtr make_geometric_grid(double a, double b, std::size_t n);

/// Geometric grid with a floor on the spacing. Keeps stencil second
/// derivatives above the 1/h^2 roundoff floor near the origin cutoff, where
/// the profiles vary on O(1) scales anyway.
GridPtr make_profile_grid(double a, double b, std::size_t n, double h_min = 5e-5);

/// Geometric grid with a uniform refinement band [band_lo, band_hi] inserted,
/// used where a degenerate coefficient needs extra resolution.
GridPtr make_banded_grid(double a, double b, std::size_t n_geo,
                         double band_lo, double band_hi, std::size_t n_band);

/// Values on a grid, optionally with first and second derivative tables.
struct SampledCurve {
    GridPtr grid;
    std::vector<double> values;
    std::vector<double> deriv1; // empty when absent
    std::vector<double> deriv2;

    SampledCurve() = default;
    explicit SampledCurve(GridPtr g) : grid(std::move(g)), values(grid->size(), 0.0) {}

    std::size_t size() const { return values.size(); }
    bool has_deriv1() const { return deriv1.size() == values.size(); }
    bool has_deriv2() const { return deriv2.size() == values.size(); }

    void validate() const; // finite values, consistent lengths
};

void require_same_grid(const SampledCurve& a, const SampledCurve& b);

/// Cubic Hermite evaluation from (values, deriv1); 4th-order accurate between
/// nodes. Out-of-range queries clamp to the boundary intervals.
double curve_eval(const SampledCurve& c, double x);
double curve_eval_deriv(const SampledCurve& c, double x);

/// Hermite evaluation on explicit (values, slopes) tables.
double hermite_eval(const RadialGrid& g, const std::vector<double>& vals,
                    const std::vector<double>& slopes, double x);
double hermite_eval_deriv(const RadialGrid& g, const std::vector<double>& vals,
                          const std::vector<double>& slopes, double x);

/// Trapezoid integral of f dr over the grid.
double grid_integral(const RadialGrid& g, const std::vector<double>& f);

/// Weighted L2 norm sqrt( 2 pi^2 * int f(r)^2 r^3 dr ) over [lo, hi] subrange,
/// the natural radial norm in four space dimensions.
double radial_l2_norm(const RadialGrid& g, const std::vector<double>& f,
                      double lo, double hi);

} // namespace vmcf

#endif
