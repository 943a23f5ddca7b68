#pragma once

// Shared trapezoid engine for the path functionals: everything integrated
// against the pair (X1_u - X2_v) reduces to a weighted double sum of a
// radial one- or two-term Gaussian profile over the product grid.

#include <span>
#include <vector>

#include "gclt/functionals.hpp"
#include "gclt/sampling.hpp"

namespace gclt::detail {

// c_a exp(-e_a r2) - [diff] c_b exp(-e_b r2), evaluated in r2 = |argument|^2.
struct RadialEval {
    double ca = 0.0;
    double ea = 0.0;
    double cb = 0.0;
    double eb = 0.0;
    bool diff = false;
};

RadialEval radial_eval(const TestFunction& f);

// Centered Gaussian density with covariance width^2 I_dim, amplitude-scaled.
RadialEval gaussian_eval(int dim, double width, double amplitude);

// Extended-grid node index for a time value: -1 is the origin, i >= 0 is
// grid.time(i).  Throws when t is not a node within 1e-9 relative tolerance.
int grid_index(const TimeGrid& grid, double t, const char* what);

// Per-path trapezoid of ev(arg_scale2 * |X1_u - X2_v - shift|^2) over the
// node-index box [lo1,hi1] x [lo2,hi2] of the extended grids (origin nodes
// carry X = 0 and half-step weight), scaled by norm.  Prefix sums over index
// boxes telescope, so sub-rectangle increments are exact.
std::vector<double> rectangle_sum(const PathEnsemble& x1,
                                  const PathEnsemble& x2, const RadialEval& ev,
                                  double arg_scale2,
                                  std::span<const double> shift, int lo1,
                                  int hi1, int lo2, int hi2, double norm);

} // namespace gclt::detail
