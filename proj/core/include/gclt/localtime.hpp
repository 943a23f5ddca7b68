#pragma once

#include <span>
#include <vector>

#include "gclt/functionals.hpp"
#include "gclt/quadrature.hpp"
#include "gclt/rectangle.hpp"
#include "gclt/sampling.hpp"

namespace gclt {

// Mollified intersection local time I_eps(t1,t2): per-path trapezoid of
// p_eps(X1_u - X2_v) over [0,t1] x [0,t2], p_eps the centered Gaussian
// density with covariance eps^2 I.
std::vector<double> intersection_local_time(const PathEnsemble& x1,
                                            const PathEnsemble& x2, double t1,
                                            double t2, double epsilon);

// Mollified local-time density L_eps(x, E): the same estimator recentred at x.
std::vector<double> local_time_density(const PathEnsemble& x1,
                                       const PathEnsemble& x2,
                                       std::span<const double> x,
                                       const Rectangle& e, double epsilon);

// Exact mean E[I_eps(t1,t2)] for the pair law: 2D quadrature of
// (2 pi (R(u,u) + R(v,v) + eps^2))^{-d/2}.  epsilon = 0 is allowed when
// Hd < 2 (the corner singularity is integrable).
QuadResult mean_intersection_local_time(const Kernel& kernel, int dim,
                                        double t1, double t2, double epsilon,
                                        double tol = 1e-10);

struct FirstOrderRow {
    double n_scale = 0.0;
    double mean_diff = 0.0;     // mean of A_n - B over paths
    double sd_diff = 0.0;
    double mean_abs_diff = 0.0; // decreasing in n
};

struct FirstOrderReport {
    double epsilon = 0.0;
    std::vector<FirstOrderRow> rows;
};

// First-order law check on the full rectangle of the pair's grids: couples
// A_n = n^{Hd} int f(n^H x) L_eps(x,.) dx, realized as the trapezoid of the
// eps-smoothed dilated f along the same paths, against B = I_eps * int f.
// Requires Hd < 2 and int f = 1 within 1e-6 (positive catalog member).
FirstOrderReport first_order_check(const PathEnsemble& x1,
                                   const PathEnsemble& x2,
                                   const TestFunction& f_positive,
                                   std::span<const double> n_ladder,
                                   double epsilon);

} // namespace gclt
