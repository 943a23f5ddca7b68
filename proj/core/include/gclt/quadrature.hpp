#pragma once

#include <functional>
#include <vector>

namespace gclt {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

// Adaptive Gauss-Kronrod on [a,b].
QuadResult integrate_1d(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-10);

// Adaptive integral over [a, infinity) for decaying integrands.
QuadResult integrate_1d_tail(const std::function<double(double)>& f, double a,
                             double tol = 1e-10);

// Iterated adaptive 2D integral over [a1,b1] x [a2,b2] (smooth integrands).
QuadResult integrate_2d(const std::function<double(double, double)>& f,
                        double a1, double b1, double a2, double b2,
                        double tol = 1e-9);

// 2D integral over (0,b1] x (0,b2] with an integrable singularity at the
// origin corner: split along the scaled diagonal and substitute u = b1*s*q,
// v = b2*s (and the mirror), which pulls the singularity into a 1D s-edge
// that the adaptive rule resolves.
QuadResult integrate_2d_corner(const std::function<double(double, double)>& f,
                               double b1, double b2, double tol = 1e-10);

struct NodeSet {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre rule mapped to [a,b].
NodeSet gauss_legendre(double a, double b, int points);

// Panel-composite Gauss-Legendre on [0,length] with geometrically shrinking
// panels toward 0 (ratio 1/4), for integrands with an integrable power
// singularity at 0.
NodeSet graded_nodes(double length, int panels, int points_per_panel);

} // namespace gclt
