#include "gclt/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gclt {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
constexpr int kMaxDepth = 15;

} // namespace

QuadResult integrate_1d(const std::function<double(double)>& f, double a,
                        double b, double tol) {
    if (!(b > a)) throw std::domain_error("integrate_1d requires b > a");
    double err = 0.0;
    double v = GK::integrate(f, a, b, kMaxDepth, tol, &err);
    return {v, err};
}

QuadResult integrate_1d_tail(const std::function<double(double)>& f, double a,
                             double tol) {
    double err = 0.0;
    double v = GK::integrate(f, a, std::numeric_limits<double>::infinity(),
                             kMaxDepth, tol, &err);
    return {v, err};
}

QuadResult integrate_2d(const std::function<double(double, double)>& f,
                        double a1, double b1, double a2, double b2,
                        double tol) {
    if (!(b1 > a1 && b2 > a2))
        throw std::domain_error("integrate_2d requires a nondegenerate box");
    double outer_err = 0.0;
    auto outer = [&](double x) {
        double inner_err = 0.0;
        return GK::integrate([&](double y) { return f(x, y); }, a2, b2,
                             kMaxDepth, tol, &inner_err);
    };
    double v = GK::integrate(outer, a1, b1, kMaxDepth, tol, &outer_err);
    return {v, outer_err};
}

QuadResult integrate_2d_corner(const std::function<double(double, double)>& f,
                               double b1, double b2, double tol) {
    if (!(b1 > 0 && b2 > 0))
        throw std::domain_error("integrate_2d_corner requires positive edges");
    // Split [0,b1]x[0,b2] along the image of the diagonal of the unit square:
    // below it u = b1*s*q, v = b2*s; above it u = b1*s, v = b2*s*q.  Both
    // halves share the Jacobian b1*b2*s, so one (s,q) integral covers both.
    double outer_err = 0.0;
    auto outer = [&](double s) {
        double inner_err = 0.0;
        double inner = GK::integrate(
            [&](double q) {
                return f(b1 * s * q, b2 * s) + f(b1 * s, b2 * s * q);
            },
            0.0, 1.0, kMaxDepth, tol, &inner_err);
        return inner * b1 * b2 * s;
    };
    double v = GK::integrate(outer, 0.0, 1.0, kMaxDepth, tol, &outer_err);
    return {v, outer_err};
}

NodeSet gauss_legendre(double a, double b, int points) {
    if (points < 1) throw std::domain_error("gauss_legendre needs points >= 1");
    if (!(b > a)) throw std::domain_error("gauss_legendre requires b > a");
    // Nodes on [-1,1] by Newton iteration from the Chebyshev initial guess;
    // symmetric pairs are mirrored.
    const int n = points;
    NodeSet out;
    out.x.resize(n);
    out.w.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        out.x[i] = x;
        out.w[i] = w;
        out.x[n - 1 - i] = -x;
        out.w[n - 1 - i] = w;
    }
    // Map [-1,1] -> [a,b]; reverse so nodes come out increasing.
    const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
    NodeSet mapped;
    mapped.x.resize(n);
    mapped.w.resize(n);
    for (int i = 0; i < n; ++i) {
        mapped.x[i] = mid - rad * out.x[i];
        mapped.w[i] = rad * out.w[i];
    }
    return mapped;
}

NodeSet graded_nodes(double length, int panels, int points_per_panel) {
    if (!(length > 0)) throw std::domain_error("graded_nodes requires length > 0");
    if (panels < 1 || points_per_panel < 1)
        throw std::domain_error("graded_nodes requires positive panel counts");
    constexpr double kRatio = 0.25;
    NodeSet out;
    double hi = length;
    for (int p = 0; p < panels; ++p) {
        double lo = (p + 1 == panels) ? 0.0 : hi * kRatio;
        NodeSet panel = gauss_legendre(lo, hi, points_per_panel);
        out.x.insert(out.x.end(), panel.x.begin(), panel.x.end());
        out.w.insert(out.w.end(), panel.w.begin(), panel.w.end());
        hi = lo;
    }
    return out;
}

} // namespace gclt
