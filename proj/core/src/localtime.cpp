#include "gclt/localtime.hpp"

#include <cmath>
#include <stdexcept>

#include "rectangle_sum.hpp"

namespace gclt {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::domain_error(msg);
}

} // namespace

std::vector<double> intersection_local_time(const PathEnsemble& x1,
                                            const PathEnsemble& x2, double t1,
                                            double t2, double epsilon) {
    require(epsilon > 0, "intersection_local_time requires epsilon > 0");
    require(t1 > 0 && t2 > 0, "intersection_local_time requires t1, t2 > 0");
    int hi1 = detail::grid_index(x1.grid, t1, "t1");
    int hi2 = detail::grid_index(x2.grid, t2, "t2");
    std::vector<double> shift(x1.dim, 0.0);
    return detail::rectangle_sum(x1, x2,
                                 detail::gaussian_eval(x1.dim, epsilon, 1.0),
                                 1.0, shift, -1, hi1, -1, hi2, 1.0);
}

std::vector<double> local_time_density(const PathEnsemble& x1,
                                       const PathEnsemble& x2,
                                       std::span<const double> x,
                                       const Rectangle& e, double epsilon) {
    require(epsilon > 0, "local_time_density requires epsilon > 0");
    if (!e.valid()) throw std::invalid_argument("invalid rectangle");
    if (static_cast<int>(x.size()) != x1.dim)
        throw std::invalid_argument("density point dimension mismatch");
    int lo1 = detail::grid_index(x1.grid, e.a1, "rectangle edge a1");
    int hi1 = detail::grid_index(x1.grid, e.b1, "rectangle edge b1");
    int lo2 = detail::grid_index(x2.grid, e.a2, "rectangle edge a2");
    int hi2 = detail::grid_index(x2.grid, e.b2, "rectangle edge b2");
    return detail::rectangle_sum(x1, x2,
                                 detail::gaussian_eval(x1.dim, epsilon, 1.0),
                                 1.0, x, lo1, hi1, lo2, hi2, 1.0);
}

QuadResult mean_intersection_local_time(const Kernel& kernel, int dim,
                                        double t1, double t2, double epsilon,
                                        double tol) {
    require(dim >= 1, "mean_intersection_local_time requires dim >= 1");
    require(t1 > 0 && t2 > 0, "mean_intersection_local_time requires t1, t2 > 0");
    require(epsilon >= 0, "mean_intersection_local_time requires epsilon >= 0");
    if (epsilon == 0.0)
        require(kernel.hurst() * dim < 2,
                "unmollified mean local time requires Hd < 2");
    const double e2 = epsilon * epsilon;
    const double expo = -0.5 * dim;
    auto integrand = [&](double u, double v) {
        double var = kernel(u, u) + kernel(v, v) + e2;
        return std::pow(2 * M_PI * var, expo);
    };
    return integrate_2d_corner(integrand, t1, t2, tol);
}

FirstOrderReport first_order_check(const PathEnsemble& x1,
                                   const PathEnsemble& x2,
                                   const TestFunction& f_positive,
                                   std::span<const double> n_ladder,
                                   double epsilon) {
    require(epsilon > 0, "first_order_check requires epsilon > 0");
    if (f_positive.family() != TestFunction::Family::GaussBump)
        throw std::invalid_argument(
            "first_order_check needs a positive catalog member (gbump)");
    if (std::abs(f_positive.integral() - 1.0) > 1e-6)
        throw std::invalid_argument(
            "first_order_check needs a unit-mass function");
    if (f_positive.dim() != x1.dim)
        throw std::invalid_argument("test function dimension mismatch");
    const double hurst = x1.kernel.hurst();
    const int dim = x1.dim;
    require(hurst * dim < 2, "first-order regime requires Hd < 2");
    require(!n_ladder.empty(), "first_order_check needs a scale ladder");

    const int hi1 = x1.grid.n_steps() - 1;
    const int hi2 = x2.grid.n_steps() - 1;
    const std::vector<double> shift(dim, 0.0);
    const double amp = f_positive.integral();
    const double sa = f_positive.sigma_a();

    std::vector<double> base = detail::rectangle_sum(
        x1, x2, detail::gaussian_eval(dim, epsilon, 1.0), 1.0, shift, -1, hi1,
        -1, hi2, 1.0);

    FirstOrderReport out;
    out.epsilon = epsilon;
    for (double n : n_ladder) {
        require(n > 0, "scale ladder entries must be positive");
        // n^{Hd} f(n^H .) is the Gaussian of width sa/n^H; convolving with
        // p_eps adds widths in quadrature, so A_n has a closed integrand and
        // needs no finer grid than the eps-smoothed base.
        double scaled_sa = sa / std::pow(n, hurst);
        double width = std::sqrt(epsilon * epsilon + scaled_sa * scaled_sa);
        std::vector<double> a_n = detail::rectangle_sum(
            x1, x2, detail::gaussian_eval(dim, width, amp), 1.0, shift, -1,
            hi1, -1, hi2, 1.0);

        FirstOrderRow row;
        row.n_scale = n;
        double m = 0.0, m_abs = 0.0;
        for (std::size_t p = 0; p < a_n.size(); ++p) {
            double diff = a_n[p] - base[p];
            m += diff;
            m_abs += std::abs(diff);
        }
        m /= double(a_n.size());
        m_abs /= double(a_n.size());
        double s2 = 0.0;
        for (std::size_t p = 0; p < a_n.size(); ++p) {
            double diff = a_n[p] - base[p] - m;
            s2 += diff * diff;
        }
        row.mean_diff = m;
        row.mean_abs_diff = m_abs;
        row.sd_diff = a_n.size() > 1 ? std::sqrt(s2 / double(a_n.size() - 1)) : 0.0;
        out.rows.push_back(row);
    }
    return out;
}

} // namespace gclt
