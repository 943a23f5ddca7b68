#include "gclt/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gclt/errors.hpp"
#include "gclt/rng.hpp"

namespace gclt {

namespace {

constexpr std::uint64_t kMomentStreamTag = 0xFFFC;

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::domain_error(msg);
}

double sphere_measure(int d) {
    return 2 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

double factorial(int n) {
    double v = 1.0;
    for (int i = 2; i <= n; ++i) v *= i;
    return v;
}

double double_factorial_odd(int n) { // (n-1)!! for even n
    double v = 1.0;
    for (int i = n - 1; i > 1; i -= 2) v *= i;
    return v;
}

// In-place lower Cholesky determinant of a symmetric k x k matrix stored
// row-major (lower triangle filled).  Returns 0 when a pivot is nonpositive,
// i.e. the matrix is numerically not positive definite.
double sym_det(double* a, int k) {
    double det = 1.0;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < i; ++j) {
            double s = a[i * k + j];
            for (int l = 0; l < j; ++l) s -= a[i * k + l] * a[j * k + l];
            a[i * k + j] = s / a[j * k + j];
        }
        double s = a[i * k + i];
        for (int l = 0; l < i; ++l) s -= a[i * k + l] * a[i * k + l];
        if (!(s > 0)) return 0.0;
        a[i * k + i] = std::sqrt(s);
        det *= s;
    }
    return det;
}

struct MomentPlan {
    std::vector<Rectangle> rects;
    std::vector<int> half;          // k_i = m_i / 2
    std::vector<int> offset;        // first global point index of rect i
    int k = 0;                      // total points
    double hurst = 0.0;
    int dim = 1;
    double pref = 0.0;              // moment formula prefactor C
    double order_factor = 1.0;      // prod k_i!
    std::vector<std::vector<int>> sigmas; // global tau pairings
};

// Cartesian product of per-rectangle permutations, flattened to global
// point-index maps.
void build_sigmas(MomentPlan& plan) {
    std::vector<std::vector<std::vector<int>>> per_rect;
    for (std::size_t r = 0; r < plan.half.size(); ++r) {
        std::vector<int> p(plan.half[r]);
        std::iota(p.begin(), p.end(), 0);
        std::vector<std::vector<int>> perms;
        do {
            perms.push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
        per_rect.push_back(std::move(perms));
    }
    std::vector<std::size_t> pick(per_rect.size(), 0);
    while (true) {
        std::vector<int> sigma(plan.k);
        for (std::size_t r = 0; r < per_rect.size(); ++r)
            for (int j = 0; j < plan.half[r]; ++j)
                sigma[plan.offset[r] + j] =
                    plan.offset[r] + per_rect[r][pick[r]][j];
        plan.sigmas.push_back(std::move(sigma));
        std::size_t r = 0;
        while (r < pick.size() && ++pick[r] == per_rect[r].size()) {
            pick[r] = 0;
            ++r;
        }
        if (r == pick.size()) break;
    }
}

struct PassResult {
    double j = 0.0;            // sum over pairings of ordered-sector integrals
    double mass_total = 0.0;   // total quadrature mass (per pairing)
    double mass_dropped = 0.0; // mass at nodes where the Gram was not PD
};

// Tensor pass over the gap cube: per rectangle the ordered coordinates are
// w_j = w_{j-1} + (b - w_{j-1}) g_j with g on graded nodes, which pins the
// collision and origin singularities to the g = 0 panel edges.
PassResult tensor_pass(const Kernel& kernel, const MomentPlan& plan, int panels,
                       int points) {
    NodeSet nodes = graded_nodes(1.0, panels, points);
    const int m_nodes = static_cast<int>(nodes.x.size());
    const int k = plan.k;
    const int axes = 2 * k;
    const int n_rects = static_cast<int>(plan.rects.size());
    const double det_pow = -0.5 * plan.dim;

    std::vector<int> idx(axes, 0);
    std::vector<double> w(k), tau(k);
    std::vector<double> rw(k * k), rt(k * k), a(k * k);
    PassResult out;

    while (true) {
        double wgt = 1.0;
        int axis = 0;
        for (int r = 0; r < n_rects; ++r) {
            double prev = plan.rects[r].a1;
            for (int j = 0; j < plan.half[r]; ++j, ++axis) {
                double g = nodes.x[idx[axis]];
                double span = plan.rects[r].b1 - prev;
                wgt *= nodes.w[idx[axis]] * span;
                prev += span * g;
                w[plan.offset[r] + j] = prev;
            }
        }
        for (int r = 0; r < n_rects; ++r) {
            double prev = plan.rects[r].a2;
            for (int j = 0; j < plan.half[r]; ++j, ++axis) {
                double g = nodes.x[idx[axis]];
                double span = plan.rects[r].b2 - prev;
                wgt *= nodes.w[idx[axis]] * span;
                prev += span * g;
                tau[plan.offset[r] + j] = prev;
            }
        }

        for (int p = 0; p < k; ++p)
            for (int q = 0; q <= p; ++q) {
                rw[p * k + q] = kernel(w[p], w[q]);
                rt[p * k + q] = rt[q * k + p] = kernel(tau[p], tau[q]);
            }

        for (const auto& sigma : plan.sigmas) {
            for (int p = 0; p < k; ++p)
                for (int q = 0; q <= p; ++q) {
                    int sp = sigma[p], sq = sigma[q];
                    a[p * k + q] = rw[p * k + q] + rt[sp * k + sq];
                }
            double det = sym_det(a.data(), k);
            out.mass_total += wgt;
            if (det > 0)
                out.j += wgt * std::pow(det, det_pow);
            else
                out.mass_dropped += wgt;
        }

        int ax = axes - 1;
        while (ax >= 0 && ++idx[ax] == m_nodes) {
            idx[ax] = 0;
            --ax;
        }
        if (ax < 0) break;
    }
    return out;
}

MomentValue quadrature_moment(const Kernel& kernel, const MomentPlan& plan,
                              const MomentOptions& opts, int total_order) {
    int panels = opts.panels, points = opts.points;
    if (panels == MomentOptions{}.panels && points == MomentOptions{}.points) {
        // Default budgets shrink with tensor dimension.
        if (total_order == 6) { panels = 4; points = 3; }
        if (total_order >= 8) { panels = 3; points = 2; }
    }
    PassResult fine = tensor_pass(kernel, plan, panels, points);
    PassResult coarse = points >= 2
                            ? tensor_pass(kernel, plan, panels, points - 1)
                            : tensor_pass(kernel, plan, panels - 1, points);
    MomentValue out;
    out.value = plan.pref * plan.order_factor * fine.j;
    out.error = plan.pref * plan.order_factor * std::abs(fine.j - coarse.j);
    out.dropped_mass =
        fine.mass_total > 0 ? fine.mass_dropped / fine.mass_total : 0.0;
    return out;
}

MomentValue mc_moment(const Kernel& kernel, const MomentPlan& plan,
                      const MomentOptions& opts) {
    require(opts.mc_samples > 1, "mc_samples must exceed 1");
    const int k = plan.k;
    const int n_rects = static_cast<int>(plan.rects.size());
    const double alpha = std::min(0.5 * plan.hurst * plan.dim, 0.9);
    const double inv_pow = 1.0 / (1.0 - alpha);
    const double det_pow = -0.5 * plan.dim;
    double order_sq = plan.order_factor * plan.order_factor;

    CounterStream stream(opts.seed, kMomentStreamTag, 0, 0);
    std::vector<double> w(k), tau(k);
    std::vector<double> rw(k * k), rt(k * k), a(k * k);
    std::vector<int> sigma(k);

    // First coordinate: power-law toward an origin edge, uniform otherwise;
    // later coordinates: exact power-law gaps toward collision.  Returns the
    // drawn value and multiplies the proposal density into q.
    auto draw_axis = [&](double a_edge, double b_edge, int count, double* dst,
                         int off, double& q) {
        double prev = a_edge;
        for (int j = 0; j < count; ++j) {
            double u = stream.uniform();
            double rem = b_edge - prev;
            double g;
            if (j == 0 && a_edge <= 1e-12) {
                g = rem * std::pow(u, inv_pow);
                q *= (1.0 - alpha) * std::pow(g, -alpha) /
                     std::pow(rem, 1.0 - alpha);
            } else if (j == 0) {
                g = rem * u;
                q *= 1.0 / rem;
            } else {
                g = rem * std::pow(u, inv_pow);
                q *= (1.0 - alpha) * std::pow(g, -alpha) /
                     std::pow(rem, 1.0 - alpha);
            }
            prev += g;
            dst[off + j] = prev;
        }
    };

    double sum = 0.0, sum_sq = 0.0;
    long long dropped = 0;
    for (long long s = 0; s < opts.mc_samples; ++s) {
        double q = 1.0;
        for (int r = 0; r < n_rects; ++r)
            draw_axis(plan.rects[r].a1, plan.rects[r].b1, plan.half[r],
                      w.data(), plan.offset[r], q);
        for (int r = 0; r < n_rects; ++r)
            draw_axis(plan.rects[r].a2, plan.rects[r].b2, plan.half[r],
                      tau.data(), plan.offset[r], q);
        for (int r = 0; r < n_rects; ++r) {
            int off = plan.offset[r], kr = plan.half[r];
            for (int j = 0; j < kr; ++j) sigma[off + j] = off + j;
            for (int j = kr - 1; j >= 1; --j) {
                double u = stream.uniform();
                int pick = std::min(static_cast<int>(u * (j + 1)), j);
                std::swap(sigma[off + j], sigma[off + pick]);
            }
        }

        for (int p = 0; p < k; ++p)
            for (int q2 = 0; q2 <= p; ++q2) {
                rw[p * k + q2] = kernel(w[p], w[q2]);
                rt[p * k + q2] = rt[q2 * k + p] = kernel(tau[p], tau[q2]);
            }
        for (int p = 0; p < k; ++p)
            for (int q2 = 0; q2 <= p; ++q2)
                a[p * k + q2] =
                    rw[p * k + q2] + rt[sigma[p] * k + sigma[q2]];

        double det = sym_det(a.data(), k);
        if (det > 0) {
            double x = order_sq * std::pow(det, det_pow) / q;
            sum += x;
            sum_sq += x * x;
        } else {
            ++dropped;
        }
    }

    const double n = static_cast<double>(opts.mc_samples);
    double mean = sum / n;
    double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    MomentValue out;
    out.value = plan.pref * mean;
    out.error = plan.pref * std::sqrt(var / n);
    out.dropped_mass = static_cast<double>(dropped) / n;
    return out;
}

} // namespace

double prefactor(double hurst, double alpha2) {
    require(hurst > 0 && hurst < 1, "prefactor requires H in (0,1)");
    require(alpha2 > 0, "prefactor requires alpha2 > 0");
    return 2.0 * std::pow(2.0 / alpha2, 0.5 / hurst) *
           std::tgamma((2.0 * hurst + 1.0) / (2.0 * hurst));
}

QuadResult spectral_integral(const TestFunction& f, double hurst, int copies) {
    require(hurst > 0 && hurst < 1, "spectral_integral requires H in (0,1)");
    require(copies >= 1, "spectral_integral requires copies >= 1");
    const int d = f.dim();
    if (!f.zero_mean())
        throw ConstantDivergence("spectral integral diverges: " + f.spec() +
                                 " has nonzero mean");
    if (hurst * (d + 2) <= copies)
        throw ConstantDivergence(
            "spectral integral diverges: H (d+2) <= copies leaves a "
            "non-integrable origin singularity");

    const double expo = d - 1 - copies / hurst;
    auto g = [&](double r) {
        if (r <= 0.0) return 0.0;
        double c = f.fourier(r);
        return c * c * std::pow(r, expo);
    };
    QuadResult head = integrate_1d(g, 0.0, 1.0);
    QuadResult tail = integrate_1d_tail(g, 1.0);
    // Catalog transforms carry (2 pi)^{-d}; the plain transform is (2 pi)^d
    // times that, and the constant divides by (2 pi)^d once.  Net: (2 pi)^d.
    const double scale = std::pow(2 * M_PI, 1.0 * d) * sphere_measure(d);
    return {scale * (head.value + tail.value),
            scale * (head.error + tail.error)};
}

LimitConstant limit_constant(const TestFunction& f, double hurst, double alpha2,
                             int copies) {
    LimitConstant out;
    out.copies = copies;
    out.prefactor_part = std::pow(prefactor(hurst, alpha2), copies);
    QuadResult spectral = spectral_integral(f, hurst, copies);
    out.spectral_part = spectral.value;
    out.value = out.prefactor_part * spectral.value;
    out.error = out.prefactor_part * spectral.error;
    return out;
}

MomentValue lambda_moment(const Kernel& kernel,
                          const std::vector<Rectangle>& rectangles,
                          const std::vector<int>& m, int dim,
                          MomentMethod method, const MomentOptions& opts) {
    require(!rectangles.empty(), "lambda_moment needs rectangles");
    require(rectangles.size() == m.size(),
            "lambda_moment needs one power per rectangle");
    require(dim >= 1, "lambda_moment requires dim >= 1");
    require(kernel.hurst() * dim < 2, "lambda_moment requires Hd < 2");
    for (std::size_t i = 0; i < rectangles.size(); ++i) {
        require(rectangles[i].valid(), "lambda_moment rectangle is invalid");
        require(m[i] >= 1, "lambda_moment powers must be >= 1");
        for (std::size_t j = i + 1; j < rectangles.size(); ++j)
            require(rectangles[i].disjoint_from(rectangles[j]),
                    "lambda_moment rectangles must be pairwise disjoint");
    }
    const int total = std::accumulate(m.begin(), m.end(), 0);
    const int limit = method == MomentMethod::Quadrature ? 8 : 12;
    require(total <= limit, "lambda_moment order is beyond the method limit");
    for (int mi : m)
        if (mi % 2 == 1) return {};

    MomentPlan plan;
    plan.rects = rectangles;
    plan.hurst = kernel.hurst();
    plan.dim = dim;
    plan.pref = 1.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        int ki = m[i] / 2;
        plan.half.push_back(ki);
        plan.offset.push_back(plan.k);
        plan.k += ki;
        plan.pref *= factorial(m[i]) /
                     (std::pow(2.0, ki) * std::pow(2 * M_PI, 0.25 * m[i] * dim) *
                      factorial(ki));
        plan.order_factor *= factorial(ki);
    }

    if (plan.k == 1 && method == MomentMethod::Quadrature) {
        // Single integration point: a plain 2D integral of
        // (R(w,w) + R(tau,tau))^{-d/2} over the rectangle.  Monte Carlo
        // requests still sample; the two routes must stay independent.
        const Rectangle& e = rectangles[0];
        auto g = [&](double u, double v) {
            return std::pow(kernel(u, u) + kernel(v, v), -0.5 * dim);
        };
        QuadResult q = (e.a1 <= 1e-12 && e.a2 <= 1e-12)
                           ? integrate_2d_corner(g, e.b1, e.b2, opts.tol)
                           : integrate_2d(g, e.a1, e.b1, e.a2, e.b2, opts.tol);
        return {plan.pref * q.value, plan.pref * q.error, 0.0};
    }

    build_sigmas(plan);
    return method == MomentMethod::Quadrature
               ? quadrature_moment(kernel, plan, opts, total)
               : mc_moment(kernel, plan, opts);
}

double det_lower_bound_check(const Kernel& kernel,
                             std::span<const double> u_sorted,
                             std::span<const double> v_sorted, double kappa,
                             int dim) {
    require(kappa > 0, "det bound requires kappa > 0");
    require(dim >= 1, "det bound requires dim >= 1");
    require(!u_sorted.empty() && u_sorted.size() == v_sorted.size(),
            "det bound needs matching nonempty coordinate lists");
    auto check_sorted = [](std::span<const double> x) {
        double prev = 0.0;
        for (double xi : x) {
            if (xi <= prev) return false;
            prev = xi;
        }
        return true;
    };
    require(check_sorted(u_sorted) && check_sorted(v_sorted),
            "det bound coordinates must be strictly increasing and positive");

    const int k = static_cast<int>(u_sorted.size());
    const double hd = kernel.hurst() * dim;
    std::vector<double> a(k * k);
    for (int p = 0; p < k; ++p)
        for (int q = 0; q <= p; ++q)
            a[p * k + q] = kernel(u_sorted[p], u_sorted[q]) +
                           kernel(v_sorted[p], v_sorted[q]);
    double det = sym_det(a.data(), k);
    require(det > 0, "pair Gram is numerically singular");

    double bound = std::pow(kappa, -0.5 * k * dim);
    double prev_u = 0.0, prev_v = 0.0;
    for (int i = 0; i < k; ++i) {
        bound *= std::pow(u_sorted[i] - prev_u, -0.5 * hd);
        bound *= std::pow(v_sorted[i] - prev_v, -0.5 * hd);
        prev_u = u_sorted[i];
        prev_v = v_sorted[i];
    }
    return bound - std::pow(det, -0.5 * dim);
}

double moment_growth_bound(int n_even, double t1, double t2, double hurst,
                           int dim, double kappa) {
    require(n_even >= 2 && n_even % 2 == 0,
            "growth bound needs an even order >= 2");
    require(t1 > 0 && t2 > 0, "growth bound requires positive horizons");
    require(hurst > 0 && hurst < 1, "growth bound requires H in (0,1)");
    require(dim >= 1, "growth bound requires dim >= 1");
    require(hurst * dim < 2, "growth bound requires Hd < 2");
    require(kappa > 0, "growth bound requires kappa > 0");

    const int k = n_even / 2;
    const double p = 1.0 - 0.5 * hurst * dim;
    const double kfac = factorial(k);
    return double_factorial_odd(n_even) *
           std::pow(2 * M_PI * kappa, -0.5 * k * dim) * kfac * kfac *
           std::pow(t1 * t2, k * p) * std::pow(std::tgamma(p), 2.0 * k) /
           std::pow(std::tgamma(k * p + 1.0), 2.0);
}

} // namespace gclt
