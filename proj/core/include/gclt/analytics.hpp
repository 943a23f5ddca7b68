#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gclt/functionals.hpp"
#include "gclt/kernels.hpp"
#include "gclt/quadrature.hpp"
#include "gclt/rectangle.hpp"

namespace gclt {

// 2 (2/alpha2)^{1/(2H)} Gamma((2H+1)/(2H)).
double prefactor(double hurst, double alpha2);

// (2 pi)^{-d} int |F(x)|^2 |x|^{-N/H} dx where F is the plain transform
// int e^{i xi.z} f(z) dz.  TestFunction::fourier carries the (2 pi)^{-d}
// convention, so the radial reduction rescales by (2 pi)^d internally;
// the returned value matches the normalization above.
// Throws ConstantDivergence when H <= N/(d+2) (the generic membership bound
// |F(x)| = O(|x|) no longer makes |x|^{-N/H} integrable at the origin).
QuadResult spectral_integral(const TestFunction& f, double hurst, int copies);

struct LimitConstant {
    double value = 0.0;
    double prefactor_part = 0.0;
    double spectral_part = 0.0;
    double error = 0.0;
    int copies = 2;
};

// prefactor(H, alpha2)^N * spectral_integral(f, H, N); N = 2 is the variance
// scale of the second-order limit, N = 1 the first-order constant.
LimitConstant limit_constant(const TestFunction& f, double hurst, double alpha2,
                             int copies);

enum class MomentMethod { Quadrature, MonteCarlo };

struct MomentOptions {
    long long mc_samples = 2000000;
    std::uint64_t seed = 20250819;
    int panels = 5; // graded panels per axis in quadrature mode
    int points = 4; // Gauss-Legendre points per panel
    double tol = 1e-9; // adaptive tolerance for the single-pair case
};

struct MomentValue {
    double value = 0.0;
    double error = 0.0;        // quadrature estimate or MC standard error
    double dropped_mass = 0.0; // weight fraction dropped at singular nodes
};

// Mixed moment E[ prod_i (Delta_{E_i} Lambda)^{m_i} ] of the conditionally
// Gaussian limit field: zero when any m_i is odd; otherwise
//   prod_i [ m_i! / (2^{m_i/2} (2 pi)^{m_i d/4} (m_i/2)!) ]
//   * int over prod_i E_i^{m_i/2} of det(A)^{-1/2},
// where A is the covariance of the pair differences at the integration nodes
// and det(A) = det(A_scalar)^d by component independence.
// Total |m| <= 8 in quadrature mode, <= 12 in MC mode.
MomentValue lambda_moment(const Kernel& kernel,
                          const std::vector<Rectangle>& rectangles,
                          const std::vector<int>& m, int dim,
                          MomentMethod method, const MomentOptions& opts = {});

// kappa^{-kd/2} prod (u_i - u_{i-1})^{-Hd/2} prod (v_i - v_{i-1})^{-Hd/2}
//   - det(A_k)^{-1/2}
// with u_0 = v_0 = 0; nonnegative when kappa is a valid nondeterminism
// constant for both partitions.
double det_lower_bound_check(const Kernel& kernel, std::span<const double> u_sorted,
                             std::span<const double> v_sorted, double kappa,
                             int dim);

// Fully explicit bound on E[Lambda(t1,t2)^n], n = 2k even:
//   (n-1)!! (2 pi kappa)^{-kd/2} (k!)^2 (t1 t2)^{kp} Gamma(p)^{2k}
//     / Gamma(kp+1)^2,   p = 1 - Hd/2,
// assembled from the moment formula prefactor, the determinant bound, and the
// Dirichlet integral over ordered increments.  Dominates lambda_moment.
double moment_growth_bound(int n_even, double t1, double t2, double hurst,
                           int dim, double kappa);

} // namespace gclt
