#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gclt/rectangle.hpp"
#include "gclt/sampling.hpp"

namespace gclt {

// Radial test functions built from centered Gaussian densities
// g_s(x) = (2 pi s^2)^{-d/2} exp(-|x|^2 / (2 s^2)):
//   gdiff: amplitude * (g_{sa} - g_{sb}), sa < sb; integral 0, the weighted
//          zero-mean class member used in the second-order limit;
//   gbump: amplitude * g_{s}; positive, integral = amplitude, used for
//          first-order (local time) checks and as a negative membership fixture.
class TestFunction {
public:
    enum class Family { GaussDiff, GaussBump };

    static TestFunction gaussian_diff(int dim, double sigma_a, double sigma_b);
    static TestFunction gaussian_bump(int dim, double sigma);
    // "gdiff:sa=1.0,sb=2.0" or "gbump:sigma=0.5"; case-insensitive keys.
    static TestFunction parse(const std::string& spec, int dim);

    double operator()(std::span<const double> x) const;
    double value_r2(double r2) const; // radial profile in |x|^2

    // hat f(xi) = (2 pi)^{-d} int e^{i xi.z} f(z) dz; real and radial here.
    double fourier(double rho) const;

    double integral() const; // exact: 0 for gdiff, amplitude for gbump
    bool zero_mean() const { return family_ == Family::GaussDiff; }

    int dim() const { return dim_; }
    Family family() const { return family_; }
    double sigma_a() const { return sigma_a_; }
    double sigma_b() const { return sigma_b_; }
    double amplitude() const { return amplitude_; }

    TestFunction scaled(double a) const;    // a * f
    TestFunction dilated(double lam) const; // lam^d f(lam x); keeps the integral
    std::string spec() const;

private:
    TestFunction(Family family, int dim, double sa, double sb, double amplitude);

    Family family_;
    int dim_;
    double sigma_a_;
    double sigma_b_; // unused for gbump
    double amplitude_;
};

struct WeightNorm {
    double value = 0.0;        // int |f(z)| (1 + |z|^beta) dz
    double beta_used = 0.0;    // 2/H - d
    double abs_integral = 0.0; // int |f(z)| dz; always <= value
};

// Weighted L1 norm via radial quadrature; requires 2/H - d > 0.  Throws
// MembershipError when the weighted tail fails to decay.
WeightNorm weight_norm(const TestFunction& f, double hurst);

// max over random pairs (x,y) and alpha in {0, cap/2, cap},
// cap = min(2/H - d, 1), of |hat f(x) - hat f(y)| - (2pi)^{-d} N(f) |x-y|^alpha.
// Nonpositive up to round-off for catalog members.
double holder_check(const TestFunction& f, double hurst, int trials,
                    std::uint64_t seed);

enum class FunctionalMode { Direct, Rescaled };

// Normalized additive functional of the independent pair over
// [0,t1] x [0,t2], one value per path.
//   Direct:   ensembles on [0, n t1] and [0, n t2]; value is
//             n^{(Hd-2)/2} * trapezoid of f(X1_u - X2_v) over the rectangle.
//   Rescaled: ensembles on [0,t1] and [0,t2]; value is
//             n^{(Hd+2)/2} * trapezoid of f(n^H (X1_u - X2_v)).
// The two modes realize the same law (not the same paths).
std::vector<double> additive_functional(const PathEnsemble& x1,
                                        const PathEnsemble& x2,
                                        const TestFunction& f, double hurst,
                                        double n_scale, double t1, double t2,
                                        FunctionalMode mode);

// Same normalization, integrated over the sub-rectangle E; equals the
// four-corner inclusion-exclusion of the [0,t]x[0,s] values exactly.
// Rectangle edges must lie on grid nodes (or 0).
std::vector<double> additive_functional_increment(const PathEnsemble& x1,
                                                  const PathEnsemble& x2,
                                                  const TestFunction& f,
                                                  double hurst, double n_scale,
                                                  const Rectangle& e,
                                                  FunctionalMode mode);

} // namespace gclt
