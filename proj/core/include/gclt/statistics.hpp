#pragma once

#include <span>
#include <vector>

namespace gclt {

// Pairwise (cascade) summation; deterministic for a fixed input order.
double pairwise_sum(std::span<const double> x);

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    long long n = 0;
};

MeanSe mean_se(std::span<const double> x);

// Raw moment E[x^order] with its plug-in standard error sd(x^order)/sqrt(n).
MeanSe raw_moment_se(std::span<const double> x, int order);

// Excess kurtosis with asymptotic normal s.e. sqrt(24/n).
MeanSe excess_kurtosis_se(std::span<const double> x);

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
    long long n1 = 0;
    long long n2 = 0;
};

// Exact two-sample KS statistic with the asymptotic Kolmogorov p-value at
// effective size n1 n2 / (n1 + n2).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct SlopeFit {
    double slope = 0.0;
    double slope_se = 0.0;
    double intercept = 0.0;
};

// Weighted least squares of y on x with per-point standard errors on y.
SlopeFit fit_line(std::span<const double> x, std::span<const double> y,
                  std::span<const double> y_se);

} // namespace gclt
