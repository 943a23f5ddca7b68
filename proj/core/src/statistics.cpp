#include "gclt/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gclt {

double pairwise_sum(std::span<const double> x) {
    if (x.empty()) return 0.0;
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

MeanSe mean_se(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean_se needs data");
    MeanSe out;
    out.n = static_cast<long long>(x.size());
    out.mean = pairwise_sum(x) / double(out.n);
    if (out.n > 1) {
        std::vector<double> dev(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            double d = x[i] - out.mean;
            dev[i] = d * d;
        }
        double var = pairwise_sum(dev) / double(out.n - 1);
        out.se = std::sqrt(var / double(out.n));
    }
    return out;
}

MeanSe raw_moment_se(std::span<const double> x, int order) {
    if (order < 1) throw std::invalid_argument("moment order must be >= 1");
    std::vector<double> powered(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double p = x[i];
        for (int j = 1; j < order; ++j) p *= x[i];
        powered[i] = p;
    }
    return mean_se(powered);
}

MeanSe excess_kurtosis_se(std::span<const double> x) {
    MeanSe m = mean_se(x);
    std::vector<double> c2(x.size()), c4(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - m.mean;
        c2[i] = d * d;
        c4[i] = d * d * d * d;
    }
    double m2 = pairwise_sum(c2) / double(m.n);
    double m4 = pairwise_sum(c4) / double(m.n);
    MeanSe out;
    out.n = m.n;
    out.mean = m4 / (m2 * m2) - 3.0;
    out.se = std::sqrt(24.0 / double(m.n));
    return out;
}

namespace {

// Asymptotic Kolmogorov tail Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_tail(double lambda) {
    if (lambda <= 0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

} // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample needs two nonempty samples");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    const double na = double(sa.size()), nb = double(sb.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= x) ++i;
        while (j < sb.size() && sb[j] <= x) ++j;
        d = std::max(d, std::abs(double(i) / na - double(j) / nb));
    }

    KsResult out;
    out.statistic = d;
    out.n1 = static_cast<long long>(sa.size());
    out.n2 = static_cast<long long>(sb.size());
    double ne = na * nb / (na + nb);
    double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    out.p_value = kolmogorov_tail(lambda);
    return out;
}

SlopeFit fit_line(std::span<const double> x, std::span<const double> y,
                  std::span<const double> y_se) {
    if (x.size() != y.size() || x.size() != y_se.size() || x.size() < 2)
        throw std::invalid_argument("fit_line needs >= 2 matching points");
    double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y_se[i] > 0))
            throw std::invalid_argument("fit_line needs positive errors");
        double w = 1.0 / (y_se[i] * y_se[i]);
        sw += w;
        swx += w * x[i];
        swy += w * y[i];
        swxx += w * x[i] * x[i];
        swxy += w * x[i] * y[i];
    }
    double denom = sw * swxx - swx * swx;
    if (denom <= 0) throw std::invalid_argument("fit_line is degenerate");
    SlopeFit out;
    out.slope = (sw * swxy - swx * swy) / denom;
    out.intercept = (swxx * swy - swx * swxy) / denom;
    out.slope_se = std::sqrt(sw / denom);
    return out;
}

} // namespace gclt
