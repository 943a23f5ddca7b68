#include "gclt/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "kv_parse.hpp"

namespace gclt {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::domain_error(msg);
}

} // namespace

Kernel::Kernel(KernelFamily family, double h0, double k0)
    : family_(family), h0_(h0), k0_(k0), hurst_(h0 * k0) {}

Kernel Kernel::fbm(double hurst) {
    require(hurst > 0 && hurst < 1, "fbm requires H in (0,1)");
    return Kernel(KernelFamily::Fbm, hurst, 1.0);
}

Kernel Kernel::bifractional(double h0, double k0) {
    require(h0 > 0 && h0 < 1, "bifractional requires H0 in (0,1)");
    require(k0 > 0 && k0 <= 1, "bifractional requires K0 in (0,1]");
    return Kernel(KernelFamily::Bifractional, h0, k0);
}

Kernel Kernel::subfractional(double hurst) {
    require(hurst > 0 && hurst < 1, "subfractional requires H in (0,1)");
    return Kernel(KernelFamily::Subfractional, hurst, 1.0);
}

Kernel Kernel::parse(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("kernel spec needs 'family:params': " + spec);
    std::string family = detail::lower(spec.substr(0, colon));
    auto params = detail::parse_params(spec.substr(colon + 1), "kernel");
    Kernel out = [&] {
        if (family == "fbm") return fbm(detail::take(params, "h", "kernel"));
        if (family == "bifbm")
            return bifractional(detail::take(params, "h0", "kernel"),
                                detail::take(params, "k0", "kernel"));
        if (family == "subfbm")
            return subfractional(detail::take(params, "h", "kernel"));
        throw std::invalid_argument("unknown kernel family: " + family);
    }();
    detail::reject_leftovers(params, "kernel");
    return out;
}

double Kernel::operator()(double s, double t) const {
    require(s >= 0 && t >= 0, "covariance requires nonnegative times");
    switch (family_) {
    case KernelFamily::Fbm: {
        double twoH = 2 * h0_;
        return 0.5 * (std::pow(s, twoH) + std::pow(t, twoH) -
                      std::pow(std::abs(t - s), twoH));
    }
    case KernelFamily::Bifractional: {
        double twoH0 = 2 * h0_;
        return std::pow(2.0, -k0_) *
               (std::pow(std::pow(s, twoH0) + std::pow(t, twoH0), k0_) -
                std::pow(std::abs(t - s), twoH0 * k0_));
    }
    case KernelFamily::Subfractional: {
        double twoH = 2 * h0_;
        return std::pow(s, twoH) + std::pow(t, twoH) -
               0.5 * (std::pow(s + t, twoH) + std::pow(std::abs(t - s), twoH));
    }
    }
    return 0.0;
}

double Kernel::alpha2_candidate() const {
    switch (family_) {
    case KernelFamily::Fbm:
        return 1.0;
    case KernelFamily::Bifractional:
        // Var[X_{t+h}-X_t] = 2^{1-K0} h^{2H0 K0} (1 + o(1)) as h/t -> 0: the
        // (t^{2H0}+s^{2H0})^{K0} part is differentiable away from the origin,
        // so only the |t-s| term contributes at leading order.
        return std::pow(2.0, 1.0 - k0_);
    case KernelFamily::Subfractional:
        // (t+s)^{2H} is smooth away from the axes; |t-s|^{2H} gives h^{2H}.
        return 1.0;
    }
    return 0.0;
}

std::string Kernel::spec() const {
    switch (family_) {
    case KernelFamily::Fbm:
        return "fbm:H=" + detail::fmt_double(h0_);
    case KernelFamily::Bifractional:
        return "bifbm:H0=" + detail::fmt_double(h0_) +
               ",K0=" + detail::fmt_double(k0_);
    case KernelFamily::Subfractional:
        return "subfbm:H=" + detail::fmt_double(h0_);
    }
    return {};
}

double eval_cov(const Kernel& kernel, double s, double t) { return kernel(s, t); }

double increment_variance(const Kernel& kernel, double t, double h) {
    require(t >= 0, "increment_variance requires t >= 0");
    require(h > 0, "increment_variance requires h > 0");
    return kernel(t + h, t + h) - 2 * kernel(t + h, t) + kernel(t, t);
}

double check_self_similarity(const Kernel& kernel, double c,
                             std::span<const double> grid) {
    require(c > 0, "self-similarity scale must be positive");
    for (double t : grid) require(t > 0, "grid times must be positive");
    double scale = std::pow(c, 2 * kernel.hurst());
    double worst = 0.0;
    for (double s : grid) {
        for (double t : grid) {
            double lhs = kernel(c * s, c * t);
            double rhs = scale * kernel(s, t);
            double defect = std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
            worst = std::max(worst, defect);
        }
    }
    return worst;
}

} // namespace gclt
