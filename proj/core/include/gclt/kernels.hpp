#pragma once

#include <span>
#include <string>
#include <vector>

namespace gclt {

enum class KernelFamily { Fbm, Bifractional, Subfractional };

// Covariance kernel of a centered H-self-similar Gaussian process started at 0.
// Every catalog member satisfies R(s,t) = R(t,s), R(0,t) = 0 and the scaling
// identity R(cs,ct) = c^{2H} R(s,t) with H = hurst().
class Kernel {
public:
    static Kernel fbm(double hurst);
    static Kernel bifractional(double h0, double k0);
    static Kernel subfractional(double hurst);

    // Accepts "fbm:H=0.75", "bifbm:H0=0.6,K0=0.8", "subfbm:H=0.6";
    // case-insensitive, unknown families or keys are errors.
    static Kernel parse(const std::string& spec);

    double operator()(double s, double t) const;

    KernelFamily family() const { return family_; }
    double hurst() const { return hurst_; }

    // Candidate limit of Var[X_{t+h}-X_t] / h^{2H} as h/t -> 0, from the
    // closed-form expansion of each family.  estimate_h2 confirms it
    // numerically instead of trusting this value.
    double alpha2_candidate() const;

    // Canonical parseable form, round-trips through parse().
    std::string spec() const;

private:
    Kernel(KernelFamily family, double h0, double k0);

    KernelFamily family_;
    double h0_;
    double k0_; // 1 except for the bifractional family
    double hurst_;
};

double eval_cov(const Kernel& kernel, double s, double t);

// Var[X_{t+h} - X_t]; h must be positive.
double increment_variance(const Kernel& kernel, double t, double h);

// max over grid pairs of |R(cs,ct) - c^{2H} R(s,t)| / (1 + |c^{2H} R(s,t)|).
double check_self_similarity(const Kernel& kernel, double c,
                             std::span<const double> grid);

} // namespace gclt
