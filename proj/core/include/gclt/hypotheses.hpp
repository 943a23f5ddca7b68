#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gclt/kernels.hpp"

namespace gclt {

struct KappaEstimate {
    double value = 0.0;       // smallest eigenvalue of the rescaled increment Gram
    double sampled_min = 0.0; // min Rayleigh quotient over random coefficient vectors
    bool singular = false;    // Gram numerically singular; value forced to 0
};

// Local nondeterminism constant restricted to a partition 0 < t_1 < ... < t_n:
// the largest kappa with Var(sum x_i dX_i) >= kappa sum x_i^2 (dt_i)^{2H}.
// Computed exactly as the smallest eigenvalue of D^{-1/2} G D^{-1/2} where G is
// the increment Gram matrix and D = diag((dt_i)^{2H}); the sampled Rayleigh
// quotients are a cross-check only and never replace the eigenvalue.
KappaEstimate estimate_kappa(const Kernel& kernel,
                             std::span<const double> partition,
                             int coeff_samples, std::uint64_t seed);

struct EnvelopeRow {
    double ratio = 0.0;     // h/t
    double deviation = 0.0; // max over t_grid of |Var/h^{2H} - alpha2|
};

struct H2Report {
    double alpha2 = 0.0; // Var/h^{2H} at the smallest sampled ratio (no extrapolation)
    std::vector<EnvelopeRow> envelope;
    bool monotone = false; // deviations nonincreasing as the ratio shrinks
};

// Increment-variance envelope: for each gap ratio r the increment is taken as
// h = r*t over the t grid.  Ratios must lie in (0,1].
H2Report estimate_h2(const Kernel& kernel, std::span<const double> t_grid,
                     std::span<const double> gap_ratios);

struct BetaRow {
    double gamma = 0.0;
    double beta = 0.0; // max normalized increment covariance over admissible quadruples
    long long accepted = 0;
};

// Correlation decay of increments on disjoint intervals.  Quadruples
// t1<t2<t3<t4 are sampled uniformly from [0.1,10]^4 and sorted; a quadruple is
// admissible at gamma when dt2/dt4 <= 1/gamma, dt2/dt4 >= gamma, or
// max(dt2/dt3, dt4/dt3) <= 1/gamma.  Admissible sets are nested in gamma, and
// each candidate updates every gamma it is admissible for, so the returned
// table is nonincreasing in gamma by construction.  Sampling stops once the
// largest gamma has config_samples accepted quadruples (or a draw cap hits).
std::vector<BetaRow> estimate_h3(const Kernel& kernel,
                                 std::span<const double> gamma_grid,
                                 int config_samples, std::uint64_t seed);

struct HypothesisDiagnostics {
    KappaEstimate kappa;
    double alpha2_candidate = 0.0;
    H2Report h2;
    std::vector<BetaRow> beta_table;
    bool pass = false; // kappa > 0, envelope monotone, beta table nonincreasing
};

// Runs all three checks with standard grids.
HypothesisDiagnostics run_hypothesis_diagnostics(const Kernel& kernel,
                                                 std::uint64_t seed);

} // namespace gclt
