#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gclt/analytics.hpp"
#include "gclt/errors.hpp"
#include "gclt/functionals.hpp"
#include "gclt/hypotheses.hpp"
#include "gclt/kernels.hpp"
#include "gclt/localtime.hpp"

using gclt::Kernel;
using gclt::MomentMethod;
using gclt::MomentOptions;
using gclt::Rectangle;
using gclt::TestFunction;

TEST_CASE("prefactor closed forms") {
    // 2 (2/alpha2)^{1/(2H)} Gamma((2H+1)/(2H))
    CHECK(gclt::prefactor(0.5, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(gclt::prefactor(0.5, 1.0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(gclt::prefactor(0.75, 1.0) ==
          doctest::Approx(2.8660376553793048).epsilon(1e-14));
    // doubling alpha2 costs exactly 2^{-1/(2H)}
    CHECK(gclt::prefactor(0.75, 2.0) ==
          doctest::Approx(gclt::prefactor(0.75, 1.0) * std::pow(2.0, -2.0 / 3.0))
              .epsilon(1e-14));
    CHECK_THROWS_AS(gclt::prefactor(1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(gclt::prefactor(0.5, 0.0), std::domain_error);
}

TEST_CASE("spectral integral of the standard pair") {
    TestFunction f = TestFunction::gaussian_diff(1, 1.0, 2.0);
    auto two = gclt::spectral_integral(f, 0.75, 2);
    CHECK(two.value == doctest::Approx(0.12445464480850519608).epsilon(1e-10));
    CHECK(two.error < 1e-8);
    auto one = gclt::spectral_integral(f, 0.75, 1);
    CHECK(one.value == doctest::Approx(0.075523974834498475).epsilon(1e-10));

    // the integrand is quadratic in f
    auto scaled = gclt::spectral_integral(f.scaled(3.0), 0.75, 2);
    CHECK(scaled.value == doctest::Approx(9.0 * two.value).epsilon(1e-12));

    // convergence window: H must exceed N/(d+2)
    auto near = gclt::spectral_integral(f, 0.68, 2);
    CHECK(std::isfinite(near.value));
    CHECK(near.value > 0.0);
    CHECK_THROWS_AS(gclt::spectral_integral(f, 0.6, 2), gclt::ConstantDivergence);
    CHECK_THROWS_AS(gclt::spectral_integral(f, 2.0 / 3.0, 2),
                    gclt::ConstantDivergence);
    CHECK(gclt::spectral_integral(f, 0.34, 1).value > 0.0);
    CHECK_THROWS_AS(gclt::spectral_integral(f, 1.0 / 3.0, 1),
                    gclt::ConstantDivergence);
}

TEST_CASE("limit constant composes prefactor and spectral parts") {
    TestFunction f = TestFunction::gaussian_diff(1, 1.0, 2.0);
    auto lc = gclt::limit_constant(f, 0.75, 1.0, 2);
    CHECK(lc.value == doctest::Approx(1.0222918389986193).epsilon(1e-10));
    CHECK(lc.value ==
          doctest::Approx(lc.prefactor_part * lc.spectral_part).epsilon(1e-12));
    // prefactor_part carries the N-th power already
    const double pf = gclt::prefactor(0.75, 1.0);
    CHECK(lc.prefactor_part == doctest::Approx(pf * pf).epsilon(1e-15));
    CHECK(lc.copies == 2);

    auto first = gclt::limit_constant(f, 0.75, 1.0, 1);
    CHECK(first.value == doctest::Approx(0.21645455575959163).epsilon(1e-10));

    // alpha2 enters only through the prefactor
    auto doubled = gclt::limit_constant(f, 0.75, 2.0, 2);
    CHECK(doubled.value ==
          doctest::Approx(lc.value * std::pow(2.0, -4.0 / 3.0)).epsilon(1e-12));
    CHECK(doubled.spectral_part == lc.spectral_part);
}

TEST_CASE("second moment of the limit field") {
    const Kernel k = Kernel::fbm(0.75);
    Rectangle full{0.0, 1.0, 0.0, 1.0};
    auto m2 = gclt::lambda_moment(k, {full}, {2}, 1, MomentMethod::Quadrature);
    CHECK(m2.value == doctest::Approx(0.5486871918038339).epsilon(1e-8));

    // independent route: (2 pi)^{-1/2} times the unmollified mean local time
    // equals the same integral computed by a different splitting
    double via_local =
        gclt::mean_intersection_local_time(k, 1, 1.0, 1.0, 0.0).value;
    CHECK(m2.value == doctest::Approx(via_local).epsilon(1e-8));

    // the sampled route must actually sample, not alias the quadrature
    auto mc = gclt::lambda_moment(k, {full}, {2}, 1, MomentMethod::MonteCarlo);
    CHECK(mc.value != m2.value);
    CHECK(mc.error > 0.0);
    CHECK(std::abs(mc.value - m2.value) <= 5 * mc.error + m2.error);
}

TEST_CASE("diagonal scaling of the second moment") {
    const Kernel k = Kernel::fbm(0.75);
    Rectangle unit{0.0, 1.0, 0.0, 1.0};
    Rectangle big{0.0, 2.0, 0.0, 2.0};
    auto a = gclt::lambda_moment(k, {unit}, {2}, 1, MomentMethod::Quadrature);
    auto b = gclt::lambda_moment(k, {big}, {2}, 1, MomentMethod::Quadrature);
    // scaling both time axes by c multiplies the k-pair moment by
    // c^{k(2 - Hd)}
    CHECK(b.value == doctest::Approx(std::pow(2.0, 1.25) * a.value).epsilon(1e-8));

    const Kernel s = Kernel::subfractional(0.6);
    auto sa = gclt::lambda_moment(s, {unit}, {2}, 1, MomentMethod::Quadrature);
    auto sb = gclt::lambda_moment(s, {big}, {2}, 1, MomentMethod::Quadrature);
    CHECK(sb.value == doctest::Approx(std::pow(2.0, 1.4) * sa.value).epsilon(1e-8));
}

TEST_CASE("odd powers vanish identically") {
    const Kernel k = Kernel::fbm(0.75);
    Rectangle full{0.0, 1.0, 0.0, 1.0};
    auto odd = gclt::lambda_moment(k, {full}, {3}, 1, MomentMethod::Quadrature);
    CHECK(odd.value == 0.0);
    CHECK(odd.error == 0.0);

    Rectangle other{0.0, 1.0, 1.5, 2.0};
    auto mixed = gclt::lambda_moment(k, {full, other}, {2, 1}, 1,
                                     MomentMethod::MonteCarlo);
    CHECK(mixed.value == 0.0);
}

TEST_CASE("fourth and sixth moments against sampled references") {
    const Kernel k = Kernel::fbm(0.75);
    Rectangle full{0.0, 1.0, 0.0, 1.0};
    auto m4 = gclt::lambda_moment(k, {full}, {4}, 1, MomentMethod::Quadrature);
    CHECK(m4.value == doctest::Approx(1.601036).epsilon(1e-3));

    MomentOptions mc;
    mc.mc_samples = 2000000;
    auto m4mc = gclt::lambda_moment(k, {full}, {4}, 1, MomentMethod::MonteCarlo,
                                    mc);
    CHECK(std::abs(m4mc.value - m4.value) < 5 * m4mc.error + m4.error);
    CHECK(m4mc.error > 0.0);
    CHECK(m4mc.error < 0.01);

    auto again = gclt::lambda_moment(k, {full}, {4}, 1, MomentMethod::MonteCarlo,
                                     mc);
    CHECK(again.value == m4mc.value);

    auto m6 = gclt::lambda_moment(k, {full}, {6}, 1, MomentMethod::Quadrature);
    CHECK(m6.value == doctest::Approx(10.312975).epsilon(5e-3));
    CHECK(std::abs(m6.value - 10.312975) <= m6.error + 0.01);
}

TEST_CASE("mixed moment over disjoint rectangles") {
    const Kernel k = Kernel::fbm(0.75);
    Rectangle e1{0.0, 0.4, 0.0, 0.5};
    Rectangle e2{0.6, 1.0, 0.7, 1.2};
    auto v = gclt::lambda_moment(k, {e1, e2}, {2, 2}, 1,
                                 MomentMethod::Quadrature);
    CHECK(v.value == doctest::Approx(0.01616453032723973).epsilon(5e-5));

    Rectangle overlap{0.3, 0.7, 0.3, 0.8};
    CHECK_THROWS_AS(gclt::lambda_moment(k, {e1, overlap}, {2, 2}, 1,
                                        MomentMethod::Quadrature),
                    std::domain_error);
}

TEST_CASE("order caps per method") {
    const Kernel k = Kernel::fbm(0.75);
    Rectangle full{0.0, 1.0, 0.0, 1.0};
    CHECK_THROWS_AS(
        gclt::lambda_moment(k, {full}, {10}, 1, MomentMethod::Quadrature),
        std::domain_error);
    CHECK_THROWS_AS(
        gclt::lambda_moment(k, {full}, {14}, 1, MomentMethod::MonteCarlo),
        std::domain_error);
    CHECK_THROWS_AS(gclt::lambda_moment(Kernel::fbm(0.7), {full}, {2}, 3,
                                        MomentMethod::Quadrature),
                    std::domain_error);
}

TEST_CASE("determinant stays above the nondeterminism bound") {
    const Kernel k = Kernel::fbm(0.75);
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        int kk = 1 + int(gen() % 3);
        std::vector<double> us(kk), vs(kk);
        for (auto& x : us) x = u(gen);
        for (auto& x : vs) x = u(gen);
        std::sort(us.begin(), us.end());
        std::sort(vs.begin(), vs.end());
        double ku = gclt::estimate_kappa(k, us, 0, 1).value;
        double kv = gclt::estimate_kappa(k, vs, 0, 1).value;
        double kappa = 0.999 * std::min(ku, kv);
        CHECK(gclt::det_lower_bound_check(k, us, vs, kappa, 1) >= 0.0);
    }
    std::vector<double> a{0.5}, b{0.25, 0.5};
    CHECK_THROWS_AS(gclt::det_lower_bound_check(k, a, b, 0.5, 1),
                    std::domain_error);
}

TEST_CASE("explicit growth bound dominates the computed moments") {
    const double kappa32 = 0.4754051861768541;
    const double b2 = gclt::moment_growth_bound(2, 1.0, 1.0, 0.75, 1, kappa32);
    const double b4 = gclt::moment_growth_bound(4, 1.0, 1.0, 0.75, 1, kappa32);
    const double b6 = gclt::moment_growth_bound(6, 1.0, 1.0, 0.75, 1, kappa32);
    CHECK(b2 == doctest::Approx(1.481215).epsilon(1e-5));
    CHECK(b4 == doctest::Approx(13.252576).epsilon(1e-5));
    CHECK(b6 == doctest::Approx(285.214146).epsilon(1e-5));
    CHECK(gclt::moment_growth_bound(8, 1.0, 1.0, 0.75, 1, kappa32) ==
          doctest::Approx(11005.806403).epsilon(1e-5));

    CHECK(b2 > 0.5486871918038339);
    CHECK(b4 > 1.601036);
    CHECK(b6 > 10.312975);

    // doubling t1 scales the n = 2k bound by exactly 2^{k(1 - Hd/2)}
    const double r4 = gclt::moment_growth_bound(4, 2.0, 1.0, 0.75, 1, kappa32);
    CHECK(r4 == doctest::Approx(b4 * std::pow(2.0, 1.25)).epsilon(1e-12));

    CHECK_THROWS_AS(gclt::moment_growth_bound(3, 1.0, 1.0, 0.75, 1, kappa32),
                    std::domain_error);
    CHECK_THROWS_AS(gclt::moment_growth_bound(4, 1.0, 1.0, 0.75, 1, 0.0),
                    std::domain_error);
}
