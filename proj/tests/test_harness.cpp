#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "gclt/harness.hpp"
#include "gclt/statistics.hpp"

using gclt::ExperimentConfig;
using gclt::Rectangle;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.n_ladder = {2.0, 8.0};
    c.resolution = 48;
    c.n_paths = 10000;
    c.epsilons = {0.3};
    c.seed = 3;
    return c;
}

} // namespace

TEST_CASE("config helpers and echo") {
    ExperimentConfig c;
    CHECK(c.kernel().spec() == "fbm:H=0.75");
    CHECK(c.f().spec() == "gdiff:sa=1,sb=2");
    CHECK(c.hurst() == 0.75);
    CHECK(c.mixture_epsilon() == 0.1);

    auto echo = c.echo();
    REQUIRE(echo.size() == 11);
    CHECK(echo[0] == std::pair<std::string, std::string>{"kernel", "fbm:H=0.75"});
    CHECK(echo[3] == std::pair<std::string, std::string>{"n_ladder", "4,16,64"});
    // epsilons echo in the same %.17g round-trip form the report writer uses
    char e0[40], e1[40];
    std::snprintf(e0, sizeof e0, "%.17g", 0.2);
    std::snprintf(e1, sizeof e1, "%.17g", 0.1);
    CHECK(echo[8] == std::pair<std::string, std::string>{
                         "epsilons", std::string(e0) + "," + e1});
    CHECK(echo[9] == std::pair<std::string, std::string>{"seed", "1"});
}

TEST_CASE("config validation") {
    ExperimentConfig c;
    c.validate(true, 4);
    c.n_paths = 10000;
    c.validate(true, 6);

    ExperimentConfig bad = c;
    bad.kernel_spec = "fbm:H=0.6"; // inside the local-time regime only
    CHECK_THROWS_AS(bad.validate(true, 2), std::domain_error);
    bad.validate(false, 2);

    bad = c;
    bad.resolution = 4096;
    CHECK_THROWS_AS(bad.validate(false, 2), std::domain_error);
    bad.resolution = 1;
    CHECK_THROWS_AS(bad.validate(false, 2), std::domain_error);

    bad = c;
    bad.n_ladder = {4.0, 4.0};
    CHECK_THROWS_AS(bad.validate(true, 2), std::domain_error);
    bad.n_ladder.clear();
    CHECK_THROWS_AS(bad.validate(true, 2), std::domain_error);

    bad = c;
    bad.epsilons = {0.1, -0.2};
    CHECK_THROWS_AS(bad.validate(true, 2), std::domain_error);
    bad.epsilons.clear();
    CHECK_THROWS_AS(bad.validate(true, 2), std::domain_error);
    CHECK_THROWS_AS(bad.mixture_epsilon(), std::domain_error);

    bad = c;
    bad.t1 = 0.0;
    CHECK_THROWS_AS(bad.validate(true, 2), std::domain_error);

    bad = c;
    bad.n_paths = 9999;
    CHECK_THROWS_AS(bad.validate(true, 6), std::domain_error);
    bad.validate(true, 4);
}

TEST_CASE("mixture reference sample") {
    ExperimentConfig c;
    c.resolution = 32;
    c.n_paths = 2000;
    c.epsilons = {0.2};
    c.seed = 21;

    auto ref = gclt::sample_mixture_reference(c, 1.0);
    REQUIRE(ref.values.size() == 2000);
    CHECK(ref.epsilon == 0.2);
    // E[I_eps] - E[I], both by quadrature
    CHECK(ref.mean_bias ==
          doctest::Approx(-0.042053997172677).epsilon(1e-5));

    for (double v : ref.values) CHECK(std::isfinite(v));

    // symmetric around zero, second moment matches E[I_eps] (d_value = 1)
    auto m1 = gclt::mean_se(ref.values);
    CHECK(std::abs(m1.mean) < 5 * m1.se);
    auto m2 = gclt::raw_moment_se(ref.values, 2);
    CHECK(std::abs(m2.mean - 0.506633194631157) < 5 * m2.se + 0.01);

    auto again = gclt::sample_mixture_reference(c, 1.0);
    CHECK(again.values == ref.values);

    auto twice = gclt::sample_mixture_reference(c, 1.0, 2.0);
    REQUIRE(twice.values.size() == ref.values.size());
    for (std::size_t p = 0; p < ref.values.size(); ++p)
        CHECK(twice.values[p] == 2.0 * ref.values[p]);
}

TEST_CASE("clt experiment structure") {
    ExperimentConfig c = small_config();
    auto rep = gclt::run_clt_experiment(c);

    CHECK(rep.experiment == "clt");
    CHECK(rep.limit_constant_value ==
          doctest::Approx(1.0222918389986193).epsilon(1e-10));
    CHECK(rep.lambda_m2 == doctest::Approx(0.5486871918922582).epsilon(1e-12));
    CHECK(rep.lambda_m4 == doctest::Approx(1.600865722707538).epsilon(1e-12));
    CHECK(rep.lambda_m6 == doctest::Approx(10.29661327920522).epsilon(1e-12));

    REQUIRE(rep.entries.size() == 12);
    for (int i = 0; i < 12; ++i) {
        const auto& e = rep.entries[i];
        CHECK(e.n_scale == (i < 6 ? 2.0 : 8.0));
        CHECK(e.order == 1 + i % 6);
        CHECK(std::isfinite(e.empirical));
        CHECK(e.se > 0.0);
        if (e.order % 2 == 1) CHECK(e.theoretical == 0.0);
        if (i < 6) {
            CHECK(e.verdict == "info");
        } else if (e.order == 6) {
            CHECK(e.verdict == "info");
        } else {
            CHECK((e.verdict == "pass" || e.verdict == "fail"));
        }
        CHECK(e.zscore == (e.empirical - e.theoretical) / e.se);
    }
    const auto& top2 = rep.entries[7];
    CHECK(top2.order == 2);
    CHECK(top2.theoretical == rep.limit_constant_value * rep.lambda_m2);

    double dev_lo = std::abs(rep.entries[1].empirical - top2.theoretical);
    double dev_hi = std::abs(top2.empirical - top2.theoretical);
    CHECK(rep.monotone_m2 == (dev_hi <= dev_lo + 1e-12));

    CHECK(rep.has_ks);
    CHECK(rep.ks_statistic > 0.0);
    CHECK(rep.ks_statistic <= 1.0);
    CHECK(rep.ks_p_value >= 0.0);
    CHECK(rep.ks_p_value <= 1.0);
    CHECK(rep.mixture_epsilon == 0.3);
    CHECK(rep.mixture_mean_bias < 0.0);
    CHECK(rep.mixture_mean_bias > -0.2);

    bool any_fail = false;
    for (const auto& e : rep.entries) any_fail |= e.verdict == "fail";
    CHECK(rep.all_pass == (!any_fail && rep.monotone_m2));

    auto out = rep.report();
    CHECK(out.experiment == "clt");
    CHECK(out.config_echo == c.echo());
    REQUIRE(out.rows.size() == 21);
    bool saw_top = false, saw_mono = false;
    for (const auto& r : out.rows) {
        if (r.quantity == "order2_n8") {
            saw_top = true;
            CHECK(r.empirical == top2.empirical);
            CHECK(r.verdict == top2.verdict);
        }
        if (r.quantity == "monotone_m2") {
            saw_mono = true;
            CHECK(r.verdict == (rep.monotone_m2 ? "pass" : "fail"));
        }
    }
    CHECK(saw_top);
    CHECK(saw_mono);
    CHECK(out.all_pass == rep.all_pass);
}

TEST_CASE("increment experiment") {
    ExperimentConfig c;
    c.n_ladder = {4.0};
    c.resolution = 32;
    c.n_paths = 2000;
    c.epsilons = {0.2};
    c.seed = 5;

    Rectangle low{0.0, 0.5, 0.0, 0.5};
    auto rep = gclt::run_increment_experiment(c, {low}, {2});
    CHECK(rep.experiment == "increment");
    REQUIRE(rep.entries.size() == 1);
    const auto& e = rep.entries[0];
    CHECK(e.n_scale == 4.0);
    CHECK(e.order == 2);
    CHECK(rep.lambda_m2 > 0.0);
    CHECK(e.theoretical == rep.limit_constant_value * rep.lambda_m2);
    CHECK(std::isfinite(e.empirical));
    CHECK(e.se > 0.0);
    CHECK(rep.all_pass == (e.verdict == "pass"));

    auto again = gclt::run_increment_experiment(c, {low}, {2});
    CHECK(again.entries[0].empirical == e.empirical);
    CHECK(again.entries[0].se == e.se);

    ExperimentConfig other = c;
    other.seed = 6;
    auto moved = gclt::run_increment_experiment(other, {low}, {2});
    CHECK(moved.entries[0].empirical != e.empirical);

    Rectangle high{0.5, 1.0, 0.5, 1.0};
    auto mixed = gclt::run_increment_experiment(c, {low, high}, {2, 2});
    REQUIRE(mixed.entries.size() == 1);
    CHECK(mixed.entries[0].order == 4);
    CHECK(mixed.lambda_m4 > 0.0);
    CHECK(mixed.entries[0].theoretical ==
          doctest::Approx(rep.limit_constant_value * rep.limit_constant_value *
                          mixed.lambda_m4)
              .epsilon(1e-14));

    CHECK_THROWS_AS(gclt::run_increment_experiment(c, {low}, {}),
                    std::domain_error);
    CHECK_THROWS_AS(gclt::run_increment_experiment(c, {low}, {0}),
                    std::domain_error);
    CHECK_THROWS_AS(gclt::run_increment_experiment(c, {low, high}, {4, 4}),
                    std::domain_error);
    Rectangle overlap{0.25, 0.75, 0.25, 0.75};
    CHECK_THROWS_AS(gclt::run_increment_experiment(c, {low, overlap}, {1, 1}),
                    std::domain_error);
    Rectangle off_grid{0.0, 0.3, 0.0, 0.5};
    CHECK_THROWS_AS(gclt::run_increment_experiment(c, {off_grid}, {2}),
                    std::invalid_argument);
}

TEST_CASE("tightness scan") {
    ExperimentConfig c;
    c.n_ladder = {4.0};
    c.resolution = 64;
    c.n_paths = 3000;
    c.epsilons = {0.2};
    c.seed = 13;
    std::vector<double> gaps{0.25, 0.125, 0.0625};

    auto rep = gclt::run_tightness_scan(c, gaps);
    REQUIRE(rep.rows.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(rep.rows[i].gap == gaps[i / 2]);
        CHECK(rep.rows[i].m == int(1 + i % 2));
        CHECK(rep.rows[i].moment > 0.0);
        CHECK(rep.rows[i].se > 0.0);
    }
    // second moment of the corner increment shrinks with the gap
    CHECK(rep.rows[0].moment > rep.rows[2].moment);
    CHECK(rep.rows[2].moment > rep.rows[4].moment);

    CHECK(rep.threshold_m1 == 0.625);
    CHECK(rep.threshold_m2 == 1.25);
    CHECK(rep.fit_m1.slope > 0.8);
    CHECK(rep.fit_m2.slope > 1.6);
    CHECK(rep.fit_m1.slope_se > 0.0);
    // scaling f by 2 multiplies the squared increment by exactly 4
    CHECK(rep.amplitude_ratio_error < 1e-12);
    CHECK(rep.pass);

    auto out = rep.report();
    CHECK(out.experiment == "tightness");
    CHECK(out.rows.size() == 9);
    CHECK(out.all_pass == rep.pass);

    ExperimentConfig tiny = c;
    tiny.n_paths = 50;
    std::vector<double> two{0.25, 0.125};
    CHECK_THROWS_AS(gclt::run_tightness_scan(tiny, two), std::domain_error);
    std::vector<double> huge{1.5, 0.25, 0.125};
    CHECK_THROWS_AS(gclt::run_tightness_scan(tiny, huge), std::domain_error);
    std::vector<double> neg{0.25, 0.125, -0.0625};
    CHECK_THROWS_AS(gclt::run_tightness_scan(tiny, neg), std::domain_error);
    std::vector<double> off{0.3, 0.25, 0.125};
    CHECK_THROWS_AS(gclt::run_tightness_scan(tiny, off), std::invalid_argument);
}

TEST_CASE("ks gate") {
    ExperimentConfig c;
    c.n_ladder = {4.0};
    c.resolution = 48;
    c.n_paths = 5000;
    c.epsilons = {0.25};
    c.seed = 11;

    auto rep = gclt::run_ks_test(c);
    CHECK(rep.statistic > 0.0);
    CHECK(rep.statistic < 1.0);
    CHECK(rep.p_value >= 0.0);
    CHECK(rep.p_value <= 1.0);
    CHECK(rep.pass == (rep.p_value > 0.01));
    // the deliberately wrong-variance reference must separate much harder
    CHECK(rep.statistic_power > rep.statistic);
    CHECK(rep.p_value_power < 1e-6);

    auto out = rep.report();
    CHECK(out.experiment == "ks");
    REQUIRE(out.rows.size() == 4);
    CHECK(out.all_pass == (rep.pass && rep.p_value_power < 0.01));

    ExperimentConfig thin = c;
    thin.n_paths = 4999;
    CHECK_THROWS_AS(gclt::run_ks_test(thin), std::domain_error);
}
