#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gclt/kernels.hpp"
#include "gclt/sampling.hpp"

#ifndef GCLT_BIN
#error "GCLT_BIN must name the CLI binary"
#endif

using nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    RunResult r;
    std::string cmd = std::string(GCLT_BIN) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("help and parse failures") {
    auto help = run_cli("--help");
    CHECK(help.code == 0);
    CHECK(help.out.find("simulate") != std::string::npos);
    CHECK(help.out.find("clt-check") != std::string::npos);
    CHECK(help.out.find("tightness") != std::string::npos);

    CHECK(run_cli("").code == 1);                          // subcommand required
    CHECK(run_cli("constant").code == 1);                  // --seed required
    CHECK(run_cli("constant --seed 1 --bogus 2").code == 1);
    CHECK(run_cli("constant --seed 1 --kernel foo:x=1").code == 1);
    CHECK(run_cli("constant --seed 1 --kernel fbm:H=1.5").code == 1);
}

TEST_CASE("constant subcommand") {
    auto r = run_cli("constant --seed 1");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["value"].get<double>() ==
          doctest::Approx(1.0222918389986193).epsilon(1e-9));
    CHECK(j["prefactor"].get<double>() ==
          doctest::Approx(2.8660376553793048).epsilon(1e-12));
    CHECK(j["spectral_integral"].get<double>() ==
          doctest::Approx(0.12445464480850519608).epsilon(1e-9));
    CHECK(j["error_estimate"].get<double>() >= 0.0);

    auto out_path = temp_file("gclt_cli_constant.json");
    auto first = run_cli("constant --seed 1 --N 1 --out " + out_path.string());
    REQUIRE(first.code == 0);
    json j1 = json::parse(first.out);
    CHECK(j1["value"].get<double>() ==
          doctest::Approx(0.21645455575959163).epsilon(1e-9));
    CHECK(slurp(out_path) == first.out);
    std::filesystem::remove(out_path);
}

TEST_CASE("simulate dumps a loadable ensemble") {
    auto out_path = temp_file("gclt_cli_simulate.bin");
    auto r = run_cli("simulate --kernel subfbm:H=0.6 --t 2 --steps 16 --d 2 "
                     "--paths 3 --seed 9 --out " + out_path.string());
    REQUIRE(r.code == 0);
    // the tool echoes the canonical round-trip spec, not the input text
    const std::string canon = gclt::Kernel::subfractional(0.6).spec();
    json j = json::parse(r.out);
    CHECK(j["kernel"] == canon);
    CHECK(j["steps"] == 16);
    CHECK(j["paths"] == 3);

    gclt::PathEnsemble loaded = gclt::read_ensemble(out_path.string());
    CHECK(loaded.kernel.spec() == canon);
    CHECK(loaded.n_paths == 3);
    CHECK(loaded.dim == 2);
    CHECK(loaded.grid.n_steps() == 16);

    gclt::PathEnsemble direct = gclt::sample_ensemble(
        gclt::Kernel::parse("subfbm:H=0.6"), gclt::TimeGrid(2.0, 16), 2, 3, 9, 0);
    CHECK(loaded.data == direct.data);
    std::filesystem::remove(out_path);
}

TEST_CASE("hypothesis diagnostics subcommand") {
    auto r = run_cli("check-hypotheses --seed 1");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["pass"] == true);
    CHECK(j["kernel"] == "fbm:H=0.75");
    CHECK(j["kappa"].get<double>() ==
          doctest::Approx(0.4845270170985226).epsilon(1e-9));
    CHECK(j["kappa_singular"] == false);
    CHECK(j["alpha2_candidate"].get<double>() == 1.0);
    CHECK(j["alpha2_envelope"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(j["envelope_monotone"] == true);
    REQUIRE(j["beta"].size() == 4);
    double prev = 1e300;
    for (const auto& row : j["beta"]) {
        CHECK(row["beta"].get<double>() <= prev);
        prev = row["beta"].get<double>();
        CHECK(row["accepted"].get<long long>() > 0);
    }
}

TEST_CASE("moments subcommand writes the chosen format") {
    auto jpath = temp_file("gclt_cli_moments.json");
    std::string base = "moments --rect 0,0.5,0,0.5 --m 2 --n-ladder 4 "
                       "--resolution 32 --paths 2000 --seed 5";
    auto r = run_cli(base + " --out " + jpath.string());
    REQUIRE((r.code == 0 || r.code == 2));
    json j = json::parse(slurp(jpath));
    CHECK(j["experiment"] == "increment");
    CHECK(j["config"]["kernel"] == "fbm:H=0.75");
    CHECK((j["all_pass"] == (r.code == 0)));
    bool saw = false;
    for (const auto& row : j["rows"])
        if (row["quantity"] == "order2_n4") saw = true;
    CHECK(saw);
    CHECK(r.out.find(r.code == 0 ? "PASS" : "FAIL") != std::string::npos);
    std::filesystem::remove(jpath);

    auto cpath = temp_file("gclt_cli_moments.csv");
    auto rc = run_cli(base + " --out " + cpath.string());
    REQUIRE((rc.code == 0 || rc.code == 2));
    std::string csv = slurp(cpath);
    CHECK(csv.rfind("experiment,quantity,empirical,se,theoretical,zscore,verdict\n",
                    0) == 0);
    std::filesystem::remove(cpath);

    CHECK(run_cli(base + " --rect 0,0.5,0").code == 1);
    CHECK(run_cli("moments --rect 0,zz,0,0.5 --m 2 --seed 5").code == 1);
    CHECK(run_cli(base + " --out /nonexistent_dir_zz/m.json").code == 1);
}

TEST_CASE("tightness subcommand") {
    auto jpath = temp_file("gclt_cli_tightness.json");
    auto r = run_cli("tightness --gaps 0.25,0.125,0.0625 --n-ladder 4 "
                     "--resolution 64 --paths 500 --seed 13 --out " +
                     jpath.string());
    REQUIRE((r.code == 0 || r.code == 2));
    json j = json::parse(slurp(jpath));
    CHECK(j["experiment"] == "tightness");
    CHECK((j["all_pass"] == (r.code == 0)));
    std::filesystem::remove(jpath);
}

TEST_CASE("config file with command-line precedence") {
    auto toml = temp_file("gclt_cli_config.toml");
    {
        std::ofstream out(toml);
        out << "[constant]\nseed = 7\nN = 1\n";
    }
    auto r = run_cli("constant --config " + toml.string());
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["value"].get<double>() ==
          doctest::Approx(0.21645455575959163).epsilon(1e-9));

    // flags win over the file
    auto over = run_cli("constant --config " + toml.string() + " --N 2");
    REQUIRE(over.code == 0);
    CHECK(json::parse(over.out)["value"].get<double>() ==
          doctest::Approx(1.0222918389986193).epsilon(1e-9));
    std::filesystem::remove(toml);

    auto jconf = temp_file("gclt_cli_config.json");
    {
        std::ofstream out(jconf);
        out << "{\"constant\": {\"seed\": 7, \"N\": 1}}\n";
    }
    auto rj = run_cli("constant --config " + jconf.string());
    REQUIRE(rj.code == 0);
    CHECK(json::parse(rj.out)["value"].get<double>() ==
          doctest::Approx(0.21645455575959163).epsilon(1e-9));
    std::filesystem::remove(jconf);

    auto bad = temp_file("gclt_cli_config_bad.json");
    {
        std::ofstream out(bad);
        out << "[1, 2]\n";
    }
    CHECK(run_cli("constant --seed 1 --config " + bad.string()).code == 1);
    std::filesystem::remove(bad);

    auto stray = temp_file("gclt_cli_config_stray.json");
    {
        std::ofstream out(stray);
        out << "{\"constant\": {\"seed\": 1}, \"bogus_key\": 3}\n";
    }
    CHECK(run_cli("constant --config " + stray.string()).code == 1);
    std::filesystem::remove(stray);
}
