#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "gclt/report_io.hpp"

using gclt::Report;
using gclt::ReportFormat;
using gclt::ReportRow;
using nlohmann::json;

namespace {

Report sample_report() {
    Report rep;
    rep.experiment = "moment_ladder";
    rep.config_echo = {{"kernel", "fbm:H=0.75"}, {"n_paths", "20000"},
                       {"note", "a,b \"quoted\""}};
    ReportRow r1;
    r1.experiment = "moment_ladder";
    r1.quantity = "m2[n=64]";
    r1.empirical = 0.5612345678901234;
    r1.se = 0.0123;
    r1.theoretical = 0.5609;
    r1.zscore = 0.027;
    r1.verdict = "pass";
    ReportRow r2;
    r2.experiment = "moment_ladder";
    r2.quantity = "m4[n=64]";
    r2.empirical = 1.0 / 3.0;
    r2.se = 1e-300;
    r2.theoretical = 0.0;
    r2.zscore = -4.2;
    r2.verdict = "fail";
    rep.rows = {r1, r2};
    rep.all_pass = false;
    return rep;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("json output parses and round-trips every field") {
    Report rep = sample_report();
    std::string text = gclt::report_to_json(rep);
    json j = json::parse(text);

    CHECK(j["experiment"] == "moment_ladder");
    CHECK(j["config"]["kernel"] == "fbm:H=0.75");
    CHECK(j["config"]["n_paths"] == "20000");
    CHECK(j["config"]["note"] == "a,b \"quoted\"");
    CHECK(j["all_pass"] == false);

    REQUIRE(j["rows"].size() == 2);
    const json& a = j["rows"][0];
    CHECK(a["quantity"] == "m2[n=64]");
    // %.17g preserves doubles exactly through a parse
    CHECK(a["empirical"].get<double>() == 0.5612345678901234);
    CHECK(a["se"].get<double>() == 0.0123);
    CHECK(a["theoretical"].get<double>() == 0.5609);
    CHECK(a["verdict"] == "pass");
    const json& b = j["rows"][1];
    CHECK(b["empirical"].get<double>() == 1.0 / 3.0);
    CHECK(b["se"].get<double>() == 1e-300);
    CHECK(b["zscore"].get<double>() == -4.2);
    CHECK(b["verdict"] == "fail");

    // config keys keep insertion order
    CHECK(text.find("\"kernel\"") < text.find("\"n_paths\""));
    CHECK(text.find("\"n_paths\"") < text.find("\"note\""));
}

TEST_CASE("json escapes awkward strings") {
    Report rep;
    rep.experiment = "esc";
    ReportRow r;
    r.experiment = "esc";
    r.quantity = "line\nbreak\ttab \"q\" back\\slash \x01";
    r.verdict = "info";
    rep.rows = {r};
    json j = json::parse(gclt::report_to_json(rep));
    CHECK(j["rows"][0]["quantity"] ==
          "line\nbreak\ttab \"q\" back\\slash \x01");
}

TEST_CASE("non-finite values serialize as quoted strings") {
    Report rep;
    rep.experiment = "nf";
    ReportRow r;
    r.experiment = "nf";
    r.quantity = "q";
    r.empirical = std::numeric_limits<double>::quiet_NaN();
    r.se = std::numeric_limits<double>::infinity();
    r.theoretical = -std::numeric_limits<double>::infinity();
    r.verdict = "info";
    rep.rows = {r};
    json j = json::parse(gclt::report_to_json(rep));
    CHECK(j["rows"][0]["empirical"] == "nan");
    CHECK(j["rows"][0]["se"] == "inf");
    CHECK(j["rows"][0]["theoretical"] == "-inf");
}

TEST_CASE("empty report") {
    Report rep;
    rep.experiment = "empty";
    json j = json::parse(gclt::report_to_json(rep));
    CHECK(j["rows"].is_array());
    CHECK(j["rows"].empty());
    CHECK(j["config"].is_object());
    CHECK(j["all_pass"] == true);
    CHECK(gclt::report_to_csv(rep) ==
          "experiment,quantity,empirical,se,theoretical,zscore,verdict\n");
}

TEST_CASE("csv layout and quoting") {
    Report rep = sample_report();
    std::string text = gclt::report_to_csv(rep);

    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "experiment,quantity,empirical,se,theoretical,zscore,verdict");

    char expect[256];
    std::snprintf(expect, sizeof expect,
                  "moment_ladder,m2[n=64],%.17g,%.17g,%.17g,%.17g,pass",
                  0.5612345678901234, 0.0123, 0.5609, 0.027);
    CHECK(lines[1] == expect);

    // numeric fields survive a strtod round trip exactly
    std::size_t start = lines[2].rfind(",fail");
    REQUIRE(start != std::string::npos);
    std::size_t from = std::string("moment_ladder,m4[n=64],").size();
    std::istringstream nums(lines[2].substr(from, start - from));
    std::string tok;
    std::vector<double> parsed;
    while (std::getline(nums, tok, ',')) parsed.push_back(std::strtod(tok.c_str(), nullptr));
    REQUIRE(parsed.size() == 4);
    CHECK(parsed[0] == 1.0 / 3.0);
    CHECK(parsed[1] == 1e-300);
    CHECK(parsed[2] == 0.0);
    CHECK(parsed[3] == -4.2);

    Report quoted;
    quoted.experiment = "q";
    ReportRow r;
    r.experiment = "a,b";
    r.quantity = "say \"hi\"";
    r.verdict = "info";
    quoted.rows = {r};
    std::string line = gclt::report_to_csv(quoted);
    CHECK(line.find("\"a,b\",") != std::string::npos);
    CHECK(line.find("\"say \"\"hi\"\"\"") != std::string::npos);
}

TEST_CASE("emit_report writes the serialized bytes") {
    Report rep = sample_report();
    auto dir = std::filesystem::temp_directory_path();
    auto jpath = dir / "gclt_report_io_test.json";
    auto cpath = dir / "gclt_report_io_test.csv";

    gclt::emit_report(rep, jpath.string(), ReportFormat::Json);
    CHECK(slurp(jpath) == gclt::report_to_json(rep));
    gclt::emit_report(rep, cpath.string(), ReportFormat::Csv);
    CHECK(slurp(cpath) == gclt::report_to_csv(rep));

    // rewriting is byte-identical
    std::string first = slurp(jpath);
    gclt::emit_report(rep, jpath.string(), ReportFormat::Json);
    CHECK(slurp(jpath) == first);

    std::filesystem::remove(jpath);
    std::filesystem::remove(cpath);

    CHECK_THROWS_AS(gclt::emit_report(rep, "/nonexistent_dir_zz/x.json",
                                      ReportFormat::Json),
                    std::runtime_error);
}
