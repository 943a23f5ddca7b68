// Command-line front end: simulate | check-hypotheses | constant | moments |
// clt-check | tightness | ks.  Exit codes: 0 all verdicts pass, 2 statistical
// failure, 1 error.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gclt/analytics.hpp"
#include "gclt/harness.hpp"
#include "gclt/hypotheses.hpp"
#include "gclt/report_io.hpp"
#include "gclt/sampling.hpp"

namespace {

using gclt::ExperimentConfig;

// Accepts the TOML/INI format CLI11 ships with, or a JSON object when the
// file starts with '{'.  JSON nesting mirrors config sections: keys at the
// top level are global options, an object per subcommand holds its options.
// Command-line flags always take precedence over file values.
class ConfigTomlOrJson : public CLI::ConfigTOML {
  public:
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        std::stringstream buffer;
        buffer << input.rdbuf();
        const std::string text = buffer.str();
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first == std::string::npos || text[first] != '{') {
            std::istringstream toml(text);
            return CLI::ConfigTOML::from_config(toml);
        }
        std::vector<CLI::ConfigItem> items;
        walk(nlohmann::json::parse(text), {}, items);
        return items;
    }

  private:
    static std::string scalar(const nlohmann::json& v) {
        return v.is_string() ? v.get<std::string>() : v.dump();
    }

    static void walk(const nlohmann::json& node, std::vector<std::string> parents,
                     std::vector<CLI::ConfigItem>& items) {
        if (!node.is_object())
            throw CLI::ConfigError("config JSON root must be an object");
        for (const auto& [key, value] : node.items()) {
            if (value.is_object()) {
                auto deeper = parents;
                deeper.push_back(key);
                walk(value, std::move(deeper), items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array())
                for (const auto& elem : value) item.inputs.push_back(scalar(elem));
            else
                item.inputs.push_back(scalar(value));
            items.push_back(std::move(item));
        }
    }
};

void add_config_options(CLI::App* cmd, ExperimentConfig& config) {
    cmd->add_option("--kernel", config.kernel_spec, "Kernel spec, e.g. fbm:H=0.75");
    cmd->add_option("--f", config.f_spec, "Test function spec, e.g. gdiff:sa=1.0,sb=2.0");
    cmd->add_option("--d", config.dim, "Spatial dimension");
    cmd->add_option("--n-ladder", config.n_ladder, "Scaling parameters, ascending")
        ->delimiter(',');
    cmd->add_option("--t1", config.t1, "First time horizon");
    cmd->add_option("--t2", config.t2, "Second time horizon");
    cmd->add_option("--resolution", config.resolution, "Grid points per axis");
    cmd->add_option("--paths", config.n_paths, "Monte Carlo path count");
    cmd->add_option("--epsilons", config.epsilons,
                    "Mollification widths; the smallest feeds the mixture reference")
        ->delimiter(',');
    cmd->add_option("--seed", config.seed, "RNG seed (recorded in reports)")->required();
    cmd->add_option("--out", config.output_path,
                    "Report file; .csv extension selects CSV, anything else JSON");
}

void print_report(const gclt::Report& report) {
    for (const auto& row : report.rows) {
        std::printf("  %-22s empirical=% .6g se=%.3g target=% .6g z=% .2f  %s\n",
                    row.quantity.c_str(), row.empirical, row.se, row.theoretical,
                    row.zscore, row.verdict.c_str());
    }
    std::printf("%s\n", report.all_pass ? "PASS" : "FAIL");
}

int finish(const gclt::Report& report, const std::string& out_path) {
    if (!out_path.empty()) {
        const bool csv = out_path.size() >= 4 &&
                         out_path.compare(out_path.size() - 4, 4, ".csv") == 0;
        gclt::emit_report(report, out_path,
                          csv ? gclt::ReportFormat::Csv : gclt::ReportFormat::Json);
    }
    print_report(report);
    return report.all_pass ? 0 : 2;
}

gclt::Rectangle parse_rect(const std::string& text) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        std::size_t used = 0;
        vals.push_back(std::stod(piece, &used));
        if (used != piece.size())
            throw std::invalid_argument("bad rectangle coordinate: " + piece);
    }
    if (vals.size() != 4)
        throw std::invalid_argument("rectangle needs a1,b1,a2,b2: " + text);
    return {vals[0], vals[1], vals[2], vals[3]};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Additive-functional limit experiments for self-similar Gaussian pairs"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML or JSON config file (flags take precedence)");
    app.config_formatter(std::make_shared<ConfigTomlOrJson>());
    app.allow_config_extras(CLI::config_extras_mode::error);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Sample a path ensemble and dump it");
    std::string sim_kernel = "fbm:H=0.75", sim_out;
    double sim_t = 1.0;
    int sim_steps = 128, sim_d = 1, sim_paths = 100;
    std::uint64_t sim_seed = 0;
    std::uint32_t sim_pair = 0;
    sim->add_option("--kernel", sim_kernel, "Kernel spec");
    sim->add_option("--t", sim_t, "Time horizon");
    sim->add_option("--steps", sim_steps, "Grid points");
    sim->add_option("--d", sim_d, "Components per path");
    sim->add_option("--paths", sim_paths, "Path count");
    sim->add_option("--pair-index", sim_pair, "Independent copy index (0 or 1)");
    sim->add_option("--seed", sim_seed, "RNG seed")->required();
    sim->add_option("--out", sim_out, "Output dump path")->required();

    // check-hypotheses
    auto* hyp = app.add_subcommand("check-hypotheses",
                                   "Nondeterminism, variance envelope, and "
                                   "increment-correlation diagnostics");
    std::string hyp_kernel = "fbm:H=0.75", hyp_out;
    std::uint64_t hyp_seed = 0;
    hyp->add_option("--kernel", hyp_kernel, "Kernel spec");
    hyp->add_option("--seed", hyp_seed, "RNG seed")->required();
    hyp->add_option("--out", hyp_out, "JSON report path");

    // constant
    auto* con = app.add_subcommand("constant", "Limit constant and its factors");
    std::string con_kernel = "fbm:H=0.75", con_f = "gdiff:sa=1.0,sb=2.0", con_out;
    int con_d = 1, con_n = 2;
    std::uint64_t con_seed = 0;
    con->add_option("--kernel", con_kernel, "Kernel spec");
    con->add_option("--f", con_f, "Test function spec");
    con->add_option("--d", con_d, "Spatial dimension");
    con->add_option("--N", con_n, "Copy count (2 for the second-order limit)");
    con->add_option("--seed", con_seed, "RNG seed (recorded only)")->required();
    con->add_option("--out", con_out, "Also write the JSON to this path");

    // moments
    ExperimentConfig mom_config;
    std::vector<std::string> mom_rects;
    std::vector<int> mom_m;
    auto* mom = app.add_subcommand("moments", "Mixed rectangle-increment moments");
    add_config_options(mom, mom_config);
    mom->add_option("--rect", mom_rects, "Rectangle a1,b1,a2,b2 (repeatable)")
        ->required();
    mom->add_option("--m", mom_m, "Moment exponents, one per rectangle")
        ->delimiter(',')
        ->required();

    // clt-check
    ExperimentConfig clt_config;
    auto* clt = app.add_subcommand("clt-check",
                                   "Moments of the normalized functional "
                                   "against the limit law");
    add_config_options(clt, clt_config);

    // tightness
    ExperimentConfig tight_config;
    std::vector<double> tight_gaps;
    auto* tight = app.add_subcommand("tightness", "Increment-moment scaling exponents");
    add_config_options(tight, tight_config);
    tight->add_option("--gaps", tight_gaps, "Gap ladder (descending)")->delimiter(',');

    // ks
    ExperimentConfig ks_config;
    auto* ks = app.add_subcommand("ks", "Two-sample test against the mixture reference");
    add_config_options(ks, ks_config);

    // --config is a top-level flag; let it be written after the subcommand too
    for (CLI::App* sub : app.get_subcommands(std::function<bool(CLI::App*)>{}))
        sub->fallthrough();

    try {
        app.parse(argc, argv);

        if (sim->parsed()) {
            gclt::Kernel kernel = gclt::Kernel::parse(sim_kernel);
            gclt::TimeGrid grid(sim_t, sim_steps);
            gclt::PathEnsemble ens =
                gclt::sample_ensemble(kernel, grid, sim_d, sim_paths, sim_seed, sim_pair);
            gclt::write_ensemble(ens, sim_out);
            std::printf("{\"kernel\": \"%s\", \"t\": %g, \"steps\": %d, \"d\": %d, "
                        "\"paths\": %d, \"seed\": %llu, \"out\": \"%s\"}\n",
                        kernel.spec().c_str(), sim_t, sim_steps, sim_d, sim_paths,
                        static_cast<unsigned long long>(sim_seed), sim_out.c_str());
            return 0;
        }

        if (hyp->parsed()) {
            gclt::Kernel kernel = gclt::Kernel::parse(hyp_kernel);
            gclt::HypothesisDiagnostics diag =
                gclt::run_hypothesis_diagnostics(kernel, hyp_seed);
            nlohmann::json j;
            j["kernel"] = kernel.spec();
            j["seed"] = hyp_seed;
            j["kappa"] = diag.kappa.value;
            j["kappa_sampled_min"] = diag.kappa.sampled_min;
            j["kappa_singular"] = diag.kappa.singular;
            j["alpha2_candidate"] = diag.alpha2_candidate;
            j["alpha2_envelope"] = diag.h2.alpha2;
            j["envelope_monotone"] = diag.h2.monotone;
            auto& env = j["envelope"] = nlohmann::json::array();
            for (const auto& row : diag.h2.envelope)
                env.push_back({{"ratio", row.ratio}, {"deviation", row.deviation}});
            auto& betas = j["beta"] = nlohmann::json::array();
            for (const auto& row : diag.beta_table)
                betas.push_back({{"gamma", row.gamma},
                                 {"beta", row.beta},
                                 {"accepted", row.accepted}});
            j["pass"] = diag.pass;
            const std::string text = j.dump(2) + "\n";
            if (!hyp_out.empty()) {
                std::ofstream out(hyp_out, std::ios::binary | std::ios::trunc);
                if (!out) throw std::runtime_error("cannot open " + hyp_out);
                out << text;
            }
            std::fputs(text.c_str(), stdout);
            return diag.pass ? 0 : 2;
        }

        if (con->parsed()) {
            gclt::Kernel kernel = gclt::Kernel::parse(con_kernel);
            gclt::TestFunction f = gclt::TestFunction::parse(con_f, con_d);
            gclt::LimitConstant lc = gclt::limit_constant(
                f, kernel.hurst(), kernel.alpha2_candidate(), con_n);
            nlohmann::json j;
            j["prefactor"] = gclt::prefactor(kernel.hurst(), kernel.alpha2_candidate());
            j["spectral_integral"] = lc.spectral_part;
            j["value"] = lc.value;
            j["error_estimate"] = lc.error;
            const std::string text = j.dump(2) + "\n";
            if (!con_out.empty()) {
                std::ofstream out(con_out, std::ios::binary | std::ios::trunc);
                if (!out) throw std::runtime_error("cannot open " + con_out);
                out << text;
            }
            std::fputs(text.c_str(), stdout);
            return 0;
        }

        if (mom->parsed()) {
            std::vector<gclt::Rectangle> rects;
            for (const auto& text : mom_rects) rects.push_back(parse_rect(text));
            gclt::MomentReport report =
                gclt::run_increment_experiment(mom_config, rects, mom_m);
            return finish(report.report(), mom_config.output_path);
        }
        if (clt->parsed()) {
            gclt::MomentReport report = gclt::run_clt_experiment(clt_config);
            return finish(report.report(), clt_config.output_path);
        }
        if (tight->parsed()) {
            gclt::TightnessReport report =
                gclt::run_tightness_scan(tight_config, tight_gaps);
            return finish(report.report(), tight_config.output_path);
        }
        if (ks->parsed()) {
            gclt::KsReport report = gclt::run_ks_test(ks_config);
            return finish(report.report(), ks_config.output_path);
        }
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
