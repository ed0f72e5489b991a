#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edverify/dimension.hpp"
#include "edverify/formats.hpp"
#include "edverify/geometry.hpp"
#include "edverify/scenario.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::string token;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!token.empty()) out.push_back(std::stod(token));
            token.clear();
        } else {
            token += c;
        }
    }
    return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
    std::vector<std::uint64_t> out;
    std::string token;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!token.empty()) out.push_back(std::stoull(token));
            token.clear();
        } else {
            token += c;
        }
    }
    return out;
}

int cmd_run(const std::string& scenario_file, const std::string& out_dir) {
    const edv::Scenario scenario = edv::parse_scenario(edv::read_text_file(scenario_file));
    const edv::ScenarioOutcome outcome = edv::run_scenario(scenario, out_dir);
    std::fputs(edv::summary_to_text(outcome.summary).c_str(), stdout);
    std::printf("summary_file %s\n", outcome.summary_path.c_str());
    std::printf("event_log %s\n", outcome.event_log_path.c_str());
    return outcome.passed ? kExitPass : kExitCheckFailed;
}

int cmd_sweep(const std::string& gammas_csv, std::size_t d, const std::string& seeds_csv,
              std::size_t n, std::size_t target_k, const std::string& out_dir) {
    const std::vector<double> gammas = parse_double_list(gammas_csv);
    const std::vector<std::uint64_t> seeds = parse_seed_list(seeds_csv);
    if (gammas.empty() || seeds.empty()) {
        std::fprintf(stderr, "sweep: need at least one gamma and one seed\n");
        return kExitUsage;
    }
    const edv::SweepResult result =
        edv::sweep_trichotomy(gammas, d, seeds, out_dir, n, target_k);
    std::fputs(result.table.c_str(), stdout);
    std::printf("table_file %s\n", result.table_path.c_str());
    return result.all_ok ? kExitPass : kExitCheckFailed;
}

int cmd_dim(const std::string& system_file, std::size_t slack) {
    const edv::SetSystem system = edv::system_from_text(edv::read_text_file(system_file));
    const edv::LooResult result = slack == 0 ? edv::loo_dimension(system)
                                             : edv::robust_loo_dimension(system, slack);
    std::printf("dimension %zu\n", result.k);
    std::string witness;
    for (std::size_t i : result.witness) {
        if (!witness.empty()) witness += ',';
        witness += system.ground[i];
    }
    std::printf("witness %s\n", witness.empty() ? "-" : witness.c_str());
    return kExitPass;
}

int cmd_construct_third(std::size_t n, const std::string& out_dir) {
    const edv::VectorFamily family = edv::construct_margin_third(n);
    const edv::SkewObtuseReport report = edv::verify_skew_obtuse(family, 1.0 / 3.0, 1.0 / 3.0);
    std::filesystem::create_directories(out_dir);
    const std::string path = out_dir + "/family-third-" + std::to_string(n) + ".txt";
    edv::write_text_file(path, edv::family_to_text(family));
    std::printf("family %s\n", path.c_str());
    std::printf("size %zu\n", family.size());
    std::printf("verified %s\n", report.holds ? "yes" : "no");
    return report.holds ? kExitPass : kExitCheckFailed;
}

int cmd_construct_small(double gamma, std::size_t d, std::size_t k, std::uint64_t seed,
                        const std::string& out_dir) {
    const auto family = edv::construct_small_margin(gamma, d, seed, k);
    if (!family) {
        std::fprintf(stderr, "construct small: sampling failed for seed %llu\n",
                     static_cast<unsigned long long>(seed));
        return kExitCheckFailed;
    }
    const edv::SkewObtuseReport report = edv::verify_skew_obtuse(*family, gamma, gamma);
    std::filesystem::create_directories(out_dir);
    const std::string path = out_dir + "/family-small-" + std::to_string(seed) + ".txt";
    edv::write_text_file(path, edv::family_to_text(*family));
    std::printf("family %s\n", path.c_str());
    std::printf("size %zu\n", family->size());
    std::printf("verified %s\n", report.holds ? "yes" : "no");
    return report.holds ? kExitPass : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-party classification verification toolkit"};
    app.require_subcommand(1);
    std::string out_dir = "out";
    app.add_option("--out", out_dir, "Directory for generated artifacts");

    std::string scenario_file;
    CLI::App* run = app.add_subcommand("run", "Execute one scenario file");
    run->add_option("scenario", scenario_file, "Scenario config file")->required();

    std::string gammas_csv;
    std::string seeds_csv;
    std::size_t sweep_d = 8;
    std::size_t sweep_n = 30;
    std::size_t sweep_k = 30;
    CLI::App* sweep = app.add_subcommand("sweep", "Margin trichotomy sweep");
    sweep->add_option("--gammas", gammas_csv, "Comma-separated margins")->required();
    sweep->add_option("--d", sweep_d, "Ambient dimension")->required();
    sweep->add_option("--seeds", seeds_csv, "Comma-separated seeds")->required();
    sweep->add_option("--n", sweep_n, "Instance size for the bounded regime");
    sweep->add_option("--k", sweep_k, "Target family size for the exponential regime");

    std::string system_file;
    std::size_t dim_slack = 0;
    CLI::App* dim = app.add_subcommand("dim", "Isolation dimension of a set system");
    dim->add_option("system", system_file, "Set system file")->required();
    dim->add_option("--slack", dim_slack, "Tolerated labeling errors");

    CLI::App* construct = app.add_subcommand("construct", "Build a vector family");
    construct->require_subcommand(1);
    std::size_t third_n = 6;
    CLI::App* third = construct->add_subcommand("third", "Margin-one-third family");
    third->add_option("--n", third_n, "Family size")->required();
    double small_gamma = 0.25;
    std::size_t small_d = 100;
    std::size_t small_k = 20;
    std::uint64_t small_seed = 1;
    CLI::App* small = construct->add_subcommand("small", "Sub-one-third margin family");
    small->add_option("--gamma", small_gamma, "Margin, below one third")->required();
    small->add_option("--d", small_d, "Sampling dimension")->required();
    small->add_option("--k", small_k, "Target family size")->required();
    small->add_option("--seed", small_seed, "Sampler seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(scenario_file, out_dir);
        if (sweep->parsed()) {
            return cmd_sweep(gammas_csv, sweep_d, seeds_csv, sweep_n, sweep_k, out_dir);
        }
        if (dim->parsed()) return cmd_dim(system_file, dim_slack);
        if (construct->parsed()) {
            if (third->parsed()) return cmd_construct_third(third_n, out_dir);
            return cmd_construct_small(small_gamma, small_d, small_k, small_seed, out_dir);
        }
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return kExitUsage;
    }
    return kExitUsage;
}
