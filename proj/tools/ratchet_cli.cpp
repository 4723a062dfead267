// ratchet: command-line front end for router simulations and bifurcation
// analysis.
//
//   ratchet --experiment sweep --out results/
//   ratchet --config run.json --seed 7 --jobs 4
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ratchet/config.hpp"
#include "ratchet/errors.hpp"
#include "ratchet/experiment.hpp"

namespace {
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information-ratchet power-packet router simulator"};
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> experiment;
    long long jobs = 0;
    bool print_config = false;

    app.add_option("--config", config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Base RNG seed (overrides config)");
    app.add_option("--out", out_dir, "Output directory (overrides config)");
    app.add_option("--jobs", jobs, "Worker threads (default: RATCHET_GRID_JOBS or all cores)")
        ->check(CLI::PositiveNumber);
    app.add_option("--experiment", experiment,
                   "single | sweep | critical | network | network_critical | landscape");
    app.add_flag("--print-config", print_config, "Print the effective configuration and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    ratchet::ExperimentConfig config;
    std::size_t workers = 1;
    try {
        nlohmann::json doc = nlohmann::json::object();
        if (!config_path.empty()) {
            config = ratchet::load_config(config_path);
            doc = ratchet::to_json(config);
        }
        if (experiment) doc["experiment"] = *experiment;
        if (seed) doc["seed"] = *seed;
        if (out_dir) doc["output"] = *out_dir;
        config = ratchet::parse_config(doc);
        workers = ratchet::resolve_jobs(jobs);
    } catch (const ratchet::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    if (print_config) {
        std::cout << ratchet::to_json(config).dump(2) << '\n';
        return 0;
    }

    try {
        const auto outcome = ratchet::run_experiment(config, workers);
        std::cerr << ratchet::to_string(config.experiment) << ": wrote " << outcome.files.size()
                  << " files to " << config.output << " (config " << outcome.config_hash << ")\n";
    } catch (const ratchet::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
