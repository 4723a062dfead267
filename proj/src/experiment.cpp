#include "ratchet/experiment.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "ratchet/csv.hpp"
#include "ratchet/errors.hpp"
#include "ratchet/parallel.hpp"

namespace ratchet {

namespace fs = std::filesystem;

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
}

void write_trajectory(std::ostream& out, const std::vector<TrajectoryRecord>& records,
                      bool with_flux) {
    if (with_flux) {
        csv::header(out, {"t", "x", "u_star", "d_true", "d_hat", "phi_loss", "entropy_loss",
                          "j_value", "coupling_flux"});
    } else {
        csv::header(out, {"t", "x", "u_star", "d_true", "d_hat", "phi_loss", "entropy_loss",
                          "j_value"});
    }
    for (const auto& r : records) {
        if (with_flux) {
            csv::row(out, {r.t, r.x, r.u_star, r.d_true, r.d_hat, r.phi_loss, r.entropy_loss,
                           r.j_value, r.coupling_flux});
        } else {
            csv::row(out, {r.t, r.x, r.u_star, r.d_true, r.d_hat, r.phi_loss, r.entropy_loss,
                           r.j_value});
        }
    }
}

NetworkSpec network_spec(const ExperimentConfig& c, double g, double level) {
    const auto& n = c.network;
    return NetworkSpec{n.build_topology(), g, {c.params},
                       burst_schedules(n.n_nodes, n.burst, level)};
}

std::vector<std::string> run_single_experiment(const ExperimentConfig& c, const fs::path& dir) {
    const auto records =
        run_single(c.params, c.estimator, c.build_schedule(), c.simulation, c.seed);
    auto out = open_output(dir, "trajectory.csv");
    write_trajectory(out, records, false);
    return {"trajectory.csv"};
}

std::vector<std::string> run_sweep_experiment(const ExperimentConfig& c, const fs::path& dir,
                                              std::size_t jobs) {
    SweepSpec spec = c.sweep;
    spec.params = c.params;
    const auto curve = sweep(spec, jobs);
    auto out = open_output(dir, "sweep.csv");
    csv::header(out, {"D", "u_star", "j_star", "abandoned"});
    for (const auto& p : curve) {
        out << csv::format(p.noise) << ',' << csv::format(p.u_star) << ','
            << csv::format(p.j_star) << ',' << (p.abandoned ? 1 : 0) << '\n';
    }
    return {"sweep.csv"};
}

std::vector<std::string> run_critical_experiment(const ExperimentConfig& c, const fs::path& dir) {
    const auto cp = find_critical(c.params, c.critical.d_lo, c.critical.d_hi, c.critical.tol,
                                  c.sweep.jump_threshold, c.simulation.optimizer_tol);
    auto out = open_output(dir, "critical.csv");
    csv::header(out, {"d_c", "u_before", "u_after", "order", "bracket_lo", "bracket_hi"});
    out << csv::format(cp.d_c) << ',' << csv::format(cp.u_before) << ','
        << csv::format(cp.u_after) << ',' << to_string(cp.order) << ','
        << csv::format(cp.bracket_lo) << ',' << csv::format(cp.bracket_hi) << '\n';
    return {"critical.csv"};
}

std::vector<std::string> run_landscape_experiment(const ExperimentConfig& c, const fs::path& dir) {
    const auto points = landscape(c.params, c.landscape.noise_values, c.landscape.n_u);
    auto out = open_output(dir, "landscape.csv");
    csv::header(out, {"D", "u", "gain", "info_cost", "entropy_penalty", "j"});
    for (const auto& p : points)
        csv::row(out, {p.noise, p.u, p.weighted_gain, p.info_cost, p.entropy_penalty, p.j});

    auto peaks = open_output(dir, "landscape_peaks.csv");
    csv::header(peaks, {"D", "u_argmax", "j_max", "u_star", "abandoned"});
    for (double d : c.landscape.noise_values) {
        const LandscapePoint* best = nullptr;
        for (const auto& p : points) {
            if (p.noise == d && (best == nullptr || p.j > best->j)) best = &p;
        }
        const auto opt = optimize_u(d, c.params, c.simulation.optimizer_tol);
        peaks << csv::format(d) << ',' << csv::format(best->u) << ',' << csv::format(best->j) << ','
              << csv::format(opt.u_star) << ',' << (opt.abandoned ? 1 : 0) << '\n';
    }
    return {"landscape.csv", "landscape_peaks.csv"};
}

std::vector<std::string> run_network_experiment(const ExperimentConfig& c, const fs::path& dir) {
    const auto spec = network_spec(c, c.network.g, c.network.burst_level);
    const auto per_node =
        run_network(spec, c.network.estimator, c.network.simulation, c.seed);
    std::vector<std::string> files;
    for (std::size_t i = 0; i < per_node.size(); ++i) {
        const std::string name = "node_" + std::to_string(i) + ".csv";
        auto out = open_output(dir, name);
        write_trajectory(out, per_node[i], true);
        files.push_back(name);
    }
    return files;
}

std::vector<std::string> run_network_critical_experiment(const ExperimentConfig& c,
                                                         const fs::path& dir, std::size_t jobs) {
    const auto& nc = c.network_critical;
    NetworkCriticalSpec crit{c.network.burst, nc.d_lo, nc.d_hi, nc.tol, nc.n_seeds};
    auto summary = open_output(dir, "network_critical.csv");
    auto seeds = open_output(dir, "network_critical_seeds.csv");
    csv::header(summary, {"g", "d_c_median"});
    csv::header(seeds, {"g", "seed", "d_c"});
    for (double g : nc.g_values) {
        const auto spec = network_spec(c, g, c.network.burst_level);
        const auto res =
            network_critical(spec, crit, c.network.estimator, c.network.simulation, c.seed, jobs);
        csv::row(summary, {g, res.median});
        for (std::size_t k = 0; k < res.per_seed.size(); ++k) {
            seeds << csv::format(g) << ',' << (c.seed + k) << ',' << csv::format(res.per_seed[k])
                  << '\n';
        }
    }
    return {"network_critical.csv", "network_critical_seeds.csv"};
}

}  // namespace

std::vector<LandscapePoint> landscape(const RouterParams& params,
                                      const std::vector<double>& noise_values, std::size_t n_u) {
    if (n_u < 2) throw DomainError("landscape needs at least two u points");
    std::vector<LandscapePoint> out;
    out.reserve(noise_values.size() * n_u);
    for (double d : noise_values) {
        for (std::size_t k = 0; k < n_u; ++k) {
            const double u = (k + 1 == n_u) ? 1.0 : static_cast<double>(k) / static_cast<double>(n_u - 1);
            LandscapePoint p;
            p.noise = d;
            p.u = u;
            p.weighted_gain = params.alpha * gain(u, params.gamma);
            p.info_cost = info_cost(u, d, params.kappa, params.beta);
            p.entropy_penalty = entropy_penalty(u, d, params);
            p.j = evaluate_J(u, d, params);
            out.push_back(p);
        }
    }
    return out;
}

RunOutcome run_experiment(const ExperimentConfig& config, std::size_t jobs) {
    config.validate();
    const std::string started = utc_timestamp();
    const fs::path dir(config.output);
    fs::create_directories(dir);

    std::vector<std::string> files;
    switch (config.experiment) {
        case ExperimentKind::single: files = run_single_experiment(config, dir); break;
        case ExperimentKind::sweep: files = run_sweep_experiment(config, dir, jobs); break;
        case ExperimentKind::critical: files = run_critical_experiment(config, dir); break;
        case ExperimentKind::landscape: files = run_landscape_experiment(config, dir); break;
        case ExperimentKind::network: files = run_network_experiment(config, dir); break;
        case ExperimentKind::network_critical:
            files = run_network_critical_experiment(config, dir, jobs);
            break;
    }

    {
        auto out = open_output(dir, "effective_config.json");
        out << to_json(config).dump(2) << '\n';
    }
    files.push_back("effective_config.json");

    RunOutcome outcome{files, config_hash(config)};
    const nlohmann::json manifest = {
        {"config_hash", outcome.config_hash},
        {"tool_version", kToolVersion},
        {"experiment", to_string(config.experiment)},
        {"seed", config.seed},
        {"jobs", jobs},
        {"started", started},
        {"finished", utc_timestamp()},
        {"outputs", files},
    };
    auto out = open_output(dir, "manifest.json");
    out << manifest.dump(2) << '\n';
    outcome.files.push_back("manifest.json");
    return outcome;
}

std::size_t resolve_jobs(long long flag_value) {
    if (flag_value > 0) return static_cast<std::size_t>(flag_value);
    if (const char* env = std::getenv("RATCHET_GRID_JOBS")) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
        throw ConfigError("RATCHET_GRID_JOBS must be a positive integer");
    }
    return default_jobs();
}

}  // namespace ratchet
