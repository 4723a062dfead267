#include "ratchet/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ratchet/errors.hpp"

namespace ratchet {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

// Reads the fields of one JSON object, remembering which keys were consumed
// so that leftovers can be reported as unknown.
class Fields {
public:
    Fields(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
        if (!doc_.is_object()) throw ConfigError("expected an object", path_.empty() ? "<root>" : path_);
    }

    void number(const char* key, double& out) {
        if (const json* v = take(key)) {
            if (!v->is_number()) throw ConfigError("expected a number", join(path_, key));
            out = v->get<double>();
        }
    }

    void count(const char* key, std::size_t& out) {
        if (const json* v = take(key)) {
            if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
                throw ConfigError("expected a non-negative integer", join(path_, key));
            out = v->get<std::size_t>();
        }
    }

    void seed(const char* key, std::uint64_t& out) {
        if (const json* v = take(key)) {
            if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
                throw ConfigError("expected a non-negative integer", join(path_, key));
            out = v->get<std::uint64_t>();
        }
    }

    void flag(const char* key, bool& out) {
        if (const json* v = take(key)) {
            if (!v->is_boolean()) throw ConfigError("expected true or false", join(path_, key));
            out = v->get<bool>();
        }
    }

    void text(const char* key, std::string& out) {
        if (const json* v = take(key)) {
            if (!v->is_string()) throw ConfigError("expected a string", join(path_, key));
            out = v->get<std::string>();
        }
    }

    /// Returns the sub-document for `key` (or nullptr) and marks it consumed.
    const json* take(const char* key) {
        used_.insert(key);
        auto it = doc_.find(key);
        return it == doc_.end() ? nullptr : &*it;
    }

    [[nodiscard]] std::string child(const char* key) const { return join(path_, key); }

    void finish() const {
        for (auto it = doc_.begin(); it != doc_.end(); ++it) {
            if (!used_.count(it.key())) throw ConfigError("unknown field", join(path_, it.key()));
        }
    }

private:
    const json& doc_;
    std::string path_;
    std::set<std::string> used_;
};

void read_params(const json& doc, const std::string& path, RouterParams& p) {
    Fields f(doc, path);
    f.number("alpha", p.alpha);
    f.number("gamma", p.gamma);
    f.number("kappa", p.kappa);
    f.number("beta", p.beta);
    f.number("temperature", p.temperature);
    f.number("entropy_coeff", p.entropy_coeff);
    f.number("entropy_exponent", p.entropy_exponent);
    f.finish();
}

void read_estimator(const json& doc, const std::string& path, EstimatorConfig& e) {
    Fields f(doc, path);
    f.count("window_len", e.window_len);
    f.number("sample_interval", e.dt);
    f.finish();
}

void read_simulation(const json& doc, const std::string& path, SimulationConfig& s) {
    Fields f(doc, path);
    f.number("dt", s.dt);
    f.number("t_end", s.t_end);
    f.count("control_interval", s.control_interval);
    f.count("record_every", s.record_every);
    f.number("x0", s.x0);
    f.number("x_max", s.x_max);
    f.number("p_load", s.p_load);
    f.number("u_initial", s.u_initial);
    f.flag("gate_noise", s.gate_noise);
    f.number("optimizer_tol", s.optimizer_tol);
    f.finish();
}

NoiseSchedule::Kind parse_schedule_kind(const std::string& name, const std::string& path) {
    if (name == "constant") return NoiseSchedule::Kind::constant;
    if (name == "piecewise") return NoiseSchedule::Kind::piecewise;
    if (name == "pseudo_solar") return NoiseSchedule::Kind::pseudo_solar;
    throw ConfigError("unknown schedule kind '" + name + "'", path);
}

const char* schedule_kind_name(NoiseSchedule::Kind kind) {
    switch (kind) {
        case NoiseSchedule::Kind::constant: return "constant";
        case NoiseSchedule::Kind::piecewise: return "piecewise";
        case NoiseSchedule::Kind::pseudo_solar: return "pseudo_solar";
    }
    return "constant";
}

void read_schedule(const json& doc, const std::string& path, ScheduleConfig& s) {
    Fields f(doc, path);
    std::string kind = schedule_kind_name(s.kind);
    f.text("kind", kind);
    s.kind = parse_schedule_kind(kind, f.child("kind"));
    f.number("p_mean", s.p_mean);
    f.number("noise", s.noise);
    if (const json* segs = f.take("segments")) {
        if (!segs->is_array()) throw ConfigError("expected an array", f.child("segments"));
        s.segments.clear();
        for (std::size_t i = 0; i < segs->size(); ++i) {
            ScheduleSegment seg;
            Fields sf((*segs)[i], f.child("segments") + "[" + std::to_string(i) + "]");
            sf.number("t_start", seg.t_start);
            sf.number("p_mean", seg.p_mean);
            sf.number("noise", seg.noise);
            sf.finish();
            s.segments.push_back(seg);
        }
    }
    if (const json* solar = f.take("solar")) {
        Fields sf(*solar, f.child("solar"));
        sf.number("peak_power", s.solar.peak_power);
        sf.number("day_length", s.solar.day_length);
        sf.number("d_base", s.solar.d_base);
        sf.number("d_cloud", s.solar.d_cloud);
        sf.number("cloud_relaxation", s.solar.cloud_relaxation);
        sf.number("cloud_std", s.solar.cloud_std);
        sf.number("cloud_mean", s.solar.cloud_mean);
        sf.finish();
    }
    f.finish();
}

void read_burst(const json& doc, const std::string& path, BurstScenario& b, double& level) {
    Fields f(doc, path);
    f.count("node", b.node);
    f.number("base_noise", b.base_noise);
    f.number("p_mean", b.p_mean);
    f.number("burst_start", b.burst_start);
    f.number("burst_end", b.burst_end);
    f.number("settle", b.settle);
    f.number("u_floor", b.u_floor);
    f.number("level", level);
    f.finish();
}

void read_network(const json& doc, const std::string& path, NetworkConfig& n) {
    Fields f(doc, path);
    f.text("topology", n.topology);
    f.count("n_nodes", n.n_nodes);
    if (const json* edges = f.take("edges")) {
        const std::string epath = f.child("edges");
        if (!edges->is_array()) throw ConfigError("expected an array of [i, j] pairs", epath);
        n.edges.clear();
        for (std::size_t k = 0; k < edges->size(); ++k) {
            const json& e = (*edges)[k];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() ||
                !e[1].is_number_unsigned())
                throw ConfigError("expected [i, j] with non-negative integers",
                                  epath + "[" + std::to_string(k) + "]");
            n.edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
        }
    }
    f.text("edges_file", n.edges_file);
    f.number("g", n.g);
    if (const json* b = f.take("burst")) read_burst(*b, f.child("burst"), n.burst, n.burst_level);
    if (const json* s = f.take("simulation")) read_simulation(*s, f.child("simulation"), n.simulation);
    if (const json* e = f.take("estimator")) read_estimator(*e, f.child("estimator"), n.estimator);
    f.finish();
}

// Rewrites a module error path (e.g. "simulation.dt") under `prefix`.
[[noreturn]] void rethrow_under(const ConfigError& e, const std::string& prefix) {
    std::string msg = e.what();
    if (auto pos = msg.find(": "); pos != std::string::npos && !e.path().empty())
        msg = msg.substr(pos + 2);
    throw ConfigError(msg, e.path().empty() ? prefix : prefix + "." + e.path());
}

json params_json(const RouterParams& p) {
    return {{"alpha", p.alpha},
            {"gamma", p.gamma},
            {"kappa", p.kappa},
            {"beta", p.beta},
            {"temperature", p.temperature},
            {"entropy_coeff", p.entropy_coeff},
            {"entropy_exponent", p.entropy_exponent}};
}

json estimator_json(const EstimatorConfig& e) {
    return {{"window_len", e.window_len}, {"sample_interval", e.dt}};
}

json simulation_json(const SimulationConfig& s) {
    return {{"dt", s.dt},
            {"t_end", s.t_end},
            {"control_interval", s.control_interval},
            {"record_every", s.record_every},
            {"x0", s.x0},
            {"x_max", s.x_max},
            {"p_load", s.p_load},
            {"u_initial", s.u_initial},
            {"gate_noise", s.gate_noise},
            {"optimizer_tol", s.optimizer_tol}};
}

}  // namespace

const char* to_string(ExperimentKind kind) noexcept {
    switch (kind) {
        case ExperimentKind::single: return "single";
        case ExperimentKind::sweep: return "sweep";
        case ExperimentKind::critical: return "critical";
        case ExperimentKind::network: return "network";
        case ExperimentKind::network_critical: return "network_critical";
        case ExperimentKind::landscape: return "landscape";
    }
    return "sweep";
}

ExperimentKind parse_experiment_kind(const std::string& name, const std::string& path) {
    for (auto k : {ExperimentKind::single, ExperimentKind::sweep, ExperimentKind::critical,
                   ExperimentKind::network, ExperimentKind::network_critical,
                   ExperimentKind::landscape}) {
        if (name == to_string(k)) return k;
    }
    throw ConfigError("unknown experiment kind '" + name + "'", path);
}

Topology NetworkConfig::build_topology() const {
    if (topology == "line") return Topology::line(n_nodes);
    if (topology == "ring") return Topology::ring(n_nodes);
    if (topology == "star") return Topology::star(n_nodes);
    if (topology == "complete") return Topology::complete(n_nodes);
    if (topology == "edges") return Topology(n_nodes, edges);
    if (topology == "edges_file") {
        if (edges_file.empty()) throw ConfigError("required for edges_file topology", "network.edges_file");
        return Topology::from_edge_file(n_nodes, edges_file);
    }
    throw ConfigError("unknown topology '" + topology + "'", "network.topology");
}

NoiseSchedule ExperimentConfig::build_schedule() const {
    switch (schedule.kind) {
        case NoiseSchedule::Kind::constant:
            return NoiseSchedule::constant(schedule.p_mean, schedule.noise);
        case NoiseSchedule::Kind::piecewise:
            return NoiseSchedule::piecewise(schedule.segments);
        case NoiseSchedule::Kind::pseudo_solar: {
            SolarConfig solar = schedule.solar;
            solar.grid_dt = simulation.dt;
            solar.horizon = simulation.t_end;
            // Cloud stream is tied to the run seed so one seed fixes the whole experiment.
            return NoiseSchedule::pseudo_solar(solar, seed);
        }
    }
    throw ConfigError("unknown schedule kind", "schedule.kind");
}

void ExperimentConfig::validate() const {
    params.validate();
    estimator.validate();
    simulation.validate();
    (void)sample_stride(simulation, estimator);
    (void)build_schedule();
    {
        SweepSpec s = sweep;
        s.params = params;
        s.validate();
    }
    if (!(critical.tol > 0.0)) throw ConfigError("must be > 0", "critical.tol");
    if (!(critical.d_lo >= 0.0) || !(critical.d_hi > critical.d_lo))
        throw ConfigError("need 0 <= d_lo < d_hi", "critical.d_hi");
    if (landscape.noise_values.empty())
        throw ConfigError("needs at least one value", "landscape.noise_values");
    for (std::size_t i = 0; i < landscape.noise_values.size(); ++i) {
        const double d = landscape.noise_values[i];
        if (!std::isfinite(d) || d < 0.0)
            throw ConfigError("must be finite and >= 0",
                              "landscape.noise_values[" + std::to_string(i) + "]");
    }
    if (landscape.n_u < 2) throw ConfigError("must be >= 2", "landscape.n_u");

    try {
        (void)network.build_topology();
        if (!std::isfinite(network.g) || network.g < 0.0)
            throw ConfigError("must be finite and >= 0", "g");
        network.simulation.validate();
        network.estimator.validate();
        (void)sample_stride(network.simulation, network.estimator);
        network.burst.validate(network.n_nodes, network.simulation.t_end);
        if (!std::isfinite(network.burst_level) || network.burst_level < 0.0)
            throw ConfigError("must be finite and >= 0", "burst.level");
    } catch (const ConfigError& e) {
        if (e.path().rfind("network.", 0) == 0) throw;
        rethrow_under(e, "network");
    }

    NetworkCriticalSpec nc{network.burst, network_critical.d_lo, network_critical.d_hi,
                           network_critical.tol, network_critical.n_seeds};
    nc.validate();
    if (network_critical.g_values.empty())
        throw ConfigError("needs at least one value", "network_critical.g_values");
    for (std::size_t i = 0; i < network_critical.g_values.size(); ++i) {
        const double g = network_critical.g_values[i];
        if (!std::isfinite(g) || g < 0.0)
            throw ConfigError("must be finite and >= 0",
                              "network_critical.g_values[" + std::to_string(i) + "]");
    }
}

ExperimentConfig parse_config(const json& doc) {
    ExperimentConfig c;
    Fields f(doc, "");
    std::string kind = to_string(c.experiment);
    f.text("experiment", kind);
    c.experiment = parse_experiment_kind(kind);
    f.seed("seed", c.seed);
    f.text("output", c.output);
    if (const json* p = f.take("params")) read_params(*p, "params", c.params);
    if (const json* e = f.take("estimator")) read_estimator(*e, "estimator", c.estimator);
    if (const json* s = f.take("simulation")) read_simulation(*s, "simulation", c.simulation);
    if (const json* s = f.take("schedule")) read_schedule(*s, "schedule", c.schedule);
    if (const json* s = f.take("sweep")) {
        Fields sf(*s, "sweep");
        sf.number("d_min", c.sweep.d_min);
        sf.number("d_max", c.sweep.d_max);
        sf.count("n_points", c.sweep.n_points);
        sf.number("jump_threshold", c.sweep.jump_threshold);
        sf.finish();
    }
    if (const json* s = f.take("critical")) {
        Fields sf(*s, "critical");
        sf.number("d_lo", c.critical.d_lo);
        sf.number("d_hi", c.critical.d_hi);
        sf.number("tol", c.critical.tol);
        sf.finish();
    }
    if (const json* s = f.take("landscape")) {
        Fields sf(*s, "landscape");
        if (const json* v = sf.take("noise_values")) {
            if (!v->is_array()) throw ConfigError("expected an array", "landscape.noise_values");
            c.landscape.noise_values.clear();
            for (std::size_t i = 0; i < v->size(); ++i) {
                if (!(*v)[i].is_number())
                    throw ConfigError("expected a number",
                                      "landscape.noise_values[" + std::to_string(i) + "]");
                c.landscape.noise_values.push_back((*v)[i].get<double>());
            }
        }
        sf.count("n_u", c.landscape.n_u);
        sf.finish();
    }
    if (const json* n = f.take("network")) read_network(*n, "network", c.network);
    if (const json* s = f.take("network_critical")) {
        Fields sf(*s, "network_critical");
        sf.number("d_lo", c.network_critical.d_lo);
        sf.number("d_hi", c.network_critical.d_hi);
        sf.number("tol", c.network_critical.tol);
        sf.count("n_seeds", c.network_critical.n_seeds);
        if (const json* v = sf.take("g_values")) {
            if (!v->is_array()) throw ConfigError("expected an array", "network_critical.g_values");
            c.network_critical.g_values.clear();
            for (std::size_t i = 0; i < v->size(); ++i) {
                if (!(*v)[i].is_number())
                    throw ConfigError("expected a number",
                                      "network_critical.g_values[" + std::to_string(i) + "]");
                c.network_critical.g_values.push_back((*v)[i].get<double>());
            }
        }
        sf.finish();
    }
    f.finish();
    c.sweep.params = c.params;
    c.sweep.optimizer_tol = c.simulation.optimizer_tol;
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
    json segments = json::array();
    for (const auto& s : c.schedule.segments)
        segments.push_back({{"t_start", s.t_start}, {"p_mean", s.p_mean}, {"noise", s.noise}});
    json edges = json::array();
    for (const auto& [i, j] : c.network.edges) edges.push_back({i, j});
    const auto& sol = c.schedule.solar;
    const auto& b = c.network.burst;
    return {
        {"experiment", to_string(c.experiment)},
        {"seed", c.seed},
        {"output", c.output},
        {"params", params_json(c.params)},
        {"estimator", estimator_json(c.estimator)},
        {"simulation", simulation_json(c.simulation)},
        {"schedule",
         {{"kind", schedule_kind_name(c.schedule.kind)},
          {"p_mean", c.schedule.p_mean},
          {"noise", c.schedule.noise},
          {"segments", segments},
          {"solar",
           {{"peak_power", sol.peak_power},
            {"day_length", sol.day_length},
            {"d_base", sol.d_base},
            {"d_cloud", sol.d_cloud},
            {"cloud_relaxation", sol.cloud_relaxation},
            {"cloud_std", sol.cloud_std},
            {"cloud_mean", sol.cloud_mean}}}}},
        {"sweep",
         {{"d_min", c.sweep.d_min},
          {"d_max", c.sweep.d_max},
          {"n_points", c.sweep.n_points},
          {"jump_threshold", c.sweep.jump_threshold}}},
        {"critical", {{"d_lo", c.critical.d_lo}, {"d_hi", c.critical.d_hi}, {"tol", c.critical.tol}}},
        {"landscape", {{"noise_values", c.landscape.noise_values}, {"n_u", c.landscape.n_u}}},
        {"network",
         {{"topology", c.network.topology},
          {"n_nodes", c.network.n_nodes},
          {"edges", edges},
          {"edges_file", c.network.edges_file},
          {"g", c.network.g},
          {"burst",
           {{"node", b.node},
            {"base_noise", b.base_noise},
            {"p_mean", b.p_mean},
            {"burst_start", b.burst_start},
            {"burst_end", b.burst_end},
            {"settle", b.settle},
            {"u_floor", b.u_floor},
            {"level", c.network.burst_level}}},
          {"simulation", simulation_json(c.network.simulation)},
          {"estimator", estimator_json(c.network.estimator)}}},
        {"network_critical",
         {{"d_lo", c.network_critical.d_lo},
          {"d_hi", c.network_critical.d_hi},
          {"tol", c.network_critical.tol},
          {"n_seeds", c.network_critical.n_seeds},
          {"g_values", c.network_critical.g_values}}},
    };
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string canonical = to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace ratchet
