#include "aopsim/config.hpp"

#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "aopsim/common.hpp"

namespace aopsim {

namespace {

struct KeyDef {
    std::string section;
    std::string key;
    std::function<std::string(const Config&)> get;
    std::function<void(Config&, const std::string&)> set;
};

double parse_double(const std::string& section, const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("[" + section + "] " + key + ": expected a number, got '" + v + "'");
    }
}

std::int64_t parse_int(const std::string& section, const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        std::int64_t i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("[" + section + "] " + key + ": expected an integer, got '" + v + "'");
    }
}

std::vector<KeyDef> registry() {
    std::vector<KeyDef> defs;
    using C = Config;
    auto dblf = [&](const char* sec, const char* key, std::function<double&(C&)> ref) {
        defs.push_back(
            {sec, key,
             [ref](const Config& c) { return fmt_double(ref(const_cast<Config&>(c))); },
             [ref, sec = std::string(sec), key = std::string(key)](Config& c, const std::string& v) {
                 ref(c) = parse_double(sec, key, v);
             }});
    };
    auto intf = [&](const char* sec, const char* key, std::function<int&(C&)> ref) {
        defs.push_back(
            {sec, key,
             [ref](const Config& c) { return std::to_string(ref(const_cast<Config&>(c))); },
             [ref, sec = std::string(sec), key = std::string(key)](Config& c, const std::string& v) {
                 ref(c) = static_cast<int>(parse_int(sec, key, v));
             }});
    };
    auto u64f = [&](const char* sec, const char* key, std::function<std::uint64_t&(C&)> ref) {
        defs.push_back(
            {sec, key,
             [ref](const Config& c) { return std::to_string(ref(const_cast<Config&>(c))); },
             [ref, sec = std::string(sec), key = std::string(key)](Config& c, const std::string& v) {
                 ref(c) = static_cast<std::uint64_t>(parse_int(sec, key, v));
             }});
    };
    auto strf = [&](const char* sec, const char* key, std::function<std::string&(C&)> ref) {
        defs.push_back({sec, key,
                        [ref](const Config& c) -> std::string { return ref(const_cast<Config&>(c)); },
                        [ref](Config& c, const std::string& v) { ref(c) = v; }});
    };

    // [topology]
    strf("topology", "dataset", [](C& c) -> std::string& { return c.topology.dataset; });
    intf("topology", "wifi_count", [](C& c) -> int& { return c.topology.wifi_count; });
    intf("topology", "ru_count", [](C& c) -> int& { return c.topology.ru_count; });
    intf("topology", "oru_count", [](C& c) -> int& { return c.topology.oru_count; });
    u64f("topology", "seed", [](C& c) -> std::uint64_t& { return c.topology.seed; });
    dblf("topology", "fronthaul_gbps_min", [](C& c) -> double& { return c.topology.fronthaul_gbps_min; });
    dblf("topology", "fronthaul_gbps_max", [](C& c) -> double& { return c.topology.fronthaul_gbps_max; });
    dblf("topology", "inter_ec_gbps_min", [](C& c) -> double& { return c.topology.inter_ec_gbps_min; });
    dblf("topology", "inter_ec_gbps_max", [](C& c) -> double& { return c.topology.inter_ec_gbps_max; });
    dblf("topology", "backhaul_gbps_min", [](C& c) -> double& { return c.topology.backhaul_gbps_min; });
    dblf("topology", "backhaul_gbps_max", [](C& c) -> double& { return c.topology.backhaul_gbps_max; });
    dblf("topology", "rc_offset_m", [](C& c) -> double& { return c.topology.rc_offset_m; });

    // [clustering]
    dblf("clustering", "damping", [](C& c) -> double& { return c.clustering.damping; });
    strf("clustering", "preference", [](C& c) -> std::string& { return c.clustering.preference; });
    intf("clustering", "max_iters", [](C& c) -> int& { return c.clustering.max_iters; });
    intf("clustering", "convergence_window", [](C& c) -> int& { return c.clustering.convergence_window; });
    intf("clustering", "kmax", [](C& c) -> int& { return c.clustering.kmax; });
    intf("clustering", "kmeans_restarts", [](C& c) -> int& { return c.clustering.kmeans_restarts; });
    intf("clustering", "kmeans_iters", [](C& c) -> int& { return c.clustering.kmeans_iters; });
    u64f("clustering", "seed", [](C& c) -> std::uint64_t& { return c.clustering.seed; });

    // [commplan]
    dblf("commplan", "wifi_efficiency", [](C& c) -> double& { return c.commplan.wifi_efficiency; });
    dblf("commplan", "wifi_peak_gbps", [](C& c) -> double& { return c.commplan.wifi_peak_gbps; });
    dblf("commplan", "contention_alpha", [](C& c) -> double& { return c.commplan.contention_alpha; });
    dblf("commplan", "tx_power_dbm", [](C& c) -> double& { return c.commplan.tx_power_dbm; });
    dblf("commplan", "noise_w", [](C& c) -> double& { return c.commplan.noise_w; });
    dblf("commplan", "snr_ref_db", [](C& c) -> double& { return c.commplan.snr_ref_db; });
    dblf("commplan", "snr_ref_dist_m", [](C& c) -> double& { return c.commplan.snr_ref_dist_m; });
    dblf("commplan", "pathloss_exp", [](C& c) -> double& { return c.commplan.pathloss_exp; });
    dblf("commplan", "min_channel_dist_m", [](C& c) -> double& { return c.commplan.min_channel_dist_m; });
    dblf("commplan", "coverage_len_m", [](C& c) -> double& { return c.commplan.coverage_len_m; });
    dblf("commplan", "cell_bandwidth_mhz", [](C& c) -> double& { return c.commplan.cell_bandwidth_mhz; });

    // [compute]
    dblf("compute", "arch_energy_const", [](C& c) -> double& { return c.compute.arch_energy_const; });
    dblf("compute", "local_queue_wait_s", [](C& c) -> double& { return c.compute.local_queue_wait_s; });
    dblf("compute", "prop_speed_mps", [](C& c) -> double& { return c.compute.prop_speed_mps; });

    // [aop]
    strf("aop", "sampling", [](C& c) -> std::string& { return c.aop.sampling; });
    dblf("aop", "beta_a", [](C& c) -> double& { return c.aop.beta_a; });
    dblf("aop", "beta_b", [](C& c) -> double& { return c.aop.beta_b; });

    // [optimizer]
    dblf("optimizer", "epsilon", [](C& c) -> double& { return c.optimizer.epsilon; });
    intf("optimizer", "max_outer", [](C& c) -> int& { return c.optimizer.max_outer; });
    dblf("optimizer", "eta0", [](C& c) -> double& { return c.optimizer.eta0; });
    intf("optimizer", "restarts", [](C& c) -> int& { return c.optimizer.restarts; });
    intf("optimizer", "state_bins", [](C& c) -> int& { return c.optimizer.state_bins; });
    dblf("optimizer", "ec_share_floor", [](C& c) -> double& { return c.optimizer.ec_share_floor; });

    // [sim]
    intf("sim", "vehicles", [](C& c) -> int& { return c.sim.vehicles; });
    intf("sim", "cycles", [](C& c) -> int& { return c.sim.cycles; });
    intf("sim", "replications", [](C& c) -> int& { return c.sim.replications; });
    u64f("sim", "seed", [](C& c) -> std::uint64_t& { return c.sim.seed; });
    strf("sim", "decision", [](C& c) -> std::string& { return c.sim.decision; });
    dblf("sim", "task_mb_min", [](C& c) -> double& { return c.sim.task_mb_min; });
    dblf("sim", "task_mb_max", [](C& c) -> double& { return c.sim.task_mb_max; });
    dblf("sim", "deadline_s_min", [](C& c) -> double& { return c.sim.deadline_s_min; });
    dblf("sim", "deadline_s_max", [](C& c) -> double& { return c.sim.deadline_s_max; });
    dblf("sim", "workload_cpb_min", [](C& c) -> double& { return c.sim.workload_cpb_min; });
    dblf("sim", "workload_cpb_max", [](C& c) -> double& { return c.sim.workload_cpb_max; });
    dblf("sim", "vehicle_ghz_min", [](C& c) -> double& { return c.sim.vehicle_ghz_min; });
    dblf("sim", "vehicle_ghz_max", [](C& c) -> double& { return c.sim.vehicle_ghz_max; });
    dblf("sim", "ec_ghz_min", [](C& c) -> double& { return c.sim.ec_ghz_min; });
    dblf("sim", "ec_ghz_max", [](C& c) -> double& { return c.sim.ec_ghz_max; });
    dblf("sim", "rc_ghz", [](C& c) -> double& { return c.sim.rc_ghz; });
    dblf("sim", "speed_mps_min", [](C& c) -> double& { return c.sim.speed_mps_min; });
    dblf("sim", "speed_mps_max", [](C& c) -> double& { return c.sim.speed_mps_max; });
    dblf("sim", "energy_budget_j", [](C& c) -> double& { return c.sim.energy_budget_j; });
    dblf("sim", "ack_bits", [](C& c) -> double& { return c.sim.ack_bits; });
    intf("sim", "route_rats_min", [](C& c) -> int& { return c.sim.route_rats_min; });
    intf("sim", "route_rats_max", [](C& c) -> int& { return c.sim.route_rats_max; });

    return defs;
}

const std::vector<KeyDef>& defs() {
    static const std::vector<KeyDef> d = registry();
    return d;
}

std::string valid_keys_for(const std::string& section) {
    std::string out;
    for (const auto& d : defs()) {
        if (d.section != section) continue;
        if (!out.empty()) out += ", ";
        out += d.key;
    }
    return out;
}

std::string valid_sections() {
    std::string out;
    std::vector<std::string> seen;
    for (const auto& d : defs()) {
        bool dup = false;
        for (const auto& s : seen) dup = dup || s == d.section;
        if (dup) continue;
        seen.push_back(d.section);
        if (!out.empty()) out += ", ";
        out += d.section;
    }
    return out;
}

}  // namespace

Config parse_config(const std::string& text) {
    Config c;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("config line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            bool known = false;
            for (const auto& d : defs()) known = known || d.section == section;
            if (!known)
                throw ConfigError("unknown section [" + section + "]; valid sections: " + valid_sections());
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ParseError("config line " + std::to_string(lineno) + ": key outside any [section]");
        bool found = false;
        for (const auto& d : defs()) {
            if (d.section == section && d.key == key) {
                d.set(c, value);
                found = true;
                break;
            }
        }
        if (!found)
            throw ConfigError("unknown key '" + key + "' in [" + section +
                              "]; valid keys: " + valid_keys_for(section));
    }
    return c;
}

Config load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const Config& c) {
    std::string out;
    std::string section;
    for (const auto& d : defs()) {
        if (d.section != section) {
            if (!section.empty()) out += "\n";
            section = d.section;
            out += "[" + section + "]\n";
        }
        out += d.key + " = " + d.get(c) + "\n";
    }
    return out;
}

void validate_config(const Config& c) {
    auto range = [](double lo, double hi, const std::string& key) {
        if (lo > hi)
            throw ConfigError("inverted range: " + key + "_min (" + fmt_double(lo) +
                              ") exceeds " + key + "_max (" + fmt_double(hi) + ")");
    };
    auto positive = [](double v, const std::string& key) {
        if (!(v > 0.0)) throw ConfigError(key + " must be positive, got " + fmt_double(v));
    };

    range(c.topology.fronthaul_gbps_min, c.topology.fronthaul_gbps_max, "topology.fronthaul_gbps");
    range(c.topology.inter_ec_gbps_min, c.topology.inter_ec_gbps_max, "topology.inter_ec_gbps");
    range(c.topology.backhaul_gbps_min, c.topology.backhaul_gbps_max, "topology.backhaul_gbps");
    if (c.topology.wifi_count < 0 || c.topology.ru_count < 0 || c.topology.oru_count < 0)
        throw ConfigError("topology station counts must be non-negative");
    if (c.topology.wifi_count + c.topology.ru_count + c.topology.oru_count < 1)
        throw ConfigError("topology must deploy at least one radio station");

    if (c.clustering.damping < 0.0 || c.clustering.damping >= 1.0)
        throw ConfigError("clustering.damping must lie in [0, 1), got " +
                          fmt_double(c.clustering.damping));
    if (c.clustering.max_iters < 1) throw ConfigError("clustering.max_iters must be at least 1");
    if (c.clustering.convergence_window < 1)
        throw ConfigError("clustering.convergence_window must be at least 1");
    if (c.clustering.kmax < 3) throw ConfigError("clustering.kmax must be at least 3");

    positive(c.commplan.wifi_peak_gbps, "commplan.wifi_peak_gbps");
    if (c.commplan.wifi_efficiency <= 0.0 || c.commplan.wifi_efficiency > 1.0)
        throw ConfigError("commplan.wifi_efficiency must lie in (0, 1], got " +
                          fmt_double(c.commplan.wifi_efficiency));
    if (c.commplan.contention_alpha < 0.0)
        throw ConfigError("commplan.contention_alpha must be non-negative");
    positive(c.commplan.noise_w, "commplan.noise_w");
    positive(c.commplan.snr_ref_dist_m, "commplan.snr_ref_dist_m");
    positive(c.commplan.min_channel_dist_m, "commplan.min_channel_dist_m");
    positive(c.commplan.coverage_len_m, "commplan.coverage_len_m");
    positive(c.commplan.cell_bandwidth_mhz, "commplan.cell_bandwidth_mhz");

    positive(c.compute.arch_energy_const, "compute.arch_energy_const");
    positive(c.compute.prop_speed_mps, "compute.prop_speed_mps");
    if (c.compute.local_queue_wait_s < 0.0)
        throw ConfigError("compute.local_queue_wait_s must be non-negative");

    if (c.aop.sampling != "zero_wait" && c.aop.sampling != "random" &&
        c.aop.sampling != "uniform" && c.aop.sampling != "beta")
        throw ConfigError("aop.sampling must be one of zero_wait, random, uniform, beta");
    positive(c.aop.beta_a, "aop.beta_a");
    positive(c.aop.beta_b, "aop.beta_b");

    positive(c.optimizer.epsilon, "optimizer.epsilon");
    if (c.optimizer.max_outer < 1) throw ConfigError("optimizer.max_outer must be at least 1");
    positive(c.optimizer.eta0, "optimizer.eta0");
    if (c.optimizer.restarts < 1) throw ConfigError("optimizer.restarts must be at least 1");
    if (c.optimizer.state_bins < 1) throw ConfigError("optimizer.state_bins must be at least 1");
    if (c.optimizer.ec_share_floor < 0.0 || c.optimizer.ec_share_floor > 1.0)
        throw ConfigError("optimizer.ec_share_floor must lie in [0, 1]");

    if (c.sim.vehicles < 1 || c.sim.vehicles > 10000)
        throw ConfigError("sim.vehicles must lie in [1, 10000], got " +
                          std::to_string(c.sim.vehicles));
    if (c.sim.cycles < 2) throw ConfigError("sim.cycles must be at least 2");
    if (c.sim.replications < 1) throw ConfigError("sim.replications must be at least 1");
    range(c.sim.task_mb_min, c.sim.task_mb_max, "sim.task_mb");
    range(c.sim.deadline_s_min, c.sim.deadline_s_max, "sim.deadline_s");
    range(c.sim.workload_cpb_min, c.sim.workload_cpb_max, "sim.workload_cpb");
    range(c.sim.vehicle_ghz_min, c.sim.vehicle_ghz_max, "sim.vehicle_ghz");
    range(c.sim.ec_ghz_min, c.sim.ec_ghz_max, "sim.ec_ghz");
    range(c.sim.speed_mps_min, c.sim.speed_mps_max, "sim.speed_mps");
    positive(c.sim.task_mb_min, "sim.task_mb_min");
    positive(c.sim.deadline_s_min, "sim.deadline_s_min");
    positive(c.sim.workload_cpb_min, "sim.workload_cpb_min");
    positive(c.sim.vehicle_ghz_min, "sim.vehicle_ghz_min");
    positive(c.sim.ec_ghz_min, "sim.ec_ghz_min");
    positive(c.sim.speed_mps_min, "sim.speed_mps_min");
    positive(c.sim.rc_ghz, "sim.rc_ghz");
    positive(c.sim.energy_budget_j, "sim.energy_budget_j");
    positive(c.sim.ack_bits, "sim.ack_bits");
    if (c.sim.route_rats_min < 2)
        throw ConfigError("sim.route_rats_min must be at least 2");
    if (c.sim.route_rats_max < c.sim.route_rats_min)
        throw ConfigError("inverted range: sim.route_rats");
    if (c.sim.decision != "heuristic" && c.sim.decision != "solver" &&
        c.sim.decision != "total_delay" && c.sim.decision != "fixed_local" &&
        c.sim.decision != "fixed_rc")
        throw ConfigError("sim.decision must be one of heuristic, solver, total_delay, "
                          "fixed_local, fixed_rc");
}

}  // namespace aopsim
