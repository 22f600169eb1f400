#pragma once

#include <cstdint>
#include <string>

namespace aopsim {

// Scenario configuration. Defaults reproduce the evaluation setting:
// a ~125-site metropolitan deployment, 24 roadside radio stations (Wi-Fi,
// sub-6GHz and mmWave), per-vehicle task parameters drawn from the ranges
// below, and a regional cloud reachable over edge-cloud backhaul links.
struct Config {
    struct Topology {
        std::string dataset = "data/melbourne_cbd_sites.csv";
        int wifi_count = 6;
        int ru_count = 5;       // sub-6GHz radio units
        int oru_count = 13;     // mmWave radio units
        std::uint64_t seed = 42;
        double fronthaul_gbps_min = 2.0;   // station -> edge cloud
        double fronthaul_gbps_max = 2.5;
        double inter_ec_gbps_min = 3.0;    // edge cloud <-> edge cloud
        double inter_ec_gbps_max = 3.5;
        double backhaul_gbps_min = 3.0;    // edge cloud -> regional cloud
        double backhaul_gbps_max = 4.5;
        double rc_offset_m = 30000.0;      // regional cloud east of the map
    } topology;

    struct Clustering {
        double damping = 0.5;
        std::string preference = "median";  // "median" or a number
        int max_iters = 1000;
        int convergence_window = 15;
        int kmax = 15;
        int kmeans_restarts = 10;
        int kmeans_iters = 100;
        std::uint64_t seed = 7;
    } clustering;

    struct Commplan {
        double wifi_efficiency = 0.8;        // MAC-layer efficiency factor
        double wifi_peak_gbps = 3.5;         // single-station peak PHY rate
        double contention_alpha = 0.05;      // rate scaling 1/(1+alpha*(n-1))
        double tx_power_dbm = 27.0;
        double noise_w = 1e-13;
        double snr_ref_db = 20.0;            // calibrates the path-gain model:
        double snr_ref_dist_m = 100.0;       //   SNR(ref dist) = ref dB
        double pathloss_exp = 4.0;
        double min_channel_dist_m = 1.0;     // near-field clamp
        double coverage_len_m = 1.0;         // handshake window along the road
        double cell_bandwidth_mhz = 20.0;    // licensed band per cellular station
    } commplan;

    struct Compute {
        double arch_energy_const = 1e-26;    // J per cycle per Hz^2
        double local_queue_wait_s = 0.5;     // average wait behind own tasks
        double prop_speed_mps = 2e8;         // signal propagation in fibre
    } compute;

    struct Aop {
        std::string sampling = "zero_wait";  // zero_wait|random|uniform|beta
        double beta_a = 2.0;
        double beta_b = 5.0;
    } aop;

    struct Optimizer {
        double epsilon = 1e-4;
        int max_outer = 200;
        double eta0 = 0.1;
        int restarts = 4;
        int state_bins = 10;
        double ec_share_floor = 0.2;  // heuristic spillover threshold
    } optimizer;

    struct Sim {
        int vehicles = 50;
        int cycles = 200;
        int replications = 10;
        std::uint64_t seed = 777;
        std::string decision = "heuristic";  // heuristic|solver|total_delay|
                                             // fixed_local|fixed_rc
        double task_mb_min = 40.0;
        double task_mb_max = 200.0;
        double deadline_s_min = 0.02;
        double deadline_s_max = 1.0;
        double workload_cpb_min = 250.0;     // cycles per bit
        double workload_cpb_max = 9990.0;
        double vehicle_ghz_min = 2.0;
        double vehicle_ghz_max = 3.0;
        double ec_ghz_min = 3.0;
        double ec_ghz_max = 3.5;
        double rc_ghz = 4.0;
        double speed_mps_min = 4.35;
        double speed_mps_max = 8.63;
        double energy_budget_j = 1e6;
        double ack_bits = 8000.0;            // result acknowledgement size
        int route_rats_min = 2;              // stations threaded per route
        int route_rats_max = 4;
    } sim;
};

// Parse an INI-style config file body. Unknown sections or keys raise
// ConfigError naming the valid alternatives; malformed lines raise ParseError.
Config parse_config(const std::string& text);
Config load_config_file(const std::string& path);

// Canonical emission: emit(parse(emit(c))) == emit(c).
std::string emit_config(const Config& c);

// Semantic checks beyond parsing: inverted ranges, out-of-domain knobs and
// unusable counts raise ConfigError naming the offending key.
void validate_config(const Config& c);

}  // namespace aopsim
