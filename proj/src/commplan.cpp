#include "aopsim/commplan.hpp"

#include <algorithm>
#include <cmath>

#include "aopsim/common.hpp"

namespace aopsim {

RouteGeometry route_geometry(double gap_m, double alpha_rad, double coverage_len_m,
                             double speed_mps) {
    if (gap_m < 0.0) throw DomainError("route_geometry: negative gap");
    if (coverage_len_m <= 0.0) throw DomainError("route_geometry: coverage length must be positive");
    if (speed_mps <= 0.0) throw DomainError("route_geometry: speed must be positive");
    // Fold the approach angle into [0, pi/2] so both offsets are lengths.
    double c = std::fabs(std::cos(alpha_rad));
    double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    RouteGeometry g;
    g.gap_m = gap_m;
    g.alpha_rad = std::acos(std::clamp(c, 0.0, 1.0));
    g.lateral_m = gap_m * s;
    g.along_m = gap_m * c;
    if (g.lateral_m == 0.0) {
        g.coverage = 1.0;
    } else if (g.lateral_m < coverage_len_m) {
        g.coverage = g.lateral_m / coverage_len_m;
    } else {
        g.coverage = 0.0;
    }
    g.dwell_s = coverage_len_m / speed_mps;
    return g;
}

RouteGeometry route_geometry_at(const Point& vehicle, const Point& heading, const Point& station,
                                double coverage_len_m, double speed_mps) {
    const double gap = dist(vehicle, station);
    if (gap == 0.0) return route_geometry(0.0, 0.0, coverage_len_m, speed_mps);
    const double ux = (station.x - vehicle.x) / gap;
    const double uy = (station.y - vehicle.y) / gap;
    const double dot = std::clamp(std::fabs(heading.x * ux + heading.y * uy), 0.0, 1.0);
    return route_geometry(gap, std::acos(dot), coverage_len_m, speed_mps);
}

double wifi_rate_bps(const Config::Commplan& cc, int n_users) {
    if (n_users < 1) throw DomainError("wifi_rate_bps: need at least one associated user");
    const double contention = 1.0 / (1.0 + cc.contention_alpha * (n_users - 1));
    return cc.wifi_efficiency * cc.wifi_peak_gbps * 1e9 * contention / n_users;
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double cellular_path_gain(const Config::Commplan& cc, double dist_m) {
    const double d = std::max(dist_m, cc.min_channel_dist_m);
    // Reference calibration: SNR(ref dist) equals the configured dB figure.
    const double tx_w = dbm_to_watt(cc.tx_power_dbm);
    const double snr_ref = std::pow(10.0, cc.snr_ref_db / 10.0);
    const double g0 =
        snr_ref * cc.noise_w * std::pow(cc.snr_ref_dist_m, cc.pathloss_exp) / tx_w;
    return g0 * std::pow(d, -cc.pathloss_exp);
}

double cellular_snr(const Config::Commplan& cc, double dist_m) {
    return dbm_to_watt(cc.tx_power_dbm) * cellular_path_gain(cc, dist_m) / cc.noise_w;
}

double cellular_rate_bps(double bandwidth_hz, double alloc_frac, double snr) {
    if (bandwidth_hz <= 0.0) throw DomainError("cellular_rate_bps: bandwidth must be positive");
    if (alloc_frac < 0.0 || alloc_frac > 1.0)
        throw DomainError("cellular_rate_bps: allocation fraction must be in [0, 1]");
    if (snr < 0.0) throw DomainError("cellular_rate_bps: negative SNR");
    return alloc_frac * bandwidth_hz * std::log2(1.0 + snr);
}

const char* no_offload_reason_name(NoOffloadReason r) {
    switch (r) {
        case NoOffloadReason::offloaded: return "offloaded";
        case NoOffloadReason::local_feasible: return "local_feasible";
        case NoOffloadReason::no_station: return "no_station";
        case NoOffloadReason::no_coverage: return "no_coverage";
        case NoOffloadReason::dwell_too_short: return "dwell_too_short";
        case NoOffloadReason::ambiguous: return "ambiguous";
    }
    return "?";
}

RatSelection select_rat(const std::vector<RatCandidate>& candidates, double deadline_s,
                        bool offload_needed) {
    RatSelection sel;
    if (!offload_needed) {
        sel.reason = NoOffloadReason::local_feasible;
        return sel;
    }
    if (candidates.empty()) {
        sel.reason = NoOffloadReason::no_station;
        return sel;
    }
    bool saw_coverage = false;
    int admitted = 0;
    for (const auto& c : candidates) {
        if (c.along_m != 0.0) continue;
        if (c.coverage <= 0.0) continue;
        saw_coverage = true;
        if (c.dwell_s > deadline_s) continue;
        // At most one technology is admitted per station: the faster one,
        // cellular on ties.
        const bool wifi = c.wifi_bps > c.cell_bps;
        const double rate = wifi ? c.wifi_bps : c.cell_bps;
        if (rate <= 0.0) continue;
        ++admitted;
        sel.rat = c.rat;
        sel.via_wifi = wifi;
        sel.rate_bps = rate;
    }
    if (admitted == 1) {
        sel.offload = true;
        sel.reason = NoOffloadReason::offloaded;
        return sel;
    }
    sel.rat = -1;
    sel.via_wifi = false;
    sel.rate_bps = 0.0;
    if (admitted > 1) {
        sel.reason = NoOffloadReason::ambiguous;
    } else if (saw_coverage) {
        sel.reason = NoOffloadReason::dwell_too_short;
    } else {
        sel.reason = NoOffloadReason::no_coverage;
    }
    return sel;
}

std::vector<OffloadFlow> validate_decisions(const std::vector<DecisionRow>& rows) {
    std::vector<OffloadFlow> flows;
    for (const auto& r : rows) {
        const int branches = (r.y_sr ? 1 : 0) + (r.y_rj ? 1 : 0) + (r.y_rc ? 1 : 0);
        if (!r.x) {
            if (branches != 0)
                throw DomainError("vehicle " + std::to_string(r.vehicle) +
                                  ": forwarding branch set without offload");
            continue;
        }
        if (branches != 1)
            throw DomainError("vehicle " + std::to_string(r.vehicle) +
                              ": decision exclusivity violated (" + std::to_string(branches) +
                              " branches active)");
        OffloadFlow f;
        f.rat = r.rat;
        f.serving_ec = r.serving_ec;
        f.bits = r.bits;
        if (r.y_sr) {
            f.exec_ec = r.serving_ec;
        } else if (r.y_rj) {
            f.exec_ec = r.neighbor_ec;
        } else {
            f.exec_ec = -1;
            f.to_rc = true;
        }
        flows.push_back(f);
    }
    return flows;
}

TrafficSummary traffic_classes(const std::vector<OffloadFlow>& flows) {
    TrafficSummary t;
    for (const auto& f : flows) {
        if (f.bits < 0.0) throw DomainError("traffic_classes: negative flow size");
        if (f.rat < 0 || f.serving_ec < 0) throw DomainError("traffic_classes: incomplete flow");
        t.class_a_bits += f.bits;
        t.fronthaul_bits[f.rat] += f.bits;
        const bool at_serving = !f.to_rc && f.exec_ec == f.serving_ec;
        if (at_serving) continue;
        t.class_b_bits += f.bits;
        if (f.to_rc) {
            t.class_c_bits += f.bits;
            t.backhaul_bits[f.serving_ec] += f.bits;
        } else {
            if (f.exec_ec < 0) throw DomainError("traffic_classes: forwarded flow without target");
            t.inter_ec_bits[{f.serving_ec, f.exec_ec}] += f.bits;
        }
    }
    return t;
}

}  // namespace aopsim
