#pragma once

#include <map>
#include <utility>
#include <vector>

#include "aopsim/config.hpp"
#include "aopsim/geometry.hpp"
#include "aopsim/topology.hpp"

namespace aopsim {

// Geometry of a vehicle passing a roadside station: the station sits at
// lateral/along offsets from the vehicle's direction of travel, the coverage
// window of length gamma yields a contact probability and a dwell time.
struct RouteGeometry {
    double gap_m = 0.0;       // absolute vehicle-station distance
    double alpha_rad = 0.0;   // folded approach angle
    double lateral_m = 0.0;   // perpendicular offset
    double along_m = 0.0;     // offset along the direction of travel
    double coverage = 0.0;    // chance of a usable contact window
    double dwell_s = 0.0;     // time spent inside the window
};

// From an absolute gap and approach angle (folded into [0, pi/2]).
RouteGeometry route_geometry(double gap_m, double alpha_rad, double coverage_len_m,
                             double speed_mps);

// From positions: vehicle location, unit heading, station location.
RouteGeometry route_geometry_at(const Point& vehicle, const Point& heading, const Point& station,
                                double coverage_len_m, double speed_mps);

// Shared-medium access rate for one of n associated users.
double wifi_rate_bps(const Config::Commplan& cc, int n_users);

// Distance-calibrated path gain, SNR and spectral efficiency.
double cellular_path_gain(const Config::Commplan& cc, double dist_m);
double cellular_snr(const Config::Commplan& cc, double dist_m);
double cellular_rate_bps(double bandwidth_hz, double alloc_frac, double snr);

double dbm_to_watt(double dbm);

enum class NoOffloadReason {
    offloaded,        // a station was selected
    local_feasible,   // task runs locally, no offload wanted
    no_station,       // empty candidate set
    no_coverage,      // no candidate with a usable contact window
    dwell_too_short,  // contact exists but shorter than the task deadline allows
    ambiguous,        // more than one admissible station
};

const char* no_offload_reason_name(NoOffloadReason r);

struct RatCandidate {
    int rat = -1;
    double along_m = 0.0;  // 0 means the vehicle is at closest approach
    double coverage = 0.0;
    double dwell_s = 0.0;
    double wifi_bps = 0.0;
    double cell_bps = 0.0;
};

struct RatSelection {
    bool offload = false;
    int rat = -1;
    bool via_wifi = false;
    double rate_bps = 0.0;
    NoOffloadReason reason = NoOffloadReason::no_station;
};

// Admission gates: a candidate is usable only at closest approach, with a
// usable contact window and a dwell no shorter than the task deadline. The
// faster technology carries the transfer; rate ties go to cellular. Offload
// happens only when the task needs it and exactly one station qualifies.
RatSelection select_rat(const std::vector<RatCandidate>& candidates, double deadline_s,
                        bool offload_needed);

// One admitted upload: bits enter at a station, land at its serving edge
// cloud and are executed at exec_ec (possibly forwarded on, or to the
// regional cloud when to_rc is set).
struct OffloadFlow {
    int rat = -1;
    int serving_ec = -1;
    int exec_ec = -1;
    bool to_rc = false;
    double bits = 0.0;
};

// Offered load by traffic class: everything arriving over the access network
// (A), the part leaving its serving edge cloud (B), and the part continuing
// to the regional cloud (C). C <= B <= A by construction.
struct TrafficSummary {
    double class_a_bits = 0.0;
    double class_b_bits = 0.0;
    double class_c_bits = 0.0;
    std::map<int, double> fronthaul_bits;                  // by station
    std::map<std::pair<int, int>, double> inter_ec_bits;   // by (serving, exec)
    std::map<int, double> backhaul_bits;                   // by serving edge cloud
};

TrafficSummary traffic_classes(const std::vector<OffloadFlow>& flows);

// Raw per-vehicle decision bits as produced by a policy. x=1 requires
// exactly one forwarding branch; x=0 requires none.
struct DecisionRow {
    int vehicle = -1;
    bool x = false;
    bool y_sr = false;
    bool y_rj = false;
    bool y_rc = false;
    int rat = -1;
    int serving_ec = -1;
    int neighbor_ec = -1;
    double bits = 0.0;
};

// Checks decision exclusivity (throws DomainError naming the vehicle) and
// lowers the admitted rows to flows.
std::vector<OffloadFlow> validate_decisions(const std::vector<DecisionRow>& rows);

}  // namespace aopsim
