#pragma once

#include <string>
#include <vector>

#include "aopsim/aop.hpp"
#include "aopsim/commplan.hpp"
#include "aopsim/compute.hpp"
#include "aopsim/config.hpp"
#include "aopsim/optimizer.hpp"
#include "aopsim/topology.hpp"

namespace aopsim {

// One simulated vehicle: a looping route through station positions plus the
// static per-vehicle task profile (sizes, deadline, density and CPU are
// vehicle-subscripted, drawn once).
struct SimVehicle {
    int id = -1;
    std::vector<int> route_rats;  // station ids threaded by the route
    Polyline route;
    double route_offset_m = 0.0;
    double speed_mps = 0.0;
    Task task;
    double cpu_hz = 0.0;
    double energy_budget_j = 0.0;
    LocalVerdict verdict = LocalVerdict::feasible;
    bool local_feasible = false;
};

// A generated world: deployed topology with collaboration spaces applied,
// plus the vehicle fleet.
struct Scenario {
    Config cfg;
    Topology topo;
    std::vector<int> cs_labels;
    std::vector<double> ec_cpu_hz;  // drawn per site
    std::vector<SimVehicle> vehicles;
};

// Builds topology, clusters the sites into collaboration spaces, and draws
// the fleet. Throws DomainError when the vehicle count is outside [1, 1e4].
Scenario generate_scenario(const Config& cfg);

enum class DecisionSource { heuristic, solver, total_delay, fixed_local, fixed_rc };

DecisionSource decision_source_from_name(const std::string& name);
const char* decision_source_name(DecisionSource s);

// Hard resource-constraint audit, counted after every round on the final
// action profile.
struct ConstraintAudit {
    int rounds = 0;
    int access_violations = 0;     // station share sums above 1
    int alloc_violations = 0;      // edge-cloud allocation above capacity
    int admission_violations = 0;  // backhaul load above capacity

    int total() const { return access_violations + alloc_violations + admission_violations; }
};

struct Metrics {
    std::vector<double> vehicle_aop;  // per-vehicle average age, ratio form
    double fleet_aop = 0.0;           // pooled ratio over the whole fleet
    double mean_total_delay_s = 0.0;
    double mean_offload_delay_s = 0.0;
    double deadline_violation_rate = 0.0;
    double frac_local = 0.0;
    double frac_serving = 0.0;
    double frac_neighbor = 0.0;
    double frac_rc = 0.0;
    double peak_fronthaul_bits = 0.0;
    double peak_inter_ec_bits = 0.0;
    double peak_backhaul_bits = 0.0;
    ConstraintAudit audit;
};

struct RunOptions {
    DecisionSource source = DecisionSource::heuristic;
    SamplingPolicy sampling;
    int cycles = 200;
    int replication = 0;
    // Acknowledged-delivery mode: the next sample waits for a round-trip
    // confirmation of offloaded deliveries. ack_override_s >= 0 replaces the
    // topology-derived round-trip time (0 reproduces unacknowledged runs).
    bool await_ack = false;
    double ack_override_s = -1.0;
    SolveOptions solver;  // used by the solver/total_delay sources
};

struct RunResult {
    Metrics metrics;
    int replication = 0;
    int vehicles = 0;
    DecisionSource source = DecisionSource::heuristic;
    SamplingKind sampling = SamplingKind::zero_wait;
};

// Advances the fleet one update cycle per round for opt.cycles rounds.
// Deterministic in (scenario, options): all randomness is drawn from
// replication-keyed substreams.
RunResult run_scenario(const Scenario& sc, const RunOptions& opt);

// Same run with acknowledgment waits enabled.
RunResult acked_baseline(const Scenario& sc, RunOptions opt);

// Planning snapshot at t = 0 for the joint solver: per-vehicle offload path
// from the initial presentation, shared resources from the topology.
Instance planning_instance(const Scenario& sc);

std::string metrics_csv_header();
std::string metrics_csv_row(const RunResult& r);

}  // namespace aopsim
