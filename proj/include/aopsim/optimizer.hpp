#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "aopsim/aop.hpp"
#include "aopsim/compute.hpp"

namespace aopsim {

// Offloading action kinds, in scenario-ladder order. The ladder order is
// also the deterministic tie-break for equal scores.
enum class ActionKind { serving_ec, neighbor_ec, regional_cloud, local };

const char* action_kind_name(ActionKind k);

// One vehicle of a planning instance. The offload path (station, serving
// edge cloud, optional forward target) is static for the planning horizon;
// access rate depends on how many vehicles share the station.
struct VehicleSpec {
    Task task;
    double cpu_hz = 0.0;
    bool local_feasible = false;
    int rat = -1;          // -1: no admissible station, local only
    int serving_ec = -1;
    int neighbor_ec = -1;  // -1: no forward target
    std::vector<double> access_bps_by_n;  // per-user rate when n vehicles share
    double fronthaul_bps = 0.0;
};

// Static planning instance: vehicles plus the shared resources they contend
// for. Link capacities are bits per update round against per-round loads.
struct Instance {
    std::vector<VehicleSpec> vehicles;
    std::map<int, double> ec_cpu_hz;
    double rc_hz = 0.0;
    std::map<int, double> backhaul_bps;                      // serving ec -> RC
    std::map<int, double> rc_dist_m;                         // serving ec -> RC
    std::map<std::pair<int, int>, double> inter_ec_bps;      // (serving, neighbor)
    std::map<std::pair<int, int>, double> inter_ec_dist_m;
    double prop_speed_mps = 2e8;
    double local_queue_wait_s = 0.5;
    WaitMoments wait;  // idle moments of the sampling policy in force
};

enum class Objective { aop, total_delay };

// Candidate actions available to vehicle v in this instance.
std::vector<ActionKind> candidate_actions(const Instance& inst, int v);

// Joint evaluation of one integer action profile: equal access split per
// station, workload-proportional CPU split per edge cloud, serialized
// aggregates on forward links.
struct EvalResult {
    std::vector<double> delay_s;
    std::vector<double> frac_a;    // access fraction, 0 when not offloaded
    std::vector<double> alloc_hz;  // edge-cloud allocation, 0 otherwise
    double sum_q = 0.0;            // surrogate objective (sum of Q-scores)
    double sum_delay = 0.0;
    bool rc_admissible = true;
    std::vector<int> overloaded_backhauls;
    std::map<int, double> rat_frac_sums;   // per station: sum of x*a
    std::map<int, double> ec_alloc_sums;   // per EC: sum of x*p*y_serving
};

EvalResult evaluate_profile(const Instance& inst, const std::vector<ActionKind>& actions);

double objective_of(const EvalResult& ev, Objective obj);

// Exhaustive joint optimum. Refuses more than 5 vehicles or more than 6
// candidate actions for any vehicle.
struct EnumerationResult {
    std::vector<ActionKind> actions;
    double objective = 0.0;
    bool feasible_found = false;
};

EnumerationResult enumerate_policies(const Instance& inst, Objective obj);

// Penalty Lagrangian L = sum(Q-scores) + sum_v lambda_v (x a - 1)
//                       + sum_v mu_v (x p y_serving - P_r).
double lagrangian(const Instance& inst, const std::vector<ActionKind>& actions,
                  const std::vector<double>& lambda, const std::vector<double>& mu,
                  Objective obj);

// Dual function: per-vehicle minimization of the multiplier-adjusted cost
// over candidate actions and realizable congestion levels. Exact (a true
// lower bound) when the congestion sets are exhaustively enumerable
// (vehicles <= 10); conservative term-wise bounds otherwise.
struct DualValue {
    double value = 0.0;
    bool finite = true;  // false reports the -inf sentinel
};

DualValue dual_value(const Instance& inst, const std::vector<double>& lambda,
                     const std::vector<double>& mu, Objective obj);

struct KktResidual {
    double stationarity = 0.0;
    double comp_slack = 0.0;
    double primal_viol = 0.0;
    double dual_viol = 0.0;
};

KktResidual kkt_residual(const Instance& inst, const std::vector<ActionKind>& actions,
                         const std::vector<double>& lambda, const std::vector<double>& mu,
                         Objective obj);

struct SolveOptions {
    Objective objective = Objective::aop;
    double epsilon = 1e-4;
    int max_outer = 200;
    double eta0 = 0.1;
    int restarts = 4;
    std::uint64_t seed = 0;
    int state_bins = 10;
};

// Stationary policy: per vehicle one action kind, broadcast over the
// discretized (L_prev, N, L) state bins.
struct PolicyTable {
    int bins = 10;
    std::vector<ActionKind> action_of_vehicle;

    ActionKind lookup(int vehicle, int /*bin_l_prev*/, int /*bin_n*/, int /*bin_l*/) const {
        return action_of_vehicle.at(vehicle);
    }
};

struct SolveReport {
    PolicyTable policy;
    std::vector<ActionKind> actions;
    std::vector<double> lambda, mu;
    double objective = 0.0;
    DualValue dual;
    std::vector<double> residual_history;
    // every (lambda, mu) the ascent visited, zeros first; dual_value at each
    // entry is a certified lower bound on any feasible objective
    std::vector<std::pair<std::vector<double>, std::vector<double>>> multiplier_path;
    int iterations = 0;
    bool converged = false;
    EvalResult eval;
};

// Dual-decomposition solve: alternating per-vehicle minimizations of the
// multiplier-adjusted cost to a fixed point, admission repair along the
// scenario ladder, projected-subgradient multiplier ascent with step
// eta0/sqrt(k), restarted from diverse initial profiles; the best feasible
// incumbent wins.
SolveReport solve(const Instance& inst, const SolveOptions& opt);

}  // namespace aopsim
