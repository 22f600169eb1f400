#pragma once

#include <vector>

#include "aopsim/config.hpp"

namespace aopsim {

// One generated task: payload size, completion deadline, and computational
// density in CPU cycles per bit.
struct Task {
    double bits = 0.0;
    double deadline_s = 0.0;
    double cycles_per_bit = 0.0;
};

// Local execution time s*z / P.
double local_exec_s(const Task& t, double cpu_hz);

// Energy drawn by local execution: s * z * nu * P^2.
double local_energy_j(const Task& t, double cpu_hz, double arch_energy_const);

enum class LocalVerdict {
    feasible,
    demand_exceeds_cpu,    // required cycle rate above the CPU's
    deadline_missed,       // execution alone overruns the deadline
    energy_exceeded,       // execution drains more than the budget
};

// Whether the task can stay on the vehicle at all (the offload trigger:
// anything but `feasible` forces an offload attempt).
LocalVerdict local_verdict(const Task& t, double cpu_hz, double energy_budget_j,
                           double arch_energy_const);

enum class LocalMode { immediate, queued, offloaded };

// On-vehicle completion time: plain execution when the task runs right away,
// execution behind the average queue wait when kept locally despite the
// trigger, zero when the payload left the vehicle.
double local_delay_s(const Task& t, double cpu_hz, double queue_wait_s, LocalMode mode);

// Upload time over the selected access link plus the station's fronthaul.
double tx_delay_s(double bits, double access_bps, double fronthaul_bps);

// Edge-cloud CPU split proportional to the tasks' cycle densities; every
// task hosted on the edge cloud gets cpu_hz * z_i / sum(z).
std::vector<double> proportional_alloc(double cpu_hz, const std::vector<double>& cycles_per_bit);

// Execution time at an edge cloud under an allocation.
double ec_exec_s(const Task& t, double alloc_hz);

// Forward hop: the total bits queued onto the link ahead of and including
// this payload, serialised at link rate, plus signal propagation.
struct ForwardHop {
    double aggregate_bits = 0.0;
    double link_bps = 0.0;
    double distance_m = 0.0;
};

double hop_delay_s(const ForwardHop& hop, double prop_speed_mps);

// Admission check for regional-cloud forwarding: offered class-B load on the
// backhaul of the serving edge cloud must fit its capacity.
void check_rc_admission(double offered_bits, double backhaul_bps);

// Scenario (a): on-vehicle outcome, all four derived quantities.
struct LocalOutcome {
    double energy_j = 0.0;
    double exec_s = 0.0;
    bool feasible = false;       // alpha bit
    double total_local_s = 0.0;  // exec if feasible, exec+wait if kept anyway, 0 if offloaded
    LocalVerdict verdict = LocalVerdict::feasible;
};

LocalOutcome local_compute(const Task& t, double cpu_hz, double energy_budget_j,
                           double arch_energy_const, double queue_wait_s, bool offloaded);

enum class RemoteScenario { serving_ec, neighbor_ec, regional_cloud };

// Remote chain: upload, optional forward hop, execution. Stage delays are
// kept separate so fixtures can pin each term.
struct RemoteOutcome {
    RemoteScenario scenario = RemoteScenario::serving_ec;
    double tx_s = 0.0;
    double hop_transfer_s = 0.0;
    double hop_prop_s = 0.0;
    double exec_s = 0.0;
    double total_s = 0.0;
};

// Scenario (b): execute at the serving edge cloud.
RemoteOutcome serving_ec_time(const Task& t, double access_bps, double fronthaul_bps,
                              double alloc_hz);

// Scenario (c): forward within the collaboration space and execute at the
// neighbor. hop carries this round's aggregate bits on the inter-EC link.
RemoteOutcome neighbor_ec_time(const Task& t, double access_bps, double fronthaul_bps,
                               const ForwardHop& hop, double prop_speed_mps, double alloc_hz);

// Scenario (d): forward over the backhaul and execute at the regional cloud.
// offered_bits is the class-B load admitted onto this backhaul.
RemoteOutcome regional_cloud_time(const Task& t, double access_bps, double fronthaul_bps,
                                  const ForwardHop& hop, double prop_speed_mps, double rc_hz,
                                  double offered_bits);

// tau_off selector: exactly one remote branch when offloaded, zero otherwise.
double total_offload_delay(bool offloaded, bool y_serving, bool y_neighbor, bool y_rc,
                           double serving_s, double neighbor_s, double rc_s);

}  // namespace aopsim
