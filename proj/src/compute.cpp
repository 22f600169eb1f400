#include "aopsim/compute.hpp"

#include "aopsim/common.hpp"

namespace aopsim {

namespace {

void check_task(const Task& t) {
    if (t.bits <= 0.0 || t.cycles_per_bit <= 0.0 || t.deadline_s <= 0.0)
        throw DomainError("task fields must be positive");
}

}  // namespace

double local_exec_s(const Task& t, double cpu_hz) {
    check_task(t);
    if (cpu_hz <= 0.0) throw DomainError("local_exec_s: cpu rate must be positive");
    return t.bits * t.cycles_per_bit / cpu_hz;
}

double local_energy_j(const Task& t, double cpu_hz, double arch_energy_const) {
    check_task(t);
    if (cpu_hz <= 0.0) throw DomainError("local_energy_j: cpu rate must be positive");
    return t.bits * t.cycles_per_bit * arch_energy_const * cpu_hz * cpu_hz;
}

LocalVerdict local_verdict(const Task& t, double cpu_hz, double energy_budget_j,
                           double arch_energy_const) {
    check_task(t);
    if (cpu_hz <= 0.0) throw DomainError("local_verdict: cpu rate must be positive");
    // Required sustained cycle rate to make the deadline.
    if (t.bits * t.cycles_per_bit / t.deadline_s > cpu_hz) return LocalVerdict::demand_exceeds_cpu;
    if (local_exec_s(t, cpu_hz) > t.deadline_s) return LocalVerdict::deadline_missed;
    if (local_energy_j(t, cpu_hz, arch_energy_const) > energy_budget_j)
        return LocalVerdict::energy_exceeded;
    return LocalVerdict::feasible;
}

double local_delay_s(const Task& t, double cpu_hz, double queue_wait_s, LocalMode mode) {
    switch (mode) {
        case LocalMode::immediate: return local_exec_s(t, cpu_hz);
        case LocalMode::queued: return local_exec_s(t, cpu_hz) + queue_wait_s;
        case LocalMode::offloaded: return 0.0;
    }
    throw InternalError("local_delay_s: bad mode");
}

double tx_delay_s(double bits, double access_bps, double fronthaul_bps) {
    if (bits <= 0.0) throw DomainError("tx_delay_s: bits must be positive");
    if (access_bps <= 0.0) throw DomainError("tx_delay_s: no access rate");
    if (fronthaul_bps <= 0.0) throw DomainError("tx_delay_s: no fronthaul rate");
    return bits / access_bps + bits / fronthaul_bps;
}

std::vector<double> proportional_alloc(double cpu_hz, const std::vector<double>& cycles_per_bit) {
    if (cycles_per_bit.empty())
        throw DomainError("proportional_alloc: no tasks hosted on this edge cloud");
    if (cpu_hz <= 0.0) throw DomainError("proportional_alloc: cpu rate must be positive");
    double total = 0.0;
    for (double z : cycles_per_bit) {
        if (z <= 0.0) throw DomainError("proportional_alloc: cycle densities must be positive");
        total += z;
    }
    std::vector<double> out(cycles_per_bit.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = cpu_hz * cycles_per_bit[i] / total;
    return out;
}

double ec_exec_s(const Task& t, double alloc_hz) {
    check_task(t);
    if (alloc_hz <= 0.0) throw DomainError("ec_exec_s: empty allocation");
    return t.bits * t.cycles_per_bit / alloc_hz;
}

double hop_delay_s(const ForwardHop& hop, double prop_speed_mps) {
    if (hop.link_bps <= 0.0) throw DomainError("hop_delay_s: no link rate");
    if (hop.aggregate_bits < 0.0 || hop.distance_m < 0.0)
        throw DomainError("hop_delay_s: negative hop quantity");
    if (prop_speed_mps <= 0.0) throw DomainError("hop_delay_s: propagation speed must be positive");
    return hop.aggregate_bits / hop.link_bps + hop.distance_m / prop_speed_mps;
}

void check_rc_admission(double offered_bits, double backhaul_bps) {
    if (backhaul_bps <= 0.0) throw DomainError("check_rc_admission: no backhaul rate");
    if (offered_bits > backhaul_bps)
        throw AdmissionError("regional-cloud backhaul over capacity: offered " +
                             fmt_double(offered_bits) + " bits/s against " +
                             fmt_double(backhaul_bps));
}

LocalOutcome local_compute(const Task& t, double cpu_hz, double energy_budget_j,
                           double arch_energy_const, double queue_wait_s, bool offloaded) {
    LocalOutcome o;
    o.energy_j = local_energy_j(t, cpu_hz, arch_energy_const);
    o.exec_s = local_exec_s(t, cpu_hz);
    o.verdict = local_verdict(t, cpu_hz, energy_budget_j, arch_energy_const);
    o.feasible = o.verdict == LocalVerdict::feasible;
    if (offloaded) {
        o.total_local_s = 0.0;
    } else if (o.feasible) {
        o.total_local_s = o.exec_s;
    } else {
        o.total_local_s = o.exec_s + queue_wait_s;
    }
    return o;
}

RemoteOutcome serving_ec_time(const Task& t, double access_bps, double fronthaul_bps,
                              double alloc_hz) {
    RemoteOutcome o;
    o.scenario = RemoteScenario::serving_ec;
    o.tx_s = tx_delay_s(t.bits, access_bps, fronthaul_bps);
    o.exec_s = ec_exec_s(t, alloc_hz);
    o.total_s = o.tx_s + o.exec_s;
    return o;
}

RemoteOutcome neighbor_ec_time(const Task& t, double access_bps, double fronthaul_bps,
                               const ForwardHop& hop, double prop_speed_mps, double alloc_hz) {
    RemoteOutcome o;
    o.scenario = RemoteScenario::neighbor_ec;
    if (hop.link_bps <= 0.0) throw DomainError("neighbor_ec_time: no inter-EC link rate");
    o.tx_s = tx_delay_s(t.bits, access_bps, fronthaul_bps);
    o.hop_transfer_s = hop.aggregate_bits / hop.link_bps;
    o.hop_prop_s = hop.distance_m / prop_speed_mps;
    o.exec_s = ec_exec_s(t, alloc_hz);
    o.total_s = o.tx_s + o.hop_transfer_s + o.hop_prop_s + o.exec_s;
    return o;
}

RemoteOutcome regional_cloud_time(const Task& t, double access_bps, double fronthaul_bps,
                                  const ForwardHop& hop, double prop_speed_mps, double rc_hz,
                                  double offered_bits) {
    check_rc_admission(offered_bits, hop.link_bps);
    RemoteOutcome o;
    o.scenario = RemoteScenario::regional_cloud;
    o.tx_s = tx_delay_s(t.bits, access_bps, fronthaul_bps);
    o.hop_transfer_s = hop.aggregate_bits / hop.link_bps;
    o.hop_prop_s = hop.distance_m / prop_speed_mps;
    o.exec_s = ec_exec_s(t, rc_hz);
    o.total_s = o.tx_s + o.hop_transfer_s + o.hop_prop_s + o.exec_s;
    return o;
}

double total_offload_delay(bool offloaded, bool y_serving, bool y_neighbor, bool y_rc,
                           double serving_s, double neighbor_s, double rc_s) {
    const int active = (y_serving ? 1 : 0) + (y_neighbor ? 1 : 0) + (y_rc ? 1 : 0);
    if (!offloaded) {
        if (active != 0) throw DomainError("total_offload_delay: branch active without offload");
        return 0.0;
    }
    if (active != 1)
        throw DomainError("total_offload_delay: exactly one remote branch required when offloaded");
    if (y_serving) return serving_s;
    if (y_neighbor) return neighbor_s;
    return rc_s;
}

}  // namespace aopsim
