#include "aopsim/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "aopsim/common.hpp"
#include "aopsim/rng.hpp"

namespace aopsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double access_rate(const VehicleSpec& v, int sharers) {
    if (sharers <= 0) throw InternalError("access_rate: sharer count must be positive");
    const auto& tab = v.access_bps_by_n;
    if (tab.empty()) throw InternalError("access_rate: vehicle has no station");
    int idx = std::min<int>(sharers, static_cast<int>(tab.size())) - 1;
    return tab[static_cast<size_t>(idx)];
}

double ec_capacity(const Instance& inst, int ec) {
    auto it = inst.ec_cpu_hz.find(ec);
    if (it == inst.ec_cpu_hz.end())
        throw DomainError("unknown edge cloud id " + std::to_string(ec));
    return it->second;
}

// Serving-EC capacity bound of vehicle v's allocation constraint; 0 when the
// vehicle has no offload path (the constraint is absent).
double serving_cap(const Instance& inst, int v) {
    const VehicleSpec& spec = inst.vehicles[static_cast<size_t>(v)];
    if (spec.rat < 0 || spec.serving_ec < 0) return 0.0;
    return ec_capacity(inst, spec.serving_ec);
}

void check_multipliers(const Instance& inst, const std::vector<double>& lambda,
                       const std::vector<double>& mu) {
    const size_t n = inst.vehicles.size();
    if (lambda.size() != n || mu.size() != n)
        throw DomainError("multiplier vectors must have one entry per vehicle");
    for (size_t i = 0; i < n; ++i) {
        if (lambda[i] < 0.0 || mu[i] < 0.0)
            throw DomainError("negative multiplier for vehicle " + std::to_string(i));
    }
}

// Euclidean projection onto the probability simplex (sort-based).
std::vector<double> project_simplex(std::vector<double> y) {
    std::vector<double> u = y;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, tau = 0.0;
    int rho = 0;
    for (size_t j = 0; j < u.size(); ++j) {
        css += u[j];
        double t = (css - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) {
            rho = static_cast<int>(j + 1);
            tau = t;
        }
    }
    if (rho == 0) tau = (css - 1.0) / static_cast<double>(u.size());
    for (double& v : y) v = std::max(0.0, v - tau);
    return y;
}

struct AdjustedCost {
    double cost = 0.0;   // objective term + multiplier penalties, vehicle v only
    bool admissible = true;
};

// Per-vehicle multiplier-adjusted cost inside a full profile evaluation.
AdjustedCost adjusted_cost_of(const Instance& inst, const EvalResult& ev, int v,
                              const std::vector<double>& lambda, const std::vector<double>& mu,
                              Objective obj) {
    AdjustedCost out;
    const size_t vi = static_cast<size_t>(v);
    double base = (obj == Objective::aop) ? cycle_q_score(ev.delay_s[vi], inst.wait)
                                          : ev.delay_s[vi];
    out.cost = base + lambda[vi] * ev.frac_a[vi] + mu[vi] * ev.alloc_hz[vi];
    out.admissible = ev.rc_admissible;
    return out;
}

}  // namespace

const char* action_kind_name(ActionKind k) {
    switch (k) {
        case ActionKind::serving_ec: return "serving_ec";
        case ActionKind::neighbor_ec: return "neighbor_ec";
        case ActionKind::regional_cloud: return "regional_cloud";
        case ActionKind::local: return "local";
    }
    return "?";
}

std::vector<ActionKind> candidate_actions(const Instance& inst, int v) {
    if (v < 0 || static_cast<size_t>(v) >= inst.vehicles.size())
        throw DomainError("candidate_actions: vehicle index out of range");
    const VehicleSpec& spec = inst.vehicles[static_cast<size_t>(v)];
    std::vector<ActionKind> out;
    bool has_path = spec.rat >= 0 && spec.serving_ec >= 0 && !spec.access_bps_by_n.empty() &&
                    spec.fronthaul_bps > 0.0;
    if (has_path) {
        out.push_back(ActionKind::serving_ec);
        if (spec.neighbor_ec >= 0 &&
            inst.inter_ec_bps.count({spec.serving_ec, spec.neighbor_ec}) > 0)
            out.push_back(ActionKind::neighbor_ec);
        if (inst.backhaul_bps.count(spec.serving_ec) > 0)
            out.push_back(ActionKind::regional_cloud);
    }
    out.push_back(ActionKind::local);
    return out;
}

EvalResult evaluate_profile(const Instance& inst, const std::vector<ActionKind>& actions) {
    const size_t n = inst.vehicles.size();
    if (actions.size() != n)
        throw DomainError("evaluate_profile: one action per vehicle required");

    EvalResult ev;
    ev.delay_s.assign(n, 0.0);
    ev.frac_a.assign(n, 0.0);
    ev.alloc_hz.assign(n, 0.0);

    // Station sharer counts: every offloading vehicle occupies its station.
    std::map<int, int> station_users;
    // Edge-cloud hosted workload (cycles-per-bit sums) for proportional split.
    std::map<int, double> ec_zsum;
    // Aggregates per forward link.
    std::map<std::pair<int, int>, double> inter_bits;
    std::map<int, double> backhaul_bits;

    for (size_t i = 0; i < n; ++i) {
        const VehicleSpec& spec = inst.vehicles[i];
        if (actions[i] == ActionKind::local) continue;
        if (spec.rat < 0 || spec.serving_ec < 0)
            throw DomainError("vehicle " + std::to_string(i) + " has no offload path");
        station_users[spec.rat] += 1;
        switch (actions[i]) {
            case ActionKind::serving_ec:
                ec_zsum[spec.serving_ec] += spec.task.cycles_per_bit;
                break;
            case ActionKind::neighbor_ec:
                if (spec.neighbor_ec < 0)
                    throw DomainError("vehicle " + std::to_string(i) + " has no forward target");
                ec_zsum[spec.neighbor_ec] += spec.task.cycles_per_bit;
                inter_bits[{spec.serving_ec, spec.neighbor_ec}] += spec.task.bits;
                break;
            case ActionKind::regional_cloud:
                backhaul_bits[spec.serving_ec] += spec.task.bits;
                break;
            case ActionKind::local:
                break;
        }
    }

    for (const auto& [ec, offered] : backhaul_bits) {
        auto it = inst.backhaul_bps.find(ec);
        if (it == inst.backhaul_bps.end())
            throw DomainError("no backhaul capacity for edge cloud " + std::to_string(ec));
        if (offered > it->second) {
            ev.rc_admissible = false;
            ev.overloaded_backhauls.push_back(ec);
        }
    }

    for (size_t i = 0; i < n; ++i) {
        const VehicleSpec& spec = inst.vehicles[i];
        double delay = 0.0;
        switch (actions[i]) {
            case ActionKind::local: {
                LocalMode mode = spec.local_feasible ? LocalMode::immediate : LocalMode::queued;
                delay = local_delay_s(spec.task, spec.cpu_hz, inst.local_queue_wait_s, mode);
                break;
            }
            case ActionKind::serving_ec:
            case ActionKind::neighbor_ec:
            case ActionKind::regional_cloud: {
                int users = station_users[spec.rat];
                double rate = access_rate(spec, users);
                ev.frac_a[i] = 1.0 / static_cast<double>(users);
                double tx = tx_delay_s(spec.task.bits, rate, spec.fronthaul_bps);
                if (actions[i] == ActionKind::serving_ec) {
                    double cap = ec_capacity(inst, spec.serving_ec);
                    // the share is <= cap by construction; keep it so in floats
                    double p = std::min(cap, cap * spec.task.cycles_per_bit /
                                                 ec_zsum[spec.serving_ec]);
                    ev.alloc_hz[i] = p;
                    ev.ec_alloc_sums[spec.serving_ec] += p;
                    delay = tx + ec_exec_s(spec.task, p);
                } else if (actions[i] == ActionKind::neighbor_ec) {
                    double cap = ec_capacity(inst, spec.neighbor_ec);
                    double p = std::min(cap, cap * spec.task.cycles_per_bit /
                                                 ec_zsum[spec.neighbor_ec]);
                    auto key = std::make_pair(spec.serving_ec, spec.neighbor_ec);
                    auto lit = inst.inter_ec_bps.find(key);
                    if (lit == inst.inter_ec_bps.end())
                        throw DomainError("no inter-EC link for vehicle " + std::to_string(i));
                    ForwardHop hop{inter_bits[key], lit->second,
                                   inst.inter_ec_dist_m.count(key)
                                       ? inst.inter_ec_dist_m.at(key)
                                       : 0.0};
                    delay = tx + hop_delay_s(hop, inst.prop_speed_mps) + ec_exec_s(spec.task, p);
                } else {
                    auto bit = inst.backhaul_bps.find(spec.serving_ec);
                    if (bit == inst.backhaul_bps.end())
                        throw DomainError("no backhaul for vehicle " + std::to_string(i));
                    ForwardHop hop{backhaul_bits[spec.serving_ec], bit->second,
                                   inst.rc_dist_m.count(spec.serving_ec)
                                       ? inst.rc_dist_m.at(spec.serving_ec)
                                       : 0.0};
                    delay = tx + hop_delay_s(hop, inst.prop_speed_mps) +
                            ec_exec_s(spec.task, inst.rc_hz);
                }
                ev.rat_frac_sums[spec.rat] += ev.frac_a[i];
                break;
            }
        }
        ev.delay_s[i] = delay;
        ev.sum_delay += delay;
        ev.sum_q += cycle_q_score(delay, inst.wait);
    }
    return ev;
}

double objective_of(const EvalResult& ev, Objective obj) {
    return obj == Objective::aop ? ev.sum_q : ev.sum_delay;
}

EnumerationResult enumerate_policies(const Instance& inst, Objective obj) {
    const size_t n = inst.vehicles.size();
    if (n > 5)
        throw DomainError("enumerate_policies: refusing more than 5 vehicles (got " +
                          std::to_string(n) + ")");
    std::vector<std::vector<ActionKind>> cands(n);
    for (size_t v = 0; v < n; ++v) {
        cands[v] = candidate_actions(inst, static_cast<int>(v));
        if (cands[v].size() > 6)
            throw DomainError("enumerate_policies: more than 6 candidate actions for vehicle " +
                              std::to_string(v));
    }

    EnumerationResult best;
    best.objective = kInf;
    std::vector<size_t> idx(n, 0);
    std::vector<ActionKind> actions(n);
    bool done = n == 0;
    if (done) {
        best.feasible_found = true;
        best.objective = 0.0;
        return best;
    }
    while (!done) {
        for (size_t v = 0; v < n; ++v) actions[v] = cands[v][idx[v]];
        EvalResult ev = evaluate_profile(inst, actions);
        if (ev.rc_admissible) {
            double val = objective_of(ev, obj);
            if (!best.feasible_found || val < best.objective) {
                best.feasible_found = true;
                best.objective = val;
                best.actions = actions;
            }
        }
        // odometer increment
        size_t v = 0;
        while (v < n) {
            if (++idx[v] < cands[v].size()) break;
            idx[v] = 0;
            ++v;
        }
        done = v == n;
    }
    return best;
}

double lagrangian(const Instance& inst, const std::vector<ActionKind>& actions,
                  const std::vector<double>& lambda, const std::vector<double>& mu,
                  Objective obj) {
    check_multipliers(inst, lambda, mu);
    EvalResult ev = evaluate_profile(inst, actions);
    double val = objective_of(ev, obj);
    for (size_t v = 0; v < inst.vehicles.size(); ++v) {
        val += lambda[v] * (ev.frac_a[v] - 1.0);
        double cap = serving_cap(inst, static_cast<int>(v));
        double alloc = actions[v] == ActionKind::serving_ec ? ev.alloc_hz[v] : 0.0;
        val += mu[v] * (alloc - cap);
    }
    return val;
}

DualValue dual_value(const Instance& inst, const std::vector<double>& lambda,
                     const std::vector<double>& mu, Objective obj) {
    const size_t n = inst.vehicles.size();
    if (lambda.size() != n || mu.size() != n)
        throw DomainError("multiplier vectors must have one entry per vehicle");
    DualValue out;
    for (size_t v = 0; v < n; ++v) {
        if (!std::isfinite(lambda[v]) || !std::isfinite(mu[v])) {
            out.value = -kInf;
            out.finite = false;
            return out;
        }
        if (lambda[v] < 0.0 || mu[v] < 0.0)
            throw DomainError("negative multiplier for vehicle " + std::to_string(v));
    }

    auto score = [&](double delay) {
        return obj == Objective::aop ? cycle_q_score(delay, inst.wait) : delay;
    };

    // Realizable congestion sets. The per-vehicle minimum over actions and
    // congestion levels lower-bounds the vehicle's contribution to the
    // Lagrangian at any joint profile, because every realized congestion
    // level appears in the enumerated set (exact mode) or is bounded
    // term-wise (conservative mode for large instances).
    const bool exact = n <= 10;

    // Station population caps: how many vehicles could share each station.
    std::map<int, int> station_pop;
    for (const auto& spec : inst.vehicles)
        if (spec.rat >= 0) station_pop[spec.rat] += 1;
    // Pools of hosted workloads per edge cloud, for exact subset sums.
    std::map<int, std::vector<double>> ec_pool_z;
    std::map<int, double> ec_total_z;
    for (const auto& spec : inst.vehicles) {
        if (spec.serving_ec >= 0) {
            ec_pool_z[spec.serving_ec].push_back(spec.task.cycles_per_bit);
            ec_total_z[spec.serving_ec] += spec.task.cycles_per_bit;
        }
        if (spec.neighbor_ec >= 0) {
            ec_pool_z[spec.neighbor_ec].push_back(spec.task.cycles_per_bit);
            ec_total_z[spec.neighbor_ec] += spec.task.cycles_per_bit;
        }
    }

    // Subset sums of a pool excluding one occurrence of `own` (the vehicle's
    // own workload always counts once).
    auto denom_sums = [](std::vector<double> pool, double own) {
        auto it = std::find(pool.begin(), pool.end(), own);
        if (it != pool.end()) pool.erase(it);
        std::vector<double> sums{own};
        for (double z : pool) {
            size_t sz = sums.size();
            for (size_t i = 0; i < sz; ++i) sums.push_back(sums[i] + z);
        }
        std::sort(sums.begin(), sums.end());
        sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
        return sums;
    };

    double total = 0.0;
    for (size_t v = 0; v < n; ++v) {
        const VehicleSpec& spec = inst.vehicles[v];
        double best = kInf;
        for (ActionKind kind : candidate_actions(inst, static_cast<int>(v))) {
            if (kind == ActionKind::local) {
                LocalMode mode = spec.local_feasible ? LocalMode::immediate : LocalMode::queued;
                best = std::min(best, score(local_delay_s(spec.task, spec.cpu_hz,
                                                          inst.local_queue_wait_s, mode)));
                continue;
            }
            int max_users = std::max(1, station_pop.count(spec.rat)
                                            ? station_pop.at(spec.rat)
                                            : 1);
            int host = kind == ActionKind::neighbor_ec ? spec.neighbor_ec : spec.serving_ec;
            for (int users = 1; users <= max_users; ++users) {
                double tx = tx_delay_s(spec.task.bits, access_rate(spec, users),
                                       spec.fronthaul_bps);
                double lam_term = lambda[v] / static_cast<double>(users);
                if (kind == ActionKind::serving_ec) {
                    double cap = ec_capacity(inst, host);
                    if (exact) {
                        for (double d : denom_sums(ec_pool_z[host], spec.task.cycles_per_bit)) {
                            double p = cap * spec.task.cycles_per_bit / d;
                            double c = score(tx + ec_exec_s(spec.task, p)) + lam_term +
                                       mu[v] * p;
                            best = std::min(best, c);
                        }
                    } else {
                        // Term-wise bound: fastest execution (alone) and
                        // smallest allocation (fully shared) bounded apart.
                        double c = score(tx + ec_exec_s(spec.task, cap)) + lam_term +
                                   mu[v] * cap * spec.task.cycles_per_bit / ec_total_z[host];
                        best = std::min(best, c);
                    }
                } else if (kind == ActionKind::neighbor_ec) {
                    double cap = ec_capacity(inst, host);
                    auto key = std::make_pair(spec.serving_ec, spec.neighbor_ec);
                    ForwardHop hop{spec.task.bits, inst.inter_ec_bps.at(key),
                                   inst.inter_ec_dist_m.count(key)
                                       ? inst.inter_ec_dist_m.at(key)
                                       : 0.0};
                    double c = score(tx + hop_delay_s(hop, inst.prop_speed_mps) +
                                     ec_exec_s(spec.task, cap)) +
                               lam_term;
                    best = std::min(best, c);
                } else {
                    ForwardHop hop{spec.task.bits, inst.backhaul_bps.at(spec.serving_ec),
                                   inst.rc_dist_m.count(spec.serving_ec)
                                       ? inst.rc_dist_m.at(spec.serving_ec)
                                       : 0.0};
                    double c = score(tx + hop_delay_s(hop, inst.prop_speed_mps) +
                                     ec_exec_s(spec.task, inst.rc_hz)) +
                               lam_term;
                    best = std::min(best, c);
                }
            }
        }
        total += best - lambda[v] - mu[v] * serving_cap(inst, static_cast<int>(v));
    }
    out.value = total;
    return out;
}

KktResidual kkt_residual(const Instance& inst, const std::vector<ActionKind>& actions,
                         const std::vector<double>& lambda, const std::vector<double>& mu,
                         Objective obj) {
    const size_t n = inst.vehicles.size();
    if (actions.size() != n)
        throw DomainError("kkt_residual: one action per vehicle required");
    if (lambda.size() != n || mu.size() != n)
        throw DomainError("multiplier vectors must have one entry per vehicle");

    KktResidual out;
    EvalResult incumbent = evaluate_profile(inst, actions);

    // Linearized per-vehicle costs: vehicle v deviates to F, everyone else
    // holds. Deviations that would overload a backhaul are not feasible
    // directions and stay out of the simplex. The relaxed Lagrangian over
    // simplex weights theta is linear in these costs; its gradient is taken
    // by central finite differences.
    double stationarity = 0.0;
    for (size_t v = 0; v < n; ++v) {
        std::vector<double> cost;
        std::vector<double> theta;
        for (ActionKind kind : candidate_actions(inst, static_cast<int>(v))) {
            std::vector<ActionKind> trial = actions;
            trial[v] = kind;
            EvalResult ev = evaluate_profile(inst, trial);
            if (!ev.rc_admissible && kind != actions[v]) continue;
            cost.push_back(adjusted_cost_of(inst, ev, static_cast<int>(v), lambda, mu, obj).cost);
            theta.push_back(kind == actions[v] ? 1.0 : 0.0);
        }
        const size_t m = cost.size();
        auto relaxed = [&](const std::vector<double>& th) {
            double s = 0.0;
            for (size_t f = 0; f < m; ++f) s += th[f] * cost[f];
            return s;
        };
        std::vector<double> grad(m, 0.0);
        for (size_t f = 0; f < m; ++f) {
            double h = 1e-5 * std::max(1.0, std::fabs(theta[f]));
            std::vector<double> up = theta, dn = theta;
            up[f] += h;
            dn[f] -= h;
            grad[f] = (relaxed(up) - relaxed(dn)) / (2.0 * h);
        }
        std::vector<double> step(m);
        for (size_t f = 0; f < m; ++f) step[f] = theta[f] - grad[f];
        std::vector<double> proj = project_simplex(step);
        for (size_t f = 0; f < m; ++f)
            stationarity = std::max(stationarity, std::fabs(proj[f] - theta[f]));
    }
    out.stationarity = stationarity;

    for (size_t v = 0; v < n; ++v) {
        double slack_a = incumbent.frac_a[v] - 1.0;
        double cap = serving_cap(inst, static_cast<int>(v));
        double alloc = actions[v] == ActionKind::serving_ec ? incumbent.alloc_hz[v] : 0.0;
        double slack_p = alloc - cap;
        out.comp_slack = std::max(out.comp_slack,
                                  std::max(std::fabs(lambda[v] * slack_a),
                                           std::fabs(mu[v] * slack_p)));
        out.dual_viol = std::max(out.dual_viol, std::max(-lambda[v], -mu[v]));
    }
    out.dual_viol = std::max(0.0, out.dual_viol);

    for (const auto& [rat, frac] : incumbent.rat_frac_sums)
        out.primal_viol = std::max(out.primal_viol, frac - 1.0);
    for (const auto& [ec, alloc] : incumbent.ec_alloc_sums)
        out.primal_viol = std::max(out.primal_viol, alloc - ec_capacity(inst, ec));
    out.primal_viol = std::max(out.primal_viol, 0.0);
    return out;
}

namespace {

// Admission repair: demote regional-cloud users off overloaded backhauls one
// at a time, sending the demoted vehicle to its cheapest fallback rung by
// adjusted cost.
void repair_admission(const Instance& inst, std::vector<ActionKind>& actions,
                      const std::vector<double>& lambda, const std::vector<double>& mu,
                      Objective obj) {
    for (;;) {
        EvalResult ev = evaluate_profile(inst, actions);
        if (ev.rc_admissible) return;
        int target_ec = ev.overloaded_backhauls.front();
        int best_v = -1;
        ActionKind best_kind = ActionKind::local;
        double best_cost = kInf;
        for (size_t v = 0; v < actions.size(); ++v) {
            if (actions[v] != ActionKind::regional_cloud) continue;
            if (inst.vehicles[v].serving_ec != target_ec) continue;
            auto cands = candidate_actions(inst, static_cast<int>(v));
            for (ActionKind kind : {ActionKind::neighbor_ec, ActionKind::serving_ec,
                                    ActionKind::local}) {
                if (std::find(cands.begin(), cands.end(), kind) == cands.end()) continue;
                std::vector<ActionKind> trial = actions;
                trial[v] = kind;
                EvalResult tev = evaluate_profile(inst, trial);
                double c = adjusted_cost_of(inst, tev, static_cast<int>(v), lambda, mu, obj).cost;
                if (c < best_cost) {
                    best_cost = c;
                    best_v = static_cast<int>(v);
                    best_kind = kind;
                }
            }
        }
        if (best_v < 0) throw InternalError("admission repair found no demotable vehicle");
        actions[static_cast<size_t>(best_v)] = best_kind;
    }
}

// Primal recovery. Per-vehicle best response stalls at equilibria where
// every unilateral move hurts the mover even when it would relieve a
// shared station or edge cloud for everyone else. Steepest descent on the
// global objective over single moves and joint two-vehicle moves escapes
// those points; only pairs that actually contend for a resource are worth
// the quadratic scan on large instances.
bool coordination_polish(const Instance& inst, std::vector<ActionKind>& actions,
                         const std::vector<std::vector<ActionKind>>& cands,
                         const std::vector<std::vector<char>>& pair_ok, Objective obj) {
    const size_t n = actions.size();
    bool any = false;
    for (;;) {
        EvalResult cur = evaluate_profile(inst, actions);
        double cur_obj = objective_of(cur, obj);
        double best_obj = cur_obj - 1e-9 * std::max(1.0, std::fabs(cur_obj));
        size_t bu = n, bv = n;
        ActionKind bku = ActionKind::local, bkv = ActionKind::local;
        std::vector<ActionKind> trial = actions;
        for (size_t u = 0; u < n; ++u) {
            for (ActionKind ku : cands[u]) {
                if (ku == actions[u]) continue;
                trial[u] = ku;
                EvalResult ev = evaluate_profile(inst, trial);
                if (ev.rc_admissible) {
                    double o = objective_of(ev, obj);
                    if (o < best_obj) {
                        best_obj = o;
                        bu = u;
                        bku = ku;
                        bv = n;
                    }
                }
                for (size_t v = u + 1; v < n; ++v) {
                    if (!pair_ok[u][v]) continue;
                    for (ActionKind kv : cands[v]) {
                        if (kv == actions[v]) continue;
                        trial[v] = kv;
                        EvalResult ev2 = evaluate_profile(inst, trial);
                        trial[v] = actions[v];
                        if (!ev2.rc_admissible) continue;
                        double o = objective_of(ev2, obj);
                        if (o < best_obj) {
                            best_obj = o;
                            bu = u;
                            bku = ku;
                            bv = v;
                            bkv = kv;
                        }
                    }
                }
                trial[u] = actions[u];
            }
        }
        if (bu == n) break;
        actions[bu] = bku;
        if (bv < n) actions[bv] = bkv;
        any = true;
    }
    return any;
}

}  // namespace

SolveReport solve(const Instance& inst, const SolveOptions& opt) {
    const size_t n = inst.vehicles.size();
    std::vector<std::vector<ActionKind>> cands(n);
    for (size_t v = 0; v < n; ++v) cands[v] = candidate_actions(inst, static_cast<int>(v));

    auto has = [&](size_t v, ActionKind k) {
        return std::find(cands[v].begin(), cands[v].end(), k) != cands[v].end();
    };

    // Joint moves matter only between vehicles that can contend: same
    // station, overlapping serving/neighbor edge clouds, or a shared
    // backhaul. Small instances just try every pair.
    std::vector<std::vector<char>> pair_ok(n, std::vector<char>(n, 0));
    for (size_t u = 0; u < n; ++u) {
        const VehicleSpec& a = inst.vehicles[u];
        for (size_t v = u + 1; v < n; ++v) {
            const VehicleSpec& b = inst.vehicles[v];
            auto touches = [](int ec, const VehicleSpec& w) {
                return ec >= 0 && (ec == w.serving_ec || ec == w.neighbor_ec);
            };
            bool share = n <= 12 || (a.rat >= 0 && a.rat == b.rat) ||
                         touches(a.serving_ec, b) || touches(a.neighbor_ec, b);
            pair_ok[u][v] = pair_ok[v][u] = share ? 1 : 0;
        }
    }

    // Start profiles: greedy alone-best, all-local, all-serving, all-RC,
    // then seeded random draws.
    auto start_profile = [&](int r) {
        std::vector<ActionKind> a(n, ActionKind::local);
        if (r == 0) {
            for (size_t v = 0; v < n; ++v) {
                double best = kInf;
                for (ActionKind k : cands[v]) {
                    std::vector<ActionKind> solo(n, ActionKind::local);
                    solo[v] = k;
                    EvalResult ev = evaluate_profile(inst, solo);
                    double c = (opt.objective == Objective::aop)
                                   ? cycle_q_score(ev.delay_s[v], inst.wait)
                                   : ev.delay_s[v];
                    if (c < best) {
                        best = c;
                        a[v] = k;
                    }
                }
            }
        } else if (r == 1) {
            // all-local (already)
        } else if (r == 2) {
            for (size_t v = 0; v < n; ++v)
                if (has(v, ActionKind::serving_ec)) a[v] = ActionKind::serving_ec;
        } else if (r == 3) {
            for (size_t v = 0; v < n; ++v) {
                if (has(v, ActionKind::regional_cloud)) a[v] = ActionKind::regional_cloud;
                else if (has(v, ActionKind::serving_ec)) a[v] = ActionKind::serving_ec;
            }
        } else {
            Rng rng = Rng::substream(opt.seed, "solve/restart" + std::to_string(r));
            for (size_t v = 0; v < n; ++v)
                a[v] = cands[v][rng.uniform_int(cands[v].size())];
        }
        return a;
    };

    SolveReport best_report;
    bool have_best = false;

    const int restarts = std::max(1, opt.restarts);
    for (int r = 0; r < restarts; ++r) {
        std::vector<ActionKind> actions = start_profile(r);
        std::vector<double> lambda(n, 0.0), mu(n, 0.0);
        std::vector<double> history;
        std::vector<std::pair<std::vector<double>, std::vector<double>>> path;
        path.emplace_back(lambda, mu);
        Rng kick_rng = Rng::substream(opt.seed, "solve/kick" + std::to_string(r));
        repair_admission(inst, actions, lambda, mu, opt.objective);
        std::vector<ActionKind> incumbent = actions;
        double incumbent_obj = kInf;
        bool converged = false;
        int iters = 0;

        for (int k = 1; k <= std::max(1, opt.max_outer); ++k) {
            iters = k;
            // Best-response sweeps to a fixed point of the adjusted costs.
            // Moves that would overload a backhaul are off the table, so an
            // admissible profile stays admissible. The congestion
            // externalities admit no potential function, so the dynamics can
            // cycle even when a fixed point exists; a revisited profile
            // proves a cycle, and a seeded kick of one vehicle breaks it.
            std::set<std::vector<ActionKind>> seen;
            seen.insert(actions);
            for (int sweep = 0; sweep < 50; ++sweep) {
                bool changed = false;
                for (size_t off = 0; off < n; ++off) {
                    size_t v = (off + static_cast<size_t>(k - 1)) % std::max<size_t>(n, 1);
                    double best_c = kInf;
                    ActionKind best_k = actions[v];
                    for (ActionKind kind : cands[v]) {
                        std::vector<ActionKind> trial = actions;
                        trial[v] = kind;
                        EvalResult ev = evaluate_profile(inst, trial);
                        if (!ev.rc_admissible) continue;
                        double c =
                            adjusted_cost_of(inst, ev, static_cast<int>(v), lambda, mu,
                                             opt.objective)
                                .cost;
                        if (c < best_c - 1e-15) {
                            best_c = c;
                            best_k = kind;
                        }
                    }
                    if (best_k != actions[v]) {
                        actions[v] = best_k;
                        changed = true;
                    }
                }
                if (!changed) break;
                if (!seen.insert(actions).second) {
                    for (int attempt = 0; attempt < 8; ++attempt) {
                        size_t v = kick_rng.uniform_int(n);
                        ActionKind kind = cands[v][kick_rng.uniform_int(cands[v].size())];
                        if (kind == actions[v]) continue;
                        std::vector<ActionKind> trial = actions;
                        trial[v] = kind;
                        if (!evaluate_profile(inst, trial).rc_admissible) continue;
                        actions[v] = kind;
                        break;
                    }
                    seen.clear();
                    seen.insert(actions);
                }
            }
            repair_admission(inst, actions, lambda, mu, opt.objective);

            EvalResult ev = evaluate_profile(inst, actions);
            double obj_val = objective_of(ev, opt.objective);
            if (ev.rc_admissible && obj_val < incumbent_obj) {
                incumbent_obj = obj_val;
                incumbent = actions;
            }

            // Projected subgradient ascent on realized slacks.
            double eta = opt.eta0 / std::sqrt(static_cast<double>(k));
            for (size_t v = 0; v < n; ++v) {
                lambda[v] = std::max(0.0, lambda[v] + eta * (ev.frac_a[v] - 1.0));
                double cap = serving_cap(inst, static_cast<int>(v));
                double alloc = actions[v] == ActionKind::serving_ec ? ev.alloc_hz[v] : 0.0;
                mu[v] = std::max(0.0, mu[v] + eta * (alloc - cap));
            }

            path.emplace_back(lambda, mu);

            KktResidual res = kkt_residual(inst, actions, lambda, mu, opt.objective);
            double residual = std::max(std::max(res.stationarity, res.comp_slack),
                                       std::max(res.primal_viol, res.dual_viol));
            history.push_back(residual);
            if (residual <= opt.epsilon) {
                converged = true;
                break;
            }
        }

        // Primal recovery on the incumbent: the dual iterate path above is
        // what the residual history certifies; the returned profile may
        // only get better.
        coordination_polish(inst, incumbent, cands, pair_ok, opt.objective);

        EvalResult final_ev = evaluate_profile(inst, incumbent);
        double final_obj = objective_of(final_ev, opt.objective);
        bool better = !have_best || final_obj < best_report.objective ||
                      (final_obj == best_report.objective && converged &&
                       !best_report.converged);
        if (final_ev.rc_admissible && better) {
            have_best = true;
            best_report.actions = incumbent;
            best_report.lambda = lambda;
            best_report.mu = mu;
            best_report.objective = final_obj;
            best_report.residual_history = history;
            best_report.multiplier_path = path;
            best_report.iterations = iters;
            best_report.converged = converged;
            best_report.eval = final_ev;
        }
    }

    if (!have_best)
        throw InfeasibleError("no feasible action profile found: backhaul admission binding");

    best_report.policy.bins = opt.state_bins;
    best_report.policy.action_of_vehicle = best_report.actions;
    best_report.dual = dual_value(inst, best_report.lambda, best_report.mu, opt.objective);
    return best_report;
}

}  // namespace aopsim
