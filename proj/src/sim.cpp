#include "aopsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "aopsim/clustering.hpp"
#include "aopsim/common.hpp"
#include "aopsim/rng.hpp"

namespace aopsim {

namespace {

std::string rep_stream(int rep, int vehicle) {
    return "sim/rep" + std::to_string(rep) + "/veh" + std::to_string(vehicle);
}

// Distance from an edge-cloud site to the regional cloud.
double rc_dist_m(const Topology& topo, int ec) {
    return dist(topo.sites().at(static_cast<size_t>(ec)).xy, topo.rc_position());
}

double ec_dist_m(const Topology& topo, int a, int b) {
    return dist(topo.sites().at(static_cast<size_t>(a)).xy,
                topo.sites().at(static_cast<size_t>(b)).xy);
}

// Forward target designation: the nearest same-space edge cloud that is
// closer than the regional cloud, -1 when the space offers none.
int designated_neighbor(const Topology& topo, int ec) {
    double to_rc = rc_dist_m(topo, ec);
    for (int j : topo.space_neighbors(ec)) {
        if (!topo.has_inter_ec(ec, j)) continue;
        if (ec_dist_m(topo, ec, j) < to_rc) return j;
    }
    return -1;
}

// Per-round association of one vehicle: its nearest route station, the
// handshake gate at that station's coverage window, and the access-rate
// table for 1..V sharers.
struct Presentation {
    bool admitted = false;
    NoOffloadReason reason = NoOffloadReason::no_station;
    int rat = -1;
    int serving_ec = -1;
    int neighbor_ec = -1;
    std::vector<double> access_by_n;
    double fronthaul_bps = 0.0;
};

Presentation present(const Scenario& sc, const SimVehicle& v, double t, int fleet_size) {
    const Config& cfg = sc.cfg;
    Presentation pr;
    if (v.route_rats.empty()) return pr;

    Point pos = v.route.at(v.route_offset_m + v.speed_mps * t);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int rid : v.route_rats) {
        double d = dist(pos, sc.topo.rats().at(static_cast<size_t>(rid)).xy);
        if (d < best_d) {
            best_d = d;
            best = rid;
        }
    }
    const RatStation& st = sc.topo.rats().at(static_cast<size_t>(best));

    // The handshake is modelled at the station's coverage window: the route
    // threads the station position, so the window is hit head-on and the
    // gate reduces to the dwell-vs-deadline test. The radio link itself is
    // evaluated at the current distance.
    RouteGeometry window = route_geometry(0.0, 0.0, cfg.commplan.coverage_len_m, v.speed_mps);
    RatCandidate cand;
    cand.rat = st.id;
    cand.along_m = 0.0;
    cand.coverage = window.coverage;
    cand.dwell_s = window.dwell_s;
    if (st.kind == RatKind::wifi) {
        cand.wifi_bps = wifi_rate_bps(cfg.commplan, 1);
    } else {
        double snr = cellular_snr(cfg.commplan, best_d);
        cand.cell_bps = cellular_rate_bps(cfg.commplan.cell_bandwidth_mhz * 1e6, 1.0, snr);
    }
    RatSelection sel = select_rat({cand}, v.task.deadline_s, !v.local_feasible);
    pr.reason = sel.reason;
    if (!sel.offload) return pr;

    pr.admitted = true;
    pr.rat = st.id;
    pr.serving_ec = st.fronthaul_ec;
    pr.neighbor_ec = designated_neighbor(sc.topo, pr.serving_ec);
    pr.fronthaul_bps = sc.topo.fronthaul_bps(st.id);
    pr.access_by_n.resize(static_cast<size_t>(fleet_size));
    for (int n = 1; n <= fleet_size; ++n) {
        double r;
        if (st.kind == RatKind::wifi) {
            r = wifi_rate_bps(cfg.commplan, n);
        } else {
            double snr = cellular_snr(cfg.commplan, best_d);
            r = cellular_rate_bps(cfg.commplan.cell_bandwidth_mhz * 1e6,
                                  1.0 / static_cast<double>(n), snr);
        }
        pr.access_by_n[static_cast<size_t>(n - 1)] = r;
    }
    return pr;
}

// Shared planning resources, identical for every round of a run.
struct SharedResources {
    std::map<int, double> ec_cpu_hz;
    std::map<int, double> backhaul_bps;
    std::map<int, double> rc_dist;
    std::map<std::pair<int, int>, double> inter_bps;
    std::map<std::pair<int, int>, double> inter_dist;
};

SharedResources shared_resources(const Scenario& sc) {
    SharedResources r;
    const int n = static_cast<int>(sc.topo.sites().size());
    for (int e = 0; e < n; ++e) {
        r.ec_cpu_hz[e] = sc.ec_cpu_hz.at(static_cast<size_t>(e));
        r.backhaul_bps[e] = sc.topo.backhaul_bps(e);
        r.rc_dist[e] = rc_dist_m(sc.topo, e);
        for (int j : sc.topo.space_neighbors(e)) {
            if (!sc.topo.has_inter_ec(e, j)) continue;
            r.inter_bps[{e, j}] = sc.topo.inter_ec_bps(e, j);
            r.inter_dist[{e, j}] = ec_dist_m(sc.topo, e, j);
        }
    }
    return r;
}

Instance make_instance(const Scenario& sc, const SharedResources& rs,
                       const std::vector<Presentation>& pres, const WaitMoments& wait) {
    Instance inst;
    inst.ec_cpu_hz = rs.ec_cpu_hz;
    inst.rc_hz = sc.cfg.sim.rc_ghz * 1e9;
    inst.backhaul_bps = rs.backhaul_bps;
    inst.rc_dist_m = rs.rc_dist;
    inst.inter_ec_bps = rs.inter_bps;
    inst.inter_ec_dist_m = rs.inter_dist;
    inst.prop_speed_mps = sc.cfg.compute.prop_speed_mps;
    inst.local_queue_wait_s = sc.cfg.compute.local_queue_wait_s;
    inst.wait = wait;
    inst.vehicles.reserve(sc.vehicles.size());
    for (size_t v = 0; v < sc.vehicles.size(); ++v) {
        const SimVehicle& sv = sc.vehicles[v];
        const Presentation& pr = pres[v];
        VehicleSpec spec;
        spec.task = sv.task;
        spec.cpu_hz = sv.cpu_hz;
        spec.local_feasible = sv.local_feasible;
        if (pr.admitted) {
            spec.rat = pr.rat;
            spec.serving_ec = pr.serving_ec;
            spec.neighbor_ec = pr.neighbor_ec;
            spec.access_bps_by_n = pr.access_by_n;
            spec.fronthaul_bps = pr.fronthaul_bps;
        }
        inst.vehicles.push_back(std::move(spec));
    }
    return inst;
}

// Load-relative spillover ladder: stay at the serving edge cloud while the
// hypothetical share keeps a usable floor, spill to space members, then the
// regional cloud, and keep the task local when everything is saturated.
std::vector<ActionKind> heuristic_actions(const Scenario& sc, const SharedResources& rs,
                                          Instance& inst, std::vector<Presentation>& pres) {
    const double floor_frac = sc.cfg.optimizer.ec_share_floor;
    std::vector<ActionKind> actions(inst.vehicles.size(), ActionKind::local);
    std::map<int, double> zsum;
    std::map<int, double> backbits;
    for (size_t v = 0; v < inst.vehicles.size(); ++v) {
        VehicleSpec& spec = inst.vehicles[v];
        if (spec.rat < 0) continue;
        double z = spec.task.cycles_per_bit;
        int e = spec.serving_ec;
        double cap_e = rs.ec_cpu_hz.at(e);
        if (cap_e * z / (zsum[e] + z) >= floor_frac * cap_e) {
            actions[v] = ActionKind::serving_ec;
            zsum[e] += z;
            continue;
        }
        bool placed = false;
        for (int j : sc.topo.space_neighbors(e)) {
            if (!rs.inter_bps.count({e, j})) continue;
            double cap_j = rs.ec_cpu_hz.at(j);
            if (cap_j * z / (zsum[j] + z) >= floor_frac * cap_j) {
                spec.neighbor_ec = j;
                pres[v].neighbor_ec = j;
                actions[v] = ActionKind::neighbor_ec;
                zsum[j] += z;
                placed = true;
                break;
            }
        }
        if (placed) continue;
        if (rs.backhaul_bps.count(e) &&
            backbits[e] + spec.task.bits <= rs.backhaul_bps.at(e)) {
            actions[v] = ActionKind::regional_cloud;
            backbits[e] += spec.task.bits;
        }
        // else: stays local this round
    }
    return actions;
}

// Lower a planned tier choice onto the current round's presentation,
// falling down the ladder when the planned rung is unavailable.
ActionKind resolve_planned(ActionKind planned, const VehicleSpec& spec) {
    if (spec.rat < 0) return ActionKind::local;
    if (planned == ActionKind::neighbor_ec && spec.neighbor_ec < 0)
        return ActionKind::serving_ec;
    return planned;
}

// Demote regional-cloud users off overloaded backhauls (highest vehicle id
// first) so the admission constraint holds by construction.
void demote_rc_overflow(const Instance& inst, std::vector<ActionKind>& actions) {
    for (;;) {
        std::map<int, double> backbits;
        for (size_t v = 0; v < actions.size(); ++v)
            if (actions[v] == ActionKind::regional_cloud)
                backbits[inst.vehicles[v].serving_ec] += inst.vehicles[v].task.bits;
        int bad_ec = -1;
        for (const auto& [ec, bits] : backbits)
            if (bits > inst.backhaul_bps.at(ec)) {
                bad_ec = ec;
                break;
            }
        if (bad_ec < 0) return;
        for (size_t i = actions.size(); i-- > 0;) {
            if (actions[i] == ActionKind::regional_cloud &&
                inst.vehicles[i].serving_ec == bad_ec) {
                actions[i] = resolve_planned(ActionKind::serving_ec, inst.vehicles[i]);
                break;
            }
        }
    }
}

struct RoundTally {
    long cycles = 0;
    long offloaded = 0;
    long violations = 0;
    long count_local = 0, count_serving = 0, count_neighbor = 0, count_rc = 0;
    double sum_delay = 0.0, sum_offload_delay = 0.0;
};

}  // namespace

DecisionSource decision_source_from_name(const std::string& name) {
    if (name == "heuristic") return DecisionSource::heuristic;
    if (name == "solver") return DecisionSource::solver;
    if (name == "total_delay") return DecisionSource::total_delay;
    if (name == "fixed_local") return DecisionSource::fixed_local;
    if (name == "fixed_rc") return DecisionSource::fixed_rc;
    throw ConfigError("unknown decision source '" + name +
                      "' (expected heuristic, solver, total_delay, fixed_local, fixed_rc)");
}

const char* decision_source_name(DecisionSource s) {
    switch (s) {
        case DecisionSource::heuristic: return "heuristic";
        case DecisionSource::solver: return "solver";
        case DecisionSource::total_delay: return "total_delay";
        case DecisionSource::fixed_local: return "fixed_local";
        case DecisionSource::fixed_rc: return "fixed_rc";
    }
    return "?";
}

Scenario generate_scenario(const Config& cfg) {
    if (cfg.sim.vehicles < 1 || cfg.sim.vehicles > 10000)
        throw DomainError("vehicle count " + std::to_string(cfg.sim.vehicles) +
                          " outside [1, 10000]");
    if (cfg.sim.cycles < 2)
        throw DomainError("at least 2 update cycles required");

    Scenario sc;
    sc.cfg = cfg;
    sc.topo = Topology::build(cfg);

    std::vector<Point> pts;
    pts.reserve(sc.topo.sites().size());
    for (const auto& s : sc.topo.sites()) pts.push_back(s.xy);
    ApacsResult clusters = cluster_sites(pts, cfg);
    sc.cs_labels = clusters.labels;
    sc.topo.apply_collaboration_spaces(clusters.labels);

    Rng ec_rng = Rng::substream(cfg.sim.seed, "scenario/ec-cpu");
    sc.ec_cpu_hz.reserve(sc.topo.sites().size());
    for (size_t i = 0; i < sc.topo.sites().size(); ++i)
        sc.ec_cpu_hz.push_back(ec_rng.uniform(cfg.sim.ec_ghz_min, cfg.sim.ec_ghz_max) * 1e9);

    const int n_rats = static_cast<int>(sc.topo.rats().size());
    const int lo = std::max(2, cfg.sim.route_rats_min);
    const int hi = std::max(lo, std::min(cfg.sim.route_rats_max, n_rats));
    for (int v = 0; v < cfg.sim.vehicles; ++v) {
        Rng rng = Rng::substream(cfg.sim.seed, "scenario/veh" + std::to_string(v));
        SimVehicle sv;
        sv.id = v;
        int k = lo + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(hi - lo + 1)));
        std::vector<int> ids(static_cast<size_t>(n_rats));
        std::iota(ids.begin(), ids.end(), 0);
        rng.shuffle(ids);
        ids.resize(static_cast<size_t>(k));
        sv.route_rats = ids;
        std::vector<Point> waypoints;
        for (int rid : ids) waypoints.push_back(sc.topo.rats().at(static_cast<size_t>(rid)).xy);
        waypoints.push_back(waypoints.front());  // close the loop
        sv.route = Polyline(waypoints);
        sv.route_offset_m = rng.uniform(0.0, sv.route.length());
        sv.speed_mps = rng.uniform(cfg.sim.speed_mps_min, cfg.sim.speed_mps_max);
        sv.task.bits = rng.uniform(cfg.sim.task_mb_min, cfg.sim.task_mb_max) * 8e6;
        sv.task.deadline_s = rng.uniform(cfg.sim.deadline_s_min, cfg.sim.deadline_s_max);
        sv.task.cycles_per_bit = rng.uniform(cfg.sim.workload_cpb_min, cfg.sim.workload_cpb_max);
        sv.cpu_hz = rng.uniform(cfg.sim.vehicle_ghz_min, cfg.sim.vehicle_ghz_max) * 1e9;
        sv.energy_budget_j = cfg.sim.energy_budget_j;
        sv.verdict = local_verdict(sv.task, sv.cpu_hz, sv.energy_budget_j,
                                   cfg.compute.arch_energy_const);
        sv.local_feasible = sv.verdict == LocalVerdict::feasible;
        sc.vehicles.push_back(std::move(sv));
    }
    return sc;
}

Instance planning_instance(const Scenario& sc) {
    SharedResources rs = shared_resources(sc);
    std::vector<Presentation> pres;
    pres.reserve(sc.vehicles.size());
    for (const auto& sv : sc.vehicles)
        pres.push_back(present(sc, sv, 0.0, static_cast<int>(sc.vehicles.size())));
    SamplingPolicy pol{sampling_kind_from_name(sc.cfg.aop.sampling), sc.cfg.aop.beta_a,
                       sc.cfg.aop.beta_b};
    return make_instance(sc, rs, pres, wait_moments(pol));
}

RunResult run_scenario(const Scenario& sc, const RunOptions& opt) {
    const int V = static_cast<int>(sc.vehicles.size());
    if (V < 1) throw DomainError("scenario holds no vehicles");
    if (opt.cycles < 2) throw DomainError("at least 2 update cycles required");

    SharedResources rs = shared_resources(sc);
    WaitMoments wait = wait_moments(opt.sampling);

    // Tier plan for the solver-driven sources, from the t=0 snapshot.
    std::vector<ActionKind> planned;
    if (opt.source == DecisionSource::solver || opt.source == DecisionSource::total_delay) {
        Instance inst = planning_instance(sc);
        inst.wait = wait;
        SolveOptions sopt = opt.solver;
        sopt.objective = opt.source == DecisionSource::solver ? Objective::aop
                                                              : Objective::total_delay;
        planned = solve(inst, sopt).actions;
    }

    std::vector<UpdateTimeline> timelines(static_cast<size_t>(V), UpdateTimeline(0.0));
    std::vector<Rng> streams;
    streams.reserve(static_cast<size_t>(V));
    for (int v = 0; v < V; ++v)
        streams.push_back(Rng::substream(sc.cfg.sim.seed, rep_stream(opt.replication, v)));

    RoundTally tally;
    Metrics m;

    for (int round = 0; round < opt.cycles; ++round) {
        std::vector<Presentation> pres;
        pres.reserve(static_cast<size_t>(V));
        for (int v = 0; v < V; ++v)
            pres.push_back(present(sc, sc.vehicles[static_cast<size_t>(v)],
                                   timelines[static_cast<size_t>(v)].next_sample_at(), V));
        Instance inst = make_instance(sc, rs, pres, wait);

        std::vector<ActionKind> actions;
        switch (opt.source) {
            case DecisionSource::heuristic:
                actions = heuristic_actions(sc, rs, inst, pres);
                break;
            case DecisionSource::fixed_local:
                actions.assign(static_cast<size_t>(V), ActionKind::local);
                break;
            case DecisionSource::fixed_rc:
                actions.resize(static_cast<size_t>(V));
                for (int v = 0; v < V; ++v) {
                    const auto& spec = inst.vehicles[static_cast<size_t>(v)];
                    actions[static_cast<size_t>(v)] =
                        spec.rat >= 0 ? ActionKind::regional_cloud : ActionKind::local;
                }
                demote_rc_overflow(inst, actions);
                break;
            case DecisionSource::solver:
            case DecisionSource::total_delay:
                actions.resize(static_cast<size_t>(V));
                for (int v = 0; v < V; ++v)
                    actions[static_cast<size_t>(v)] = resolve_planned(
                        planned[static_cast<size_t>(v)], inst.vehicles[static_cast<size_t>(v)]);
                demote_rc_overflow(inst, actions);
                break;
        }

        EvalResult ev = evaluate_profile(inst, actions);

        // Hard-constraint audit on the final profile.
        tally.cycles += V;
        m.audit.rounds += 1;
        for (const auto& [rat, frac] : ev.rat_frac_sums)
            if (frac > 1.0 + 1e-9) m.audit.access_violations += 1;
        {
            std::map<int, double> total_alloc;
            std::map<int, double> backbits;
            for (int v = 0; v < V; ++v) {
                const auto& spec = inst.vehicles[static_cast<size_t>(v)];
                if (actions[static_cast<size_t>(v)] == ActionKind::serving_ec)
                    total_alloc[spec.serving_ec] += ev.alloc_hz[static_cast<size_t>(v)];
                else if (actions[static_cast<size_t>(v)] == ActionKind::neighbor_ec)
                    total_alloc[spec.neighbor_ec] += ev.alloc_hz[static_cast<size_t>(v)];
                else if (actions[static_cast<size_t>(v)] == ActionKind::regional_cloud)
                    backbits[spec.serving_ec] += spec.task.bits;
            }
            for (const auto& [ec, alloc] : total_alloc)
                if (alloc > rs.ec_cpu_hz.at(ec) * (1.0 + 1e-9)) m.audit.alloc_violations += 1;
            for (const auto& [ec, bits] : backbits)
                if (bits > rs.backhaul_bps.at(ec) * (1.0 + 1e-9))
                    m.audit.admission_violations += 1;
        }

        // Link-load peaks via the traffic-class lowering.
        std::vector<OffloadFlow> flows;
        for (int v = 0; v < V; ++v) {
            const auto& spec = inst.vehicles[static_cast<size_t>(v)];
            ActionKind a = actions[static_cast<size_t>(v)];
            if (a == ActionKind::local) continue;
            OffloadFlow f;
            f.rat = spec.rat;
            f.serving_ec = spec.serving_ec;
            f.exec_ec = a == ActionKind::neighbor_ec ? spec.neighbor_ec : spec.serving_ec;
            f.to_rc = a == ActionKind::regional_cloud;
            f.bits = spec.task.bits;
            flows.push_back(f);
        }
        TrafficSummary traffic = traffic_classes(flows);
        for (const auto& [rat, bits] : traffic.fronthaul_bits)
            m.peak_fronthaul_bits = std::max(m.peak_fronthaul_bits, bits);
        for (const auto& [key, bits] : traffic.inter_ec_bits)
            m.peak_inter_ec_bits = std::max(m.peak_inter_ec_bits, bits);
        for (const auto& [ec, bits] : traffic.backhaul_bits)
            m.peak_backhaul_bits = std::max(m.peak_backhaul_bits, bits);

        for (int v = 0; v < V; ++v) {
            const size_t vi = static_cast<size_t>(v);
            const auto& spec = inst.vehicles[vi];
            double delay = ev.delay_s[vi];
            ActionKind a = actions[vi];
            bool offloaded = a != ActionKind::local;
            tally.sum_delay += delay;
            if (offloaded) {
                tally.offloaded += 1;
                tally.sum_offload_delay += delay;
            }
            if (delay > spec.task.deadline_s) tally.violations += 1;
            switch (a) {
                case ActionKind::local: tally.count_local += 1; break;
                case ActionKind::serving_ec: tally.count_serving += 1; break;
                case ActionKind::neighbor_ec: tally.count_neighbor += 1; break;
                case ActionKind::regional_cloud: tally.count_rc += 1; break;
            }

            double idle = opt.sampling.draw(streams[vi]);
            if (opt.await_ack && offloaded) {
                double ack = opt.ack_override_s;
                if (ack < 0.0) {
                    double bh = rs.backhaul_bps.at(spec.serving_ec);
                    double hop = rs.rc_dist.at(spec.serving_ec) / sc.cfg.compute.prop_speed_mps;
                    ack = 2.0 * (hop + sc.cfg.sim.ack_bits / bh);
                }
                idle += ack;
            }
            timelines[vi].record_fixed(delay, idle);
        }
    }

    // Age metrics: per-vehicle ratios plus the pooled fleet ratio.
    double num = 0.0, den = 0.0;
    m.vehicle_aop.resize(static_cast<size_t>(V));
    for (int v = 0; v < V; ++v) {
        const UpdateTimeline& tl = timelines[static_cast<size_t>(v)];
        m.vehicle_aop[static_cast<size_t>(v)] = tl.average_aop();
        for (int i = 1; i < tl.size(); ++i) {
            num += tl.q1(i) + tl.q2(i);
            den += tl.L(i) + tl.N(i);
        }
    }
    m.fleet_aop = den > 0.0 ? num / den : 0.0;
    m.mean_total_delay_s = tally.sum_delay / static_cast<double>(tally.cycles);
    m.mean_offload_delay_s =
        tally.offloaded > 0 ? tally.sum_offload_delay / static_cast<double>(tally.offloaded) : 0.0;
    m.deadline_violation_rate =
        static_cast<double>(tally.violations) / static_cast<double>(tally.cycles);
    double cyc = static_cast<double>(tally.cycles);
    m.frac_local = static_cast<double>(tally.count_local) / cyc;
    m.frac_serving = static_cast<double>(tally.count_serving) / cyc;
    m.frac_neighbor = static_cast<double>(tally.count_neighbor) / cyc;
    m.frac_rc = static_cast<double>(tally.count_rc) / cyc;

    RunResult out;
    out.metrics = std::move(m);
    out.replication = opt.replication;
    out.vehicles = V;
    out.source = opt.source;
    out.sampling = opt.sampling.kind;
    return out;
}

RunResult acked_baseline(const Scenario& sc, RunOptions opt) {
    opt.await_ack = true;
    return run_scenario(sc, opt);
}

std::string metrics_csv_header() {
    return "replication,vehicles,policy,sampling,fleet_aop,mean_total_delay_s,"
           "mean_offload_delay_s,deadline_violation_rate,frac_local,frac_serving,"
           "frac_neighbor,frac_rc,peak_fronthaul_bits,peak_inter_ec_bits,"
           "peak_backhaul_bits,audit_violations";
}

std::string metrics_csv_row(const RunResult& r) {
    std::ostringstream os;
    const Metrics& m = r.metrics;
    os << r.replication << ',' << r.vehicles << ',' << decision_source_name(r.source) << ','
       << sampling_kind_name(r.sampling) << ',' << fmt_double(m.fleet_aop) << ','
       << fmt_double(m.mean_total_delay_s) << ',' << fmt_double(m.mean_offload_delay_s) << ','
       << fmt_double(m.deadline_violation_rate) << ',' << fmt_double(m.frac_local) << ','
       << fmt_double(m.frac_serving) << ',' << fmt_double(m.frac_neighbor) << ','
       << fmt_double(m.frac_rc) << ',' << fmt_double(m.peak_fronthaul_bits) << ','
       << fmt_double(m.peak_inter_ec_bits) << ',' << fmt_double(m.peak_backhaul_bits) << ','
       << m.audit.total();
    return os.str();
}

}  // namespace aopsim
