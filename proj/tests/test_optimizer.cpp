#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "aopsim/common.hpp"
#include "aopsim/optimizer.hpp"

using namespace aopsim;

namespace {

// One vehicle with every action on the table. Regional cloud wins:
// serving 6.05 s, neighbor ~3.583 s, cloud ~3.075 s, local 5 s.
Instance one_vehicle() {
    Instance inst;
    VehicleSpec v;
    v.task = {1e8, 10.0, 100.0};
    v.cpu_hz = 2e9;
    v.local_feasible = true;
    v.rat = 0;
    v.serving_ec = 0;
    v.neighbor_ec = 1;
    v.access_bps_by_n = {1e8};
    v.fronthaul_bps = 2e9;
    inst.vehicles.push_back(v);
    inst.ec_cpu_hz = {{0, 2e9}, {1, 4e9}};
    inst.rc_hz = 5e9;
    inst.backhaul_bps = {{0, 4e9}};
    inst.rc_dist_m = {{0, 3e4}};
    inst.inter_ec_bps = {{{0, 1}, 3e9}};
    inst.inter_ec_dist_m = {{{0, 1}, 5e3}};
    return inst;
}

// Four vehicles, two stations, two edge clouds; v3 has no forward target.
Instance four_vehicles() {
    Instance inst;
    auto add = [&](double bits, double z, double cpu, int rat, int ec, int nb,
                   std::vector<double> acc) {
        VehicleSpec v;
        v.task = {bits, 10.0, z};
        v.cpu_hz = cpu;
        v.local_feasible = false;
        v.rat = rat;
        v.serving_ec = ec;
        v.neighbor_ec = nb;
        v.access_bps_by_n = std::move(acc);
        v.fronthaul_bps = 2e9;
        inst.vehicles.push_back(v);
    };
    add(2e8, 200.0, 2e9, 0, 0, 1, {1.2e8, 7e7});
    add(1e8, 500.0, 2.5e9, 0, 0, 1, {1.2e8, 7e7});
    add(3e8, 100.0, 3e9, 1, 1, 0, {1e8, 5.5e7});
    add(1.5e8, 300.0, 2e9, 1, 1, -1, {1e8, 5.5e7});
    inst.ec_cpu_hz = {{0, 3e9}, {1, 3.5e9}};
    inst.rc_hz = 5e9;
    inst.backhaul_bps = {{0, 3e9}, {1, 2.5e9}};
    inst.rc_dist_m = {{0, 3e4}, {1, 3.2e4}};
    inst.inter_ec_bps = {{{0, 1}, 2e9}, {{1, 0}, 2e9}};
    inst.inter_ec_dist_m = {{{0, 1}, 4e3}, {{1, 0}, 4e3}};
    inst.wait = {0.5, 1.0 / 3.0};
    return inst;
}

}  // namespace

TEST_CASE("action kinds have ladder names") {
    CHECK(std::string(action_kind_name(ActionKind::serving_ec)) == "serving_ec");
    CHECK(std::string(action_kind_name(ActionKind::neighbor_ec)) == "neighbor_ec");
    CHECK(std::string(action_kind_name(ActionKind::regional_cloud)) == "regional_cloud");
    CHECK(std::string(action_kind_name(ActionKind::local)) == "local");
}

TEST_CASE("candidate actions follow the vehicle's offload path") {
    Instance inst = one_vehicle();
    CHECK(candidate_actions(inst, 0) ==
          std::vector<ActionKind>{ActionKind::serving_ec, ActionKind::neighbor_ec,
                                  ActionKind::regional_cloud, ActionKind::local});

    SUBCASE("no station: local only") {
        inst.vehicles[0].rat = -1;
        CHECK(candidate_actions(inst, 0) == std::vector<ActionKind>{ActionKind::local});
    }
    SUBCASE("no forward target: neighbor drops out") {
        inst.vehicles[0].neighbor_ec = -1;
        CHECK(candidate_actions(inst, 0) ==
              std::vector<ActionKind>{ActionKind::serving_ec, ActionKind::regional_cloud,
                                      ActionKind::local});
    }
    SUBCASE("no inter-EC link: neighbor drops out") {
        inst.inter_ec_bps.clear();
        CHECK(candidate_actions(inst, 0) ==
              std::vector<ActionKind>{ActionKind::serving_ec, ActionKind::regional_cloud,
                                      ActionKind::local});
    }
    SUBCASE("no backhaul: cloud drops out") {
        inst.backhaul_bps.clear();
        CHECK(candidate_actions(inst, 0) ==
              std::vector<ActionKind>{ActionKind::serving_ec, ActionKind::neighbor_ec,
                                      ActionKind::local});
    }
    SUBCASE("vehicle index out of range") {
        CHECK_THROWS_AS(candidate_actions(inst, 1), DomainError);
        CHECK_THROWS_AS(candidate_actions(inst, -1), DomainError);
    }
}

TEST_CASE("profile evaluation prices each scenario") {
    Instance inst = one_vehicle();

    SUBCASE("serving edge cloud") {
        EvalResult ev = evaluate_profile(inst, {ActionKind::serving_ec});
        CHECK(ev.delay_s[0] == doctest::Approx(6.05));
        CHECK(ev.frac_a[0] == doctest::Approx(1.0));
        CHECK(ev.alloc_hz[0] == doctest::Approx(2e9));
        CHECK(ev.rat_frac_sums.at(0) == doctest::Approx(1.0));
        CHECK(ev.ec_alloc_sums.at(0) == doctest::Approx(2e9));
        CHECK(ev.sum_delay == doctest::Approx(6.05));
        CHECK(ev.sum_q == doctest::Approx(1.5 * 6.05 * 6.05));
        CHECK(ev.rc_admissible);
    }
    SUBCASE("neighbor edge cloud") {
        EvalResult ev = evaluate_profile(inst, {ActionKind::neighbor_ec});
        CHECK(ev.delay_s[0] == doctest::Approx(1.05 + 1e8 / 3e9 + 2.5e-5 + 2.5).epsilon(1e-12));
        CHECK(ev.alloc_hz[0] == doctest::Approx(0.0));  // hosted off the serving cloud
        CHECK(ev.ec_alloc_sums.count(0) == 0);
    }
    SUBCASE("regional cloud") {
        EvalResult ev = evaluate_profile(inst, {ActionKind::regional_cloud});
        CHECK(ev.delay_s[0] == doctest::Approx(1.05 + 0.025 + 1.5e-4 + 2.0).epsilon(1e-12));
    }
    SUBCASE("feasible local pays execution only") {
        EvalResult ev = evaluate_profile(inst, {ActionKind::local});
        CHECK(ev.delay_s[0] == doctest::Approx(5.0));
        CHECK(ev.frac_a[0] == doctest::Approx(0.0));
        CHECK(ev.rat_frac_sums.empty());
    }
    SUBCASE("infeasible local also queues") {
        inst.vehicles[0].local_feasible = false;
        EvalResult ev = evaluate_profile(inst, {ActionKind::local});
        CHECK(ev.delay_s[0] == doctest::Approx(5.5));
    }
    SUBCASE("wrong profile arity") {
        CHECK_THROWS_AS(evaluate_profile(inst, {}), DomainError);
        CHECK_THROWS_AS(evaluate_profile(inst, {ActionKind::local, ActionKind::local}),
                        DomainError);
    }
}

TEST_CASE("shared station and edge cloud split evenly and proportionally") {
    Instance inst = four_vehicles();
    // v0 and v1 both execute at their serving cloud over station 0
    std::vector<ActionKind> acts = {ActionKind::serving_ec, ActionKind::serving_ec,
                                    ActionKind::local, ActionKind::local};
    EvalResult ev = evaluate_profile(inst, acts);
    CHECK(ev.frac_a[0] == doctest::Approx(0.5));
    CHECK(ev.frac_a[1] == doctest::Approx(0.5));
    CHECK(ev.rat_frac_sums.at(0) == doctest::Approx(1.0));
    // workload split 200:500 over 3 GHz
    CHECK(ev.alloc_hz[0] == doctest::Approx(3e9 * 200.0 / 700.0));
    CHECK(ev.alloc_hz[1] == doctest::Approx(3e9 * 500.0 / 700.0));
    CHECK(ev.ec_alloc_sums.at(0) == doctest::Approx(3e9).epsilon(1e-12));
    // per-user access rate at n=2, then the fronthaul
    CHECK(ev.delay_s[0] ==
          doctest::Approx(2e8 / 7e7 + 2e8 / 2e9 + 2e8 * 200.0 / (3e9 * 200.0 / 700.0)));

    SUBCASE("forwarded workload shares the host cloud") {
        // v2 forwards to cloud 0 while v0 executes there
        std::vector<ActionKind> mix = {ActionKind::serving_ec, ActionKind::local,
                                       ActionKind::neighbor_ec, ActionKind::local};
        EvalResult ev2 = evaluate_profile(inst, mix);
        CHECK(ev2.alloc_hz[0] == doctest::Approx(3e9 * 200.0 / 300.0));
        // the forwarded share is not counted against the serving-cloud sum
        CHECK(ev2.ec_alloc_sums.at(0) == doctest::Approx(3e9 * 200.0 / 300.0));
    }
    SUBCASE("missing forward target") {
        CHECK_THROWS_AS(evaluate_profile(inst, {ActionKind::local, ActionKind::local,
                                                ActionKind::local, ActionKind::neighbor_ec}),
                        DomainError);
    }
}

TEST_CASE("backhaul overflow flags the profile inadmissible") {
    Instance inst = four_vehicles();
    inst.backhaul_bps[0] = 2.5e8;  // v0+v1 offer 3e8
    std::vector<ActionKind> both = {ActionKind::regional_cloud, ActionKind::regional_cloud,
                                    ActionKind::local, ActionKind::local};
    EvalResult ev = evaluate_profile(inst, both);
    CHECK(!ev.rc_admissible);
    CHECK(ev.overloaded_backhauls == std::vector<int>{0});

    std::vector<ActionKind> one = {ActionKind::regional_cloud, ActionKind::local,
                                   ActionKind::local, ActionKind::local};
    CHECK(evaluate_profile(inst, one).rc_admissible);
}

TEST_CASE("exhaustive search on the single-vehicle ladder") {
    Instance inst = one_vehicle();
    for (Objective obj : {Objective::aop, Objective::total_delay}) {
        EnumerationResult best = enumerate_policies(inst, obj);
        REQUIRE(best.feasible_found);
        CHECK(best.actions == std::vector<ActionKind>{ActionKind::regional_cloud});
        EvalResult ev = evaluate_profile(inst, best.actions);
        CHECK(best.objective == doctest::Approx(objective_of(ev, obj)));
    }
}

TEST_CASE("exhaustive search refuses oversized instances") {
    Instance inst = one_vehicle();
    for (int i = 0; i < 5; ++i) inst.vehicles.push_back(inst.vehicles[0]);
    CHECK_THROWS_AS(enumerate_policies(inst, Objective::aop), DomainError);
}

TEST_CASE("added capacity never hurts the enumerated optimum") {
    Instance inst = four_vehicles();
    const double base = enumerate_policies(inst, Objective::aop).objective;
    Instance more = inst;
    for (auto& [ec, hz] : more.ec_cpu_hz) hz *= 2.0;
    more.rc_hz *= 2.0;
    for (auto& [ec, bps] : more.backhaul_bps) bps *= 2.0;
    CHECK(enumerate_policies(more, Objective::aop).objective <= base + 1e-9);
}

TEST_CASE("penalty form of the relaxed objective") {
    Instance inst = one_vehicle();
    const double q_serving = 1.5 * 6.05 * 6.05;
    const double q_local = 1.5 * 25.0;

    // binding constraints zero the penalty
    CHECK(lagrangian(inst, {ActionKind::serving_ec}, {2.0}, {3e-9}, Objective::aop) ==
          doctest::Approx(q_serving));
    // slack constraints subtract multiplier-weighted slack
    CHECK(lagrangian(inst, {ActionKind::local}, {2.0}, {1e-9}, Objective::aop) ==
          doctest::Approx(q_local - 2.0 - 1e-9 * 2e9));
    CHECK(lagrangian(inst, {ActionKind::local}, {0.0}, {0.0}, Objective::total_delay) ==
          doctest::Approx(5.0));

    CHECK_THROWS_AS(lagrangian(inst, {ActionKind::local}, {-0.1}, {0.0}, Objective::aop),
                    DomainError);
    CHECK_THROWS_AS(lagrangian(inst, {ActionKind::local}, {0.0, 0.0}, {0.0}, Objective::aop),
                    DomainError);
}

TEST_CASE("dual value lower-bounds every profile") {
    Instance inst = four_vehicles();
    inst.vehicles.pop_back();  // three vehicles: 4^3 profiles

    std::vector<std::vector<ActionKind>> profiles;
    {
        std::vector<std::vector<ActionKind>> cands(3);
        for (int v = 0; v < 3; ++v) cands[v] = candidate_actions(inst, v);
        for (ActionKind a : cands[0])
            for (ActionKind b : cands[1])
                for (ActionKind c : cands[2]) profiles.push_back({a, b, c});
    }

    for (double lam : {0.0, 0.1, 5.0}) {
        for (double mu : {0.0, 1e-10, 1e-9}) {
            std::vector<double> lambda(3, lam), muv(3, mu);
            DualValue g = dual_value(inst, lambda, muv, Objective::aop);
            REQUIRE(g.finite);
            for (const auto& prof : profiles) {
                // below the relaxed objective of any profile...
                CHECK(g.value <= lagrangian(inst, prof, lambda, muv, Objective::aop) + 1e-6);
                // ...and below the raw objective of any feasible profile
                EvalResult ev = evaluate_profile(inst, prof);
                if (ev.rc_admissible)
                    CHECK(g.value <= objective_of(ev, Objective::aop) + 1e-6);
            }
        }
    }
}

TEST_CASE("dual value edge cases") {
    Instance inst = one_vehicle();

    SUBCASE("zero multipliers recover the unconstrained optimum") {
        DualValue g = dual_value(inst, {0.0}, {0.0}, Objective::aop);
        REQUIRE(g.finite);
        CHECK(g.value == doctest::Approx(enumerate_policies(inst, Objective::aop).objective));
    }
    SUBCASE("non-finite multipliers report the sentinel") {
        DualValue g = dual_value(inst, {std::numeric_limits<double>::infinity()}, {0.0},
                                 Objective::aop);
        CHECK(!g.finite);
        CHECK(g.value == -std::numeric_limits<double>::infinity());
    }
    SUBCASE("negative multipliers are rejected") {
        CHECK_THROWS_AS(dual_value(inst, {-1.0}, {0.0}, Objective::aop), DomainError);
        CHECK_THROWS_AS(dual_value(inst, {0.0}, {-1.0}, Objective::aop), DomainError);
    }
}

TEST_CASE("stationarity and complementary slack at a per-vehicle optimum") {
    Instance inst = one_vehicle();

    KktResidual at_opt =
        kkt_residual(inst, {ActionKind::regional_cloud}, {0.0}, {0.0}, Objective::aop);
    CHECK(at_opt.stationarity <= 1e-6);
    CHECK(at_opt.comp_slack <= 1e-12);
    CHECK(at_opt.primal_viol <= 1e-12);
    CHECK(at_opt.dual_viol <= 1e-12);

    SUBCASE("slack constraint with a positive multiplier shows up") {
        KktResidual r = kkt_residual(inst, {ActionKind::local}, {0.5}, {0.0}, Objective::aop);
        CHECK(r.comp_slack == doctest::Approx(0.5));  // 0.5 * |0 - 1|
    }
    SUBCASE("arity checks") {
        CHECK_THROWS_AS(kkt_residual(inst, {}, {0.0}, {0.0}, Objective::aop), DomainError);
        CHECK_THROWS_AS(kkt_residual(inst, {ActionKind::local}, {}, {0.0}, Objective::aop),
                        DomainError);
    }
}

TEST_CASE("solver finds the single-vehicle optimum quickly") {
    Instance inst = one_vehicle();
    SolveOptions opt;
    opt.seed = 5;
    SolveReport rep = solve(inst, opt);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 5);
    CHECK(rep.actions == std::vector<ActionKind>{ActionKind::regional_cloud});
    CHECK(rep.objective ==
          doctest::Approx(enumerate_policies(inst, Objective::aop).objective));
    REQUIRE(!rep.residual_history.empty());
    CHECK(rep.residual_history.back() <= opt.epsilon);
    CHECK(rep.policy.action_of_vehicle == rep.actions);
    CHECK(rep.policy.lookup(0, 3, 1, 2) == ActionKind::regional_cloud);
    CHECK(rep.eval.delay_s[0] == doctest::Approx(1.05 + 0.025 + 1.5e-4 + 2.0));
    // the dual certificate stays below the incumbent
    CHECK(rep.dual.value <= rep.objective + 1e-9);
}

TEST_CASE("a loose tolerance stops the solver after one round") {
    Instance inst = four_vehicles();
    SolveOptions opt;
    opt.epsilon = 1e18;
    opt.seed = 5;
    SolveReport rep = solve(inst, opt);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
}

TEST_CASE("solver tracks the enumerated optimum on a joint instance") {
    Instance inst = four_vehicles();
    for (Objective obj : {Objective::aop, Objective::total_delay}) {
        SolveOptions opt;
        opt.objective = obj;
        opt.seed = 11;
        SolveReport rep = solve(inst, opt);
        EnumerationResult best = enumerate_policies(inst, obj);
        REQUIRE(best.feasible_found);
        CHECK(rep.converged);
        CHECK(rep.objective <= best.objective * 1.05 + 1e-9);
        CHECK(rep.objective >= best.objective - 1e-9);
        CHECK(rep.eval.rc_admissible);
        for (const auto& [rat, f] : rep.eval.rat_frac_sums) CHECK(f <= 1.0 + 1e-9);
        for (const auto& [ec, p] : rep.eval.ec_alloc_sums)
            CHECK(p <= inst.ec_cpu_hz.at(ec) + 1e-9);
    }
}

TEST_CASE("admission repair keeps the incumbent on the backhaul budget") {
    Instance inst = four_vehicles();
    // make the cloud irresistible but too narrow for both candidates
    inst.rc_hz = 50e9;
    inst.backhaul_bps[0] = 2.2e8;
    inst.ec_cpu_hz[0] = 2e8;
    inst.ec_cpu_hz[1] = 2e8;
    SolveOptions opt;
    opt.seed = 13;
    SolveReport rep = solve(inst, opt);
    CHECK(rep.converged);
    CHECK(rep.eval.rc_admissible);
    int on_rc = 0;
    for (size_t v = 0; v < 2; ++v)
        if (rep.actions[v] == ActionKind::regional_cloud) ++on_rc;
    CHECK(on_rc <= 1);
    EnumerationResult best = enumerate_policies(inst, Objective::aop);
    CHECK(rep.objective <= best.objective * 1.05 + 1e-9);
}

TEST_CASE("solver runs are reproducible") {
    Instance inst = four_vehicles();
    SolveOptions opt;
    opt.seed = 21;
    SolveReport a = solve(inst, opt);
    SolveReport b = solve(inst, opt);
    CHECK(a.actions == b.actions);
    CHECK(a.objective == b.objective);
    CHECK(a.iterations == b.iterations);
    CHECK(a.residual_history == b.residual_history);
}

// Three offloaders share one station and one edge cloud; a fourth vehicle is
// isolated and can only run locally. The equilibrium of the per-vehicle
// adjusted costs parks the lightest task on the edge cloud, but the joint
// optimum runs it locally instead -- no unilateral deviation finds that, the
// pairwise recovery pass has to.
Instance contended_station() {
    Instance inst;
    VehicleSpec v0;
    v0.task = Task{339592070.39032745, 4.6305143169049039, 835.4167593171353};
    v0.cpu_hz = 2118522795.5583768;
    v0.local_feasible = false;
    v0.rat = 0;
    v0.serving_ec = 0;
    v0.neighbor_ec = -1;
    v0.access_bps_by_n = {372286261.287956, 186143130.643978, 124095420.42931867,
                          93071565.321989};
    v0.fronthaul_bps = 2398960829.9483461;
    VehicleSpec v1;
    v1.task = Task{293502658.84538656, 3.0295937743335108, 958.63746933572929};
    v1.cpu_hz = 2949132810.1356974;
    v1.local_feasible = true;
    v1.rat = -1;
    v1.serving_ec = -1;
    v1.neighbor_ec = -1;
    VehicleSpec v2;
    v2.task = Task{82685346.738248318, 0.7928625286196902, 855.91327362640243};
    v2.cpu_hz = 1905516542.6630239;
    v2.local_feasible = true;
    v2.rat = 0;
    v2.serving_ec = 0;
    v2.neighbor_ec = -1;
    v2.access_bps_by_n = {282330474.4010036, 141165237.2005018, 94110158.133667871,
                          70582618.6002509};
    v2.fronthaul_bps = 1676147806.3342366;
    VehicleSpec v3;
    v3.task = Task{37036578.651609793, 4.3089983946953243, 188.10577734552155};
    v3.cpu_hz = 2091337683.8757939;
    v3.local_feasible = false;
    v3.rat = 0;
    v3.serving_ec = 0;
    v3.neighbor_ec = -1;
    v3.access_bps_by_n = {172568695.44296461, 86284347.721482307, 57522898.480988204,
                          43142173.860741153};
    v3.fronthaul_bps = 1964097921.2343202;
    inst.vehicles = {v0, v1, v2, v3};
    inst.ec_cpu_hz[0] = 3478061571.350872;
    inst.rc_hz = 4235980448.6542211;
    inst.backhaul_bps[0] = 471069410.27872843;
    inst.rc_dist_m[0] = 29344.236906008893;
    inst.wait = WaitMoments{0.5, 1.0 / 3.0};
    return inst;
}

TEST_CASE("recovery pass reaches a joint optimum best responses miss") {
    Instance inst = contended_station();
    SolveOptions opt;
    opt.seed = 6195;
    SolveReport rep = solve(inst, opt);
    EnumerationResult best = enumerate_policies(inst, Objective::aop);
    REQUIRE(best.feasible_found);
    CHECK(rep.converged);
    REQUIRE(!rep.residual_history.empty());
    CHECK(rep.residual_history.back() <= opt.epsilon);
    CHECK(rep.objective == doctest::Approx(best.objective).epsilon(1e-12));
    CHECK(rep.actions == std::vector<ActionKind>{
                             ActionKind::regional_cloud, ActionKind::local,
                             ActionKind::regional_cloud, ActionKind::local});
    // the optimum is not an equilibrium: the lightest vehicle would rather
    // hop onto the idle edge cloud, which costs everyone else more
    KktResidual at_best = kkt_residual(inst, best.actions, {0, 0, 0, 0}, {0, 0, 0, 0},
                                       Objective::aop);
    CHECK(at_best.stationarity > 0.5);
}

TEST_CASE("a lone edge-cloud user is allocated exactly the full capacity") {
    Instance inst = contended_station();
    std::vector<ActionKind> prof = {ActionKind::regional_cloud, ActionKind::local,
                                    ActionKind::regional_cloud, ActionKind::serving_ec};
    EvalResult ev = evaluate_profile(inst, prof);
    CHECK(ev.alloc_hz[3] == inst.ec_cpu_hz[0]);
    CHECK(ev.ec_alloc_sums[0] == inst.ec_cpu_hz[0]);
    // no rounding dust above the cap: the multiplier ascent saw phantom
    // overloads here before the allocation was pinned to its bound
    KktResidual r = kkt_residual(inst, prof, {0, 0, 0, 0}, {0, 0, 0, 0}, Objective::aop);
    CHECK(r.primal_viol == 0.0);
}

TEST_CASE("every multiplier pair the ascent visits is a certified lower bound") {
    Instance inst = contended_station();
    SolveOptions opt;
    opt.seed = 6195;
    SolveReport rep = solve(inst, opt);
    EnumerationResult best = enumerate_policies(inst, Objective::aop);
    REQUIRE(!rep.multiplier_path.empty());
    // the path starts at the unconstrained relaxation
    for (double l : rep.multiplier_path.front().first) CHECK(l == 0.0);
    for (double m : rep.multiplier_path.front().second) CHECK(m == 0.0);
    for (const auto& [lambda, mu] : rep.multiplier_path) {
        DualValue g = dual_value(inst, lambda, mu, Objective::aop);
        if (!g.finite) continue;
        CHECK(g.value <= best.objective + 1e-9 * std::fabs(best.objective));
    }
}
