#include <doctest.h>

#include <vector>

#include "aopsim/common.hpp"
#include "aopsim/compute.hpp"
#include "aopsim/rng.hpp"

using namespace aopsim;

namespace {

Task reference_task() { return Task{8e6, 3.0, 500.0}; }

}  // namespace

TEST_CASE("local execution time and energy") {
    Task t = reference_task();
    CHECK(local_exec_s(t, 2e9) == doctest::Approx(2.0));
    // s * z * nu * P^2 at the architectural constant
    CHECK(local_energy_j(t, 2e9, 1e-26) == doctest::Approx(160.0));

    SUBCASE("energy scales with the square of the clock") {
        CHECK(local_energy_j(t, 4e9, 1e-26) == doctest::Approx(4.0 * 160.0));
        CHECK(local_energy_j(t, 1e9, 1e-26) == doctest::Approx(160.0 / 4.0));
    }
    SUBCASE("rejects degenerate inputs") {
        CHECK_THROWS_AS(local_exec_s(Task{0, 1, 1}, 2e9), DomainError);
        CHECK_THROWS_AS(local_exec_s(Task{1, 0, 1}, 2e9), DomainError);
        CHECK_THROWS_AS(local_exec_s(Task{1, 1, 0}, 2e9), DomainError);
        CHECK_THROWS_AS(local_exec_s(t, 0.0), DomainError);
    }
}

TEST_CASE("local verdict checks demand, deadline and energy in order") {
    Task t = reference_task();

    SUBCASE("feasible when everything fits") {
        CHECK(local_verdict(t, 2e9, 200.0, 1e-26) == LocalVerdict::feasible);
    }
    SUBCASE("required cycle rate above the cpu") {
        Task tight = t;
        tight.deadline_s = 1.0;  // needs 4 GHz sustained
        CHECK(local_verdict(tight, 2e9, 200.0, 1e-26) == LocalVerdict::demand_exceeds_cpu);
    }
    SUBCASE("energy budget exceeded") {
        CHECK(local_verdict(t, 2e9, 100.0, 1e-26) == LocalVerdict::energy_exceeded);
    }
}

TEST_CASE("local delay by mode") {
    Task t = reference_task();
    CHECK(local_delay_s(t, 2e9, 0.5, LocalMode::immediate) == doctest::Approx(2.0));
    CHECK(local_delay_s(t, 2e9, 0.5, LocalMode::queued) == doctest::Approx(2.5));
    CHECK(local_delay_s(t, 2e9, 0.5, LocalMode::offloaded) == doctest::Approx(0.0));
}

TEST_CASE("local outcome bundles the verdict with the charged delay") {
    Task t = reference_task();

    LocalOutcome ok = local_compute(t, 2e9, 200.0, 1e-26, 0.5, false);
    CHECK(ok.feasible);
    CHECK(ok.verdict == LocalVerdict::feasible);
    CHECK(ok.exec_s == doctest::Approx(2.0));
    CHECK(ok.energy_j == doctest::Approx(160.0));
    CHECK(ok.total_local_s == doctest::Approx(2.0));

    // infeasible but kept on the vehicle: pays the queue wait on top
    LocalOutcome kept = local_compute(t, 2e9, 100.0, 1e-26, 0.5, false);
    CHECK(!kept.feasible);
    CHECK(kept.total_local_s == doctest::Approx(2.5));

    // payload left the vehicle: no local time, stats still reported
    LocalOutcome gone = local_compute(t, 2e9, 100.0, 1e-26, 0.5, true);
    CHECK(gone.total_local_s == doctest::Approx(0.0));
    CHECK(gone.exec_s == doctest::Approx(2.0));
    CHECK(gone.energy_j == doctest::Approx(160.0));
}

TEST_CASE("upload time covers access and fronthaul") {
    CHECK(tx_delay_s(1e8, 1e8, 2e9) == doctest::Approx(1.05));
    CHECK_THROWS_AS(tx_delay_s(0.0, 1e8, 2e9), DomainError);
    CHECK_THROWS_AS(tx_delay_s(1e8, 0.0, 2e9), DomainError);
    CHECK_THROWS_AS(tx_delay_s(1e8, 1e8, 0.0), DomainError);
}

TEST_CASE("edge-cloud cpu splits proportionally to cycle density") {
    std::vector<double> alloc = proportional_alloc(3.5e9, {1000.0, 3000.0});
    REQUIRE(alloc.size() == 2);
    CHECK(alloc[0] == doctest::Approx(0.875e9));
    CHECK(alloc[1] == doctest::Approx(2.625e9));
    CHECK(alloc[0] + alloc[1] == doctest::Approx(3.5e9).epsilon(1e-12));

    std::vector<double> solo = proportional_alloc(3.5e9, {777.0});
    CHECK(solo[0] == doctest::Approx(3.5e9));

    CHECK_THROWS_AS(proportional_alloc(3.5e9, {}), DomainError);
    CHECK_THROWS_AS(proportional_alloc(3.5e9, {1000.0, 0.0}), DomainError);
    CHECK_THROWS_AS(proportional_alloc(0.0, {1000.0}), DomainError);
}

TEST_CASE("forward hop serialises the aggregate and adds propagation") {
    CHECK(hop_delay_s({1e8, 3e9, 5000.0}, 2e8) ==
          doctest::Approx(1e8 / 3e9 + 2.5e-5).epsilon(1e-12));
    CHECK(hop_delay_s({0.0, 3e9, 0.0}, 2e8) == doctest::Approx(0.0));
    CHECK_THROWS_AS(hop_delay_s({1e8, 0.0, 5000.0}, 2e8), DomainError);
    CHECK_THROWS_AS(hop_delay_s({-1.0, 3e9, 5000.0}, 2e8), DomainError);
    CHECK_THROWS_AS(hop_delay_s({1e8, 3e9, -1.0}, 2e8), DomainError);
    CHECK_THROWS_AS(hop_delay_s({1e8, 3e9, 5000.0}, 0.0), DomainError);
}

TEST_CASE("remote chain stage delays") {
    Task t{1e8, 10.0, 100.0};
    const double access = 1e8, fronthaul = 2e9;

    SUBCASE("serving edge cloud") {
        RemoteOutcome o = serving_ec_time(t, access, fronthaul, 2e9);
        CHECK(o.scenario == RemoteScenario::serving_ec);
        CHECK(o.tx_s == doctest::Approx(1.05));
        CHECK(o.exec_s == doctest::Approx(5.0));
        CHECK(o.hop_transfer_s == doctest::Approx(0.0));
        CHECK(o.total_s == doctest::Approx(6.05));
    }
    SUBCASE("neighbor edge cloud adds the forward hop") {
        RemoteOutcome o = neighbor_ec_time(t, access, fronthaul, {1e8, 3e9, 5000.0}, 2e8, 2e9);
        CHECK(o.scenario == RemoteScenario::neighbor_ec);
        CHECK(o.tx_s == doctest::Approx(1.05));
        CHECK(o.hop_transfer_s == doctest::Approx(1e8 / 3e9).epsilon(1e-12));
        CHECK(o.hop_prop_s == doctest::Approx(2.5e-5).epsilon(1e-12));
        CHECK(o.exec_s == doctest::Approx(5.0));
        CHECK(o.total_s == doctest::Approx(6.05 + 1e8 / 3e9 + 2.5e-5).epsilon(1e-12));
        CHECK_THROWS_AS(neighbor_ec_time(t, access, fronthaul, {1e8, 0.0, 5000.0}, 2e8, 2e9),
                        DomainError);
    }
    SUBCASE("regional cloud runs unshared behind the backhaul") {
        RemoteOutcome o =
            regional_cloud_time(t, access, fronthaul, {1e8, 4e9, 3e4}, 2e8, 4e9, 1e8);
        CHECK(o.scenario == RemoteScenario::regional_cloud);
        CHECK(o.tx_s == doctest::Approx(1.05));
        CHECK(o.hop_transfer_s == doctest::Approx(0.025));
        CHECK(o.hop_prop_s == doctest::Approx(1.5e-4));
        CHECK(o.exec_s == doctest::Approx(2.5));
        CHECK(o.total_s == doctest::Approx(1.05 + 0.025 + 1.5e-4 + 2.5));
    }
    SUBCASE("backhaul admission is a hard gate") {
        CHECK_THROWS_AS(regional_cloud_time(t, access, fronthaul, {1e8, 4e9, 3e4}, 2e8, 4e9, 5e9),
                        AdmissionError);
        CHECK_NOTHROW(check_rc_admission(4e9, 4e9));
        CHECK_THROWS_AS(check_rc_admission(4e9 + 1.0, 4e9), AdmissionError);
        CHECK_THROWS_AS(check_rc_admission(1.0, 0.0), DomainError);
    }
}

TEST_CASE("remote scenarios order by reach at equal allocations") {
    Rng rng(31);
    for (int i = 0; i < 20; ++i) {
        Task t{rng.uniform(1e7, 5e8), 10.0, rng.uniform(100.0, 2000.0)};
        const double access = rng.uniform(1e7, 1e9);
        const double fronthaul = rng.uniform(1e9, 3e9);
        const double alloc = rng.uniform(1e9, 4e9);
        const double agg = t.bits + rng.uniform(0.0, 1e9);
        // the regional cloud sits farther out than any in-space neighbor
        ForwardHop inter{agg, 3e9, rng.uniform(100.0, 5e3)};
        ForwardHop back{agg, 3e9, inter.distance_m + rng.uniform(1e3, 3e4)};

        RemoteOutcome b = serving_ec_time(t, access, fronthaul, alloc);
        RemoteOutcome c = neighbor_ec_time(t, access, fronthaul, inter, 2e8, alloc);
        RemoteOutcome d = regional_cloud_time(t, access, fronthaul, back, 2e8, alloc, agg);
        CHECK(b.total_s <= c.total_s);
        CHECK(c.total_s <= d.total_s);
    }
}

TEST_CASE("offload delay selector enforces branch exclusivity") {
    CHECK(total_offload_delay(true, true, false, false, 6.05, 7.0, 8.0) == doctest::Approx(6.05));
    CHECK(total_offload_delay(true, false, true, false, 6.05, 7.0, 8.0) == doctest::Approx(7.0));
    CHECK(total_offload_delay(true, false, false, true, 6.05, 7.0, 8.0) == doctest::Approx(8.0));
    CHECK(total_offload_delay(false, false, false, false, 6.05, 7.0, 8.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(total_offload_delay(false, true, false, false, 1, 2, 3), DomainError);
    CHECK_THROWS_AS(total_offload_delay(true, false, false, false, 1, 2, 3), DomainError);
    CHECK_THROWS_AS(total_offload_delay(true, true, true, false, 1, 2, 3), DomainError);
}
