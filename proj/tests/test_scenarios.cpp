#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "franopt/errors.hpp"
#include "franopt/queueing.hpp"
#include "franopt/scenarios.hpp"
#include "helpers.hpp"

using namespace franopt;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Compact two-device topology with a daisy chain, for fast sweep tests.
NetworkInstance sweep_topology() {
    using namespace franopt::test;
    NetworkInstance inst;
    inst.nodes = {
        make_node("olt0", NodeKind::OLT, 200.0, 1.0, 12.0, 0.5),
        make_node("onu0", NodeKind::ONU, 100.0, 1.0, 8.0, 0.7),
        make_node("enb0", NodeKind::ENODEB, 15.0, 1.2, 3.0, 1.4),
        make_node("ud0", NodeKind::UD, 2.5, 1.4, 0.6, 1.8),
        make_node("ud1", NodeKind::UD, 2.5, 1.4, 0.6, 1.8),
    };
    inst.links = {
        test::make_link("l0", "olt0", "onu0", LinkKind::FIBRE, 2000.0, 0.01),
        test::make_link("l1", "onu0", "olt0", LinkKind::FIBRE, 2000.0, 0.01),
        test::make_link("l2", "onu0", "enb0", LinkKind::FIBRE, 2000.0, 0.02),
        test::make_link("l3", "enb0", "onu0", LinkKind::FIBRE, 2000.0, 0.02),
        test::make_link("l4", "enb0", "ud0", LinkKind::LICENSED, 400.0, 0.25),
        test::make_link("l5", "ud0", "enb0", LinkKind::LICENSED, 400.0, 0.25),
        test::make_link("l6", "ud0", "ud1", LinkKind::D2D, 150.0, 0.10),
        test::make_link("l7", "ud1", "ud0", LinkKind::D2D, 150.0, 0.10),
    };
    return inst;
}

DemandConfig small_demand(std::uint64_t seed) {
    DemandConfig cfg;
    cfg.seed = seed;
    cfg.requests_per_ud = 2;
    return cfg;
}

bool rows_identical(const std::vector<SweepRow>& a,
                    const std::vector<SweepRow>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].key != b[i].key || a[i].policy != b[i].policy) return false;
        if (a[i].status != b[i].status) return false;
        if (a[i].bnb_nodes != b[i].bnb_nodes) return false;
        if (a[i].power.total_w != b[i].power.total_w) return false;
        if (a[i].power.proc_w != b[i].power.proc_w) return false;
        if (a[i].power.vm_w != b[i].power.vm_w) return false;
        if (a[i].power.traffic_w != b[i].power.traffic_w) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("scenarios: saving percentage arithmetic") {
    CHECK(saving_pct(10.0, 6.6) == doctest::Approx(34.0).epsilon(1e-12));
    CHECK(saving_pct(10.0, 10.0) == doctest::Approx(0.0));
    CHECK(saving_pct(5.0, 0.0) == doctest::Approx(100.0));
    CHECK_THROWS_AS(saving_pct(0.0, 1.0), DivisionByZero);
}

TEST_CASE("scenarios: random small instances are valid and bounded") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        NetworkInstance inst = random_small_instance(seed);
        CAPTURE(seed);
        CHECK(validate(inst).empty());
        std::size_t olts = 0, onus = 0, enbs = 0, uds = 0;
        for (const auto& n : inst.nodes) {
            if (n.kind == NodeKind::OLT) ++olts;
            if (n.kind == NodeKind::ONU) ++onus;
            if (n.kind == NodeKind::ENODEB) ++enbs;
            if (n.kind == NodeKind::UD) ++uds;
        }
        CHECK(olts == 1);
        CHECK(onus == 1);
        CHECK(enbs == 1);
        CHECK(uds >= 1);
        CHECK(uds <= 5);
        CHECK(inst.requests.size() >= 1);
        CHECK(inst.requests.size() <= 3);
        // Link capacity dwarfs the worst-case carried load.
        double worst = 0.0;
        for (const auto& r : inst.requests) worst += r.traffic_t;
        for (const auto& l : inst.links) CHECK(l.capacity_b >= 10.0 * worst);
    }
    // Determinism of the generator itself.
    NetworkInstance a = random_small_instance(17);
    NetworkInstance b = random_small_instance(17);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK(a.nodes[i].id == b.nodes[i].id);
        CHECK(a.nodes[i].capacity_f == b.nodes[i].capacity_f);
        CHECK(a.nodes[i].vm_overhead_w == b.nodes[i].vm_overhead_w);
    }
    // Different seeds genuinely differ.
    NetworkInstance c = random_small_instance(18);
    bool differs = a.nodes.size() != c.nodes.size() ||
                   a.nodes[0].vm_overhead_w != c.nodes[0].vm_overhead_w;
    CHECK(differs);
}

TEST_CASE("scenarios: enumerator and solver agree on seeded batches") {
    auto res = run_oracle_check(10, 1, 1e-6);
    CHECK(res.instances == 10);
    CHECK(res.comparisons == 20);
    CHECK(res.all_match);
    CHECK(res.max_abs_diff <= 1e-6);
}

TEST_CASE("scenarios: load sweep shape, dominance and exclusions") {
    NetworkInstance topo = sweep_topology();
    LoadProfile profile;
    profile.entries = {{0, 0.0}, {1, 0.5}, {2, 0.5}, {3, 1.0}};
    auto result = run_load_sweep(topo, profile, small_demand(11));

    REQUIRE(result.rows.size() == 8);
    // Sorted by (key, policy), centralized first in each pair.
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(result.rows[2 * k].key == doctest::Approx(double(k)));
        CHECK(result.rows[2 * k].policy == HostingPolicy::CRAN);
        CHECK(result.rows[2 * k + 1].policy == HostingPolicy::FRAN);
    }
    // Every cell of this instance solves, and fog never loses.
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& cran = result.rows[2 * k];
        const auto& fran = result.rows[2 * k + 1];
        REQUIRE(cran.status == BnbStatus::OPTIMAL);
        REQUIRE(fran.status == BnbStatus::OPTIMAL);
        CHECK(fran.power.total_w <= cran.power.total_w + 1e-9);
    }
    // The empty slot costs nothing and is excluded from the average.
    CHECK(result.rows[0].power.total_w == doctest::Approx(0.0));
    CHECK(result.rows[1].power.total_w == doctest::Approx(0.0));
    REQUIRE(result.excluded_keys.size() == 1);
    CHECK(result.excluded_keys[0] == doctest::Approx(0.0));
    REQUIRE(result.average_saving_pct.has_value());
    CHECK(*result.average_saving_pct >= 0.0);
    CHECK(*result.average_saving_pct <= 100.0);

    // Load monotonicity: fractions 0 <= 0.5 = 0.5 <= 1.0 nest the demand,
    // so per-policy power is nondecreasing along the slots.
    for (int parity = 0; parity < 2; ++parity) {
        double prev = -1.0;
        for (std::size_t k = 0; k < 4; ++k) {
            double cur = result.rows[2 * k + parity].power.total_w;
            CHECK(cur >= prev - 1e-9);
            prev = cur;
        }
    }
    // Identical fractions give identical sub-instances, hence equal rows.
    CHECK(result.rows[2].power.total_w ==
          doctest::Approx(result.rows[4].power.total_w).epsilon(1e-12));
}

TEST_CASE("scenarios: sweeps are byte-stable across reruns and workers") {
    NetworkInstance topo = sweep_topology();
    LoadProfile profile;
    profile.entries = {{0, 0.3}, {1, 0.8}, {2, 1.0}};
    DemandConfig demand = small_demand(23);

    SweepOptions one;
    one.workers = 1;
    SweepOptions four;
    four.workers = 4;
    auto a = run_load_sweep(topo, profile, demand, one);
    auto b = run_load_sweep(topo, profile, demand, one);
    auto c = run_load_sweep(topo, profile, demand, four);
    CHECK(rows_identical(a.rows, b.rows));
    CHECK(rows_identical(a.rows, c.rows));
    CHECK(a.average_saving_pct == b.average_saving_pct);
    CHECK(a.average_saving_pct == c.average_saving_pct);

    auto grid = auto_latency_grid(topo, demand);
    auto la = run_latency_sweep(topo, demand, grid, one);
    auto lc = run_latency_sweep(topo, demand, grid, four);
    CHECK(rows_identical(la.rows, lc.rows));
}

TEST_CASE("scenarios: latency sweep is monotone and plateaus") {
    NetworkInstance topo = sweep_topology();
    DemandConfig demand = small_demand(31);
    auto grid = auto_latency_grid(topo, demand);

    REQUIRE(grid.size() == 16);
    for (double g : grid) CHECK(g > 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
    // The tightest point excludes every non-backbone host by headroom.
    CHECK(required_headroom(grid.front()) > 15.0);
    CHECK(required_headroom(grid.front()) <= 200.0);

    auto result = run_latency_sweep(topo, demand, grid);
    REQUIRE(result.rows.size() == 32);
    CHECK(result.grid == grid);

    // Per-policy power never increases as the deadline relaxes.
    for (int parity = 0; parity < 2; ++parity) {
        double prev = kInf;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const auto& row = result.rows[2 * k + parity];
            if (row.status != BnbStatus::OPTIMAL) continue;
            CHECK(row.power.total_w <= prev + 1e-9);
            prev = row.power.total_w;
        }
    }
    // Fog plateau: the last three grid points agree to 1e-6 relative.
    const auto& f13 = result.rows[2 * 13 + 1];
    const auto& f14 = result.rows[2 * 14 + 1];
    const auto& f15 = result.rows[2 * 15 + 1];
    REQUIRE(f13.status == BnbStatus::OPTIMAL);
    REQUIRE(f14.status == BnbStatus::OPTIMAL);
    REQUIRE(f15.status == BnbStatus::OPTIMAL);
    CHECK(f14.power.total_w ==
          doctest::Approx(f15.power.total_w).epsilon(1e-6));
    CHECK(f13.power.total_w ==
          doctest::Approx(f15.power.total_w).epsilon(1e-6));
    // At the tightest point both policies live on the same backbone hosts.
    const auto& c0 = result.rows[0];
    const auto& f0 = result.rows[1];
    if (c0.status == BnbStatus::OPTIMAL && f0.status == BnbStatus::OPTIMAL)
        CHECK(std::abs(f0.power.total_w - c0.power.total_w) <=
              0.01 * c0.power.total_w);
    // Dominance at every solved point.
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto& cran = result.rows[2 * k];
        const auto& fran = result.rows[2 * k + 1];
        if (cran.status == BnbStatus::OPTIMAL &&
            fran.status == BnbStatus::OPTIMAL)
            CHECK(fran.power.total_w <= cran.power.total_w + 1e-9);
    }
}

TEST_CASE("scenarios: infeasibly tight deadlines are recorded, not dropped") {
    NetworkInstance topo = sweep_topology();
    DemandConfig demand = small_demand(7);
    // 1/L > 200 means even the OLT cannot provide the headroom.
    std::vector<double> grid = {0.004, 0.5, 5.0};
    auto result = run_latency_sweep(topo, demand, grid);
    REQUIRE(result.rows.size() == 6);
    CHECK(result.rows[0].status == BnbStatus::INFEASIBLE);
    CHECK(result.rows[1].status == BnbStatus::INFEASIBLE);
    CHECK(result.rows[2].status == BnbStatus::OPTIMAL);
    CHECK(result.rows[4].status == BnbStatus::OPTIMAL);
    // The infeasible key is excluded from the saving average.
    CHECK(std::find(result.excluded_keys.begin(), result.excluded_keys.end(),
                    0.004) != result.excluded_keys.end());
    REQUIRE(result.average_saving_pct.has_value());
}

TEST_CASE("scenarios: grid validation rejects junk") {
    NetworkInstance topo = sweep_topology();
    DemandConfig demand = small_demand(3);
    CHECK_THROWS_AS(run_latency_sweep(topo, demand, {}), ValidationError);
    CHECK_THROWS_AS(run_latency_sweep(topo, demand, {1.0, 1.0}),
                    ValidationError);
    CHECK_THROWS_AS(run_latency_sweep(topo, demand, {2.0, 1.0}),
                    ValidationError);
    CHECK_THROWS_AS(run_latency_sweep(topo, demand, {-1.0, 1.0}),
                    ValidationError);
    LoadProfile bad;
    bad.entries = {{0, 1.5}};
    CHECK_THROWS_AS(run_load_sweep(topo, bad, demand), ValidationError);
}
