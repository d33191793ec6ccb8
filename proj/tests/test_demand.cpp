#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "franopt/demand.hpp"
#include "franopt/errors.hpp"
#include "helpers.hpp"

using namespace franopt;

namespace {

std::vector<std::string> numbered_uds(std::size_t n) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
        std::string num = std::to_string(i);
        if (num.size() < 2) num = "0" + num;
        ids.push_back("ud" + num);
    }
    return ids;
}

bool same_requests(const std::vector<Request>& a,
                   const std::vector<Request>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].id != b[i].id || a[i].source != b[i].source) return false;
        // Bitwise equality: determinism, not approximation, is the contract.
        if (a[i].arrival_a != b[i].arrival_a) return false;
        if (a[i].instr != b[i].instr) return false;
        if (a[i].traffic_t != b[i].traffic_t) return false;
        if (a[i].max_latency_l != b[i].max_latency_l) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("demand: hash and generator primitives are stable") {
    // Pinned reference values guard against accidental algorithm drift;
    // both constants were computed from the published parameter sets.
    CHECK(fnv1a64("") == 14695981039346656037ULL);
    CHECK(fnv1a64("a") == 12638187200555641996ULL);
    std::uint64_t s = 0;
    const std::uint64_t first = splitmix64_next(s);
    CHECK(first == 16294208416658607535ULL);
    CHECK(s == 0x9E3779B97F4A7C15ULL);
}

TEST_CASE("demand: same inputs reproduce the identical request list") {
    DemandConfig cfg;
    cfg.seed = 42;
    auto uds = numbered_uds(7);
    auto a = generate_requests(cfg, uds);
    auto b = generate_requests(cfg, uds);
    CHECK(same_requests(a, b));
}

TEST_CASE("demand: three requests for each of 21 devices makes 63") {
    DemandConfig cfg;
    cfg.seed = 7;
    auto reqs = generate_requests(cfg, numbered_uds(21));
    CHECK(reqs.size() == 63);
    // Each device contributes exactly requests_per_ud requests.
    std::set<std::string> ids;
    for (const auto& r : reqs) ids.insert(r.id);
    CHECK(ids.size() == 63);
    CHECK(reqs[0].id == "ud00.r0");
    CHECK(reqs[1].id == "ud00.r1");
    CHECK(reqs[2].id == "ud00.r2");
    CHECK(reqs[3].id == "ud01.r0");
    CHECK(reqs[0].source == "ud00");
}

TEST_CASE("demand: parameters land inside their configured ranges") {
    DemandConfig cfg;
    cfg.seed = 99;
    cfg.requests_per_ud = 5;
    auto reqs = generate_requests(cfg, numbered_uds(20));
    for (const auto& r : reqs) {
        CHECK(r.arrival_a >= cfg.arrival_a.min);
        CHECK(r.arrival_a <= cfg.arrival_a.max);
        CHECK(r.instr >= cfg.instr.min);
        CHECK(r.instr <= cfg.instr.max);
        CHECK(r.traffic_t >= cfg.traffic_t.min);
        CHECK(r.traffic_t <= cfg.traffic_t.max);
        CHECK(r.max_latency_l >= cfg.max_latency_l.min);
        CHECK(r.max_latency_l <= cfg.max_latency_l.max);
    }
    // The draws genuinely vary across requests.
    std::set<double> arrivals;
    for (const auto& r : reqs) arrivals.insert(r.arrival_a);
    CHECK(arrivals.size() > 90);
}

TEST_CASE("demand: degenerate ranges clone every parameter") {
    DemandConfig cfg;
    cfg.seed = 5;
    cfg.arrival_a = {0.7, 0.7};
    cfg.instr = {0.5, 0.5};
    cfg.traffic_t = {4.0, 4.0};
    cfg.max_latency_l = {2.0, 2.0};
    auto reqs = generate_requests(cfg, numbered_uds(4));
    for (const auto& r : reqs) {
        CHECK(r.arrival_a == 0.7);
        CHECK(r.instr == 0.5);
        CHECK(r.traffic_t == 4.0);
        CHECK(r.max_latency_l == 2.0);
    }
    // Only identity fields may differ.
    std::set<std::string> ids;
    for (const auto& r : reqs) ids.insert(r.id);
    CHECK(ids.size() == reqs.size());
}

TEST_CASE("demand: device order never changes the output") {
    DemandConfig cfg;
    cfg.seed = 1234;
    auto uds = numbered_uds(9);
    auto reference = generate_requests(cfg, uds);
    std::mt19937 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(uds.begin(), uds.end(), rng);
        CHECK(same_requests(generate_requests(cfg, uds), reference));
    }
}

TEST_CASE("demand: different seeds give different draws") {
    DemandConfig a, b;
    a.seed = 1;
    b.seed = 2;
    auto uds = numbered_uds(3);
    auto ra = generate_requests(a, uds);
    auto rb = generate_requests(b, uds);
    bool any_diff = false;
    for (std::size_t i = 0; i < ra.size(); ++i)
        any_diff = any_diff || ra[i].arrival_a != rb[i].arrival_a;
    CHECK(any_diff);
}

TEST_CASE("demand: bad inputs are rejected") {
    DemandConfig cfg;
    CHECK_THROWS_AS(generate_requests(cfg, {}), ValidationError);
    DemandConfig zero;
    zero.requests_per_ud = 0;
    CHECK_THROWS_AS(generate_requests(zero, numbered_uds(2)), ValidationError);
    DemandConfig inverted;
    inverted.arrival_a = {2.0, 1.0};
    CHECK_THROWS_AS(generate_requests(inverted, numbered_uds(2)),
                    ValidationError);
    DemandConfig nonpositive;
    nonpositive.traffic_t = {0.0, 5.0};
    CHECK_THROWS_AS(generate_requests(nonpositive, numbered_uds(2)),
                    ValidationError);
}

TEST_CASE("demand: activation picks the lowest ids, nested by fraction") {
    auto uds = numbered_uds(10);
    // Hand the function a shuffled list; selection is by id, not position.
    std::vector<std::string> shuffled = {"ud03", "ud07", "ud00", "ud09",
                                         "ud05", "ud01", "ud08", "ud02",
                                         "ud06", "ud04"};
    auto half = active_uds(0.5, shuffled);
    CHECK(half == std::vector<std::string>(
                      {"ud00", "ud01", "ud02", "ud03", "ud04"}));
    CHECK(active_uds(0.0, shuffled).empty());
    CHECK(active_uds(1.0, shuffled) == uds);

    // ceil: 0.34 of 3 devices activates 2.
    auto three = numbered_uds(3);
    CHECK(active_uds(0.34, three).size() == 2);

    // Nested activation across an ascending fraction grid.
    std::vector<std::string> prev;
    for (double f : {0.0, 0.1, 0.25, 0.3, 0.5, 0.62, 0.8, 1.0}) {
        auto cur = active_uds(f, shuffled);
        CHECK(cur.size() >= prev.size());
        CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
        prev = std::move(cur);
    }

    CHECK_THROWS_AS(active_uds(-0.1, uds), ValidationError);
    CHECK_THROWS_AS(active_uds(1.1, uds), ValidationError);
}

TEST_CASE("demand: the shipped day profile hits its anchors") {
    LoadProfile p = default_profile();
    REQUIRE(p.entries.size() == 24);
    for (int h = 0; h < 24; ++h) {
        CHECK(p.entries[h].hour == h);
        CHECK(p.entries[h].active_fraction >= 0.0);
        CHECK(p.entries[h].active_fraction <= 1.0);
    }
    CHECK(p.entries[0].active_fraction == doctest::Approx(0.30));
    CHECK(p.entries[4].active_fraction == doctest::Approx(0.10));
    CHECK(p.entries[8].active_fraction == doctest::Approx(0.40));
    CHECK(p.entries[12].active_fraction == doctest::Approx(0.60));
    CHECK(p.entries[16].active_fraction == doctest::Approx(0.70));
    CHECK(p.entries[20].active_fraction == doctest::Approx(1.00));
    CHECK(p.entries[21].active_fraction == doctest::Approx(1.00));
    CHECK(p.entries[23].active_fraction == doctest::Approx(0.35));
    // Piecewise-linear between anchors.
    CHECK(p.entries[2].active_fraction == doctest::Approx(0.20));
    CHECK(p.entries[6].active_fraction == doctest::Approx(0.25));
    CHECK(p.entries[22].active_fraction == doctest::Approx(0.675));
    // The trough and the peak are global.
    for (const auto& e : p.entries) {
        CHECK(e.active_fraction >= 0.10);
        CHECK(e.active_fraction <= 1.00);
    }
}

TEST_CASE("demand: ud id extraction is sorted and kind-filtered") {
    NetworkInstance inst = test::tiny_instance();
    CHECK(ud_ids(inst) == std::vector<std::string>{"ud0"});
    inst.nodes.push_back(test::make_node("ud2", NodeKind::UD, 2.0, 1.5, 0.5, 2.0));
    inst.nodes.push_back(test::make_node("ud1", NodeKind::UD, 2.0, 1.5, 0.5, 2.0));
    CHECK(ud_ids(inst) == std::vector<std::string>({"ud0", "ud1", "ud2"}));
}
