#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "franopt/errors.hpp"
#include "franopt/model.hpp"
#include "franopt/queueing.hpp"
#include "helpers.hpp"

using namespace franopt;
using namespace franopt::test;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST_SUITE("queueing") {

TEST_CASE("mm1_delay is the reciprocal of the headroom") {
    CHECK(mm1_delay({2.0, 1.0}) == 1.0);
    CHECK(mm1_delay({5.0, 0.0}) == doctest::Approx(0.2));
}

TEST_CASE("mm1_delay rejects overloaded or empty servers") {
    CHECK_THROWS_AS(mm1_delay({1.0, 1.5}), UnstableQueue);
    CHECK_THROWS_AS(mm1_delay({1.0, 1.0}), UnstableQueue);
    CHECK_THROWS_AS(mm1_delay({0.0, 0.0}), UnstableQueue);
}

TEST_CASE("mm1_delay grows with load and shrinks with capacity") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int k = 0; k < 50; ++k) {
        const double mu = 1.0 + u(rng);
        const double lambda = u(rng);
        const double d = mm1_delay({mu, lambda});
        CHECK(mm1_delay({mu, lambda + 0.05}) > d);
        CHECK(mm1_delay({mu + 0.05, lambda}) < d);
    }
}

TEST_CASE("required_headroom inverts the latency bound") {
    CHECK(required_headroom(0.5) == 2.0);
    CHECK(required_headroom(kInf) == 0.0);
    CHECK(required_headroom(0.1) == doctest::Approx(10.0));
    CHECK_THROWS_AS(required_headroom(0.0), Error);
    CHECK_THROWS_AS(required_headroom(-1.0), Error);
}

TEST_CASE("headroom and delay are mutually inverse") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.01, 10.0);
    for (int k = 0; k < 100; ++k) {
        const double mu = u(rng) + 10.0;
        const double lambda = u(rng);
        const double headroom = mu - lambda;
        const double rt = required_headroom(mm1_delay({mu, lambda}));
        CHECK(std::abs(rt - headroom) <= 1e-12 * headroom);
    }
}

TEST_CASE("big_m_for takes the tightest latency bound") {
    NetworkInstance inst = tiny_instance();
    inst.requests = {
        make_request("a", "ud0", 1.0, 0.5, 1.0, 0.5),
        make_request("b", "ud0", 1.0, 0.5, 1.0, 0.25),
        make_request("c", "ud0", 1.0, 0.5, 1.0, kInf),
    };
    CHECK(big_m_for(inst) == 4.0);

    for (auto& r : inst.requests) r.max_latency_l = kInf;
    CHECK(big_m_for(inst) == 0.0);

    inst.requests = {make_request("a", "ud0", 1.0, 0.5, 1.0, 1.0)};
    CHECK(big_m_for(inst) == 1.0);
}

}  // TEST_SUITE
