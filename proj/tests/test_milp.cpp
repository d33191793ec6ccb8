#include <doctest.h>

#include <limits>
#include <random>

#include "franopt/errors.hpp"
#include "franopt/milp.hpp"

using namespace franopt;

namespace {

MilpProblem sample_problem(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::uniform_int_distribution<int> coin(0, 1);
    MilpProblem p;
    const int nvars = 4 + static_cast<int>(rng() % 5);
    for (int i = 0; i < nvars; ++i) {
        if (coin(rng))
            p.add_variable("b" + std::to_string(i), VarDomain::BINARY);
        else {
            double lo = u(rng), hi = u(rng);
            if (lo > hi) std::swap(lo, hi);
            p.add_variable("c" + std::to_string(i), VarDomain::CONTINUOUS, lo,
                           hi);
        }
    }
    const int ncons = 2 + static_cast<int>(rng() % 4);
    for (int k = 0; k < ncons; ++k) {
        LinearExpr e;
        for (int i = 0; i < nvars; ++i)
            if (coin(rng)) e.add(i, u(rng));
        const Sense s = k % 3 == 0   ? Sense::LE
                        : k % 3 == 1 ? Sense::GE
                                     : Sense::EQ;
        p.add_constraint(std::move(e), s, u(rng), "row" + std::to_string(k));
    }
    LinearExpr obj;
    for (int i = 0; i < nvars; ++i) obj.add(i, u(rng));
    obj.constant = u(rng);
    p.set_objective(std::move(obj));
    return p;
}

}  // namespace

TEST_SUITE("milp") {

TEST_CASE("variables get dense indices and binary bounds") {
    MilpProblem p;
    CHECK(p.add_variable("a", VarDomain::CONTINUOUS, 0.0, 1.0) == 0);
    CHECK(p.add_variable("b", VarDomain::BINARY) == 1);
    CHECK(p.variables()[1].lower == 0.0);
    CHECK(p.variables()[1].upper == 1.0);
    CHECK_THROWS_AS(p.add_variable("c", VarDomain::CONTINUOUS, 3.0, 1.0),
                    InvalidBounds);
    CHECK(p.num_binaries() == 1);
}

TEST_CASE("normalize merges, drops zeros, sorts") {
    LinearExpr e;
    e.add(0, 1.0);
    e.add(0, 2.0);
    CHECK(normalize(e).terms ==
          std::vector<std::pair<std::size_t, double>>{{0, 3.0}});

    LinearExpr z;
    z.add(1, 0.0);
    CHECK(normalize(z).terms.empty());

    LinearExpr s;
    s.add(2, 1.0);
    s.add(0, 1.0);
    CHECK(normalize(s).terms ==
          std::vector<std::pair<std::size_t, double>>{{0, 1.0}, {2, 1.0}});
}

TEST_CASE("normalize is idempotent and preserves evaluation") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 40; ++k) {
        LinearExpr e;
        e.constant = u(rng);
        for (int t = 0; t < 8; ++t) e.add(rng() % 4, u(rng));
        std::vector<double> point{u(rng), u(rng), u(rng), u(rng)};
        LinearExpr n1 = normalize(e);
        LinearExpr n2 = normalize(n1);
        CHECK(n1.terms == n2.terms);
        CHECK(evaluate(e, point) ==
              doctest::Approx(evaluate(n1, point)).epsilon(1e-12));
    }
}

TEST_CASE("constraints must reference existing variables") {
    MilpProblem p;
    p.add_variable("a", VarDomain::CONTINUOUS, 0.0, 1.0);
    LinearExpr e;
    e.add(5, 1.0);
    CHECK_THROWS_AS(p.add_constraint(std::move(e), Sense::LE, 1.0), Error);
    LinearExpr bad;
    bad.add(0, 1.0);
    CHECK_THROWS_AS(
        p.add_constraint(std::move(bad), Sense::LE,
                         std::numeric_limits<double>::infinity()),
        Error);
}

TEST_CASE("check_feasible reports violations") {
    MilpProblem p;
    p.add_variable("x", VarDomain::CONTINUOUS, 0.0, 2.0);
    p.add_variable("b", VarDomain::BINARY);
    LinearExpr e;
    e.add(0, 1.0);
    e.add(1, 1.0);
    p.add_constraint(std::move(e), Sense::LE, 1.5, "cap");

    CHECK(p.check_feasible({1.0, 0.0}, 1e-9).empty());
    CHECK(p.check_feasible({1.0, 1.0}, 1e-9).size() == 1);   // row violated
    CHECK(p.check_feasible({-0.5, 0.0}, 1e-9).size() == 1);  // bound
    CHECK(p.check_feasible({0.5, 0.4}, 1e-9).size() == 1);   // integrality
    CHECK(p.check_feasible({0.5}, 1e-9).size() == 1);        // size mismatch
}

TEST_CASE("lp text round-trips bit for bit") {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 25; ++k) {
        MilpProblem p = sample_problem(rng);
        const std::string text = to_lp_text(p);
        MilpProblem q = parse_lp_text(text);

        REQUIRE(q.variables().size() == p.variables().size());
        for (std::size_t i = 0; i < p.variables().size(); ++i) {
            CHECK(q.variables()[i].domain == p.variables()[i].domain);
            CHECK(q.variables()[i].lower == p.variables()[i].lower);
            CHECK(q.variables()[i].upper == p.variables()[i].upper);
        }
        REQUIRE(q.constraints().size() == p.constraints().size());
        for (std::size_t i = 0; i < p.constraints().size(); ++i) {
            CHECK(q.constraints()[i].sense == p.constraints()[i].sense);
            CHECK(q.constraints()[i].rhs == p.constraints()[i].rhs);
            CHECK(q.constraints()[i].expr.terms == p.constraints()[i].expr.terms);
        }
        CHECK(q.objective().terms == p.objective().terms);
        CHECK(q.objective().constant == p.objective().constant);
        // A second dump of the parsed problem differs only in the dropped
        // diagnostic comment lines.
        MilpProblem r = parse_lp_text(to_lp_text(q));
        CHECK(to_lp_text(r) == to_lp_text(q));
    }
}

TEST_CASE("parse_lp_text rejects malformed input") {
    CHECK_THROWS_AS(parse_lp_text("Minimize\n obj: 1.0 x0\n"), ParseError);
    CHECK_THROWS_AS(parse_lp_text("garbage\nEnd\n"), ParseError);
    MilpProblem p;
    p.add_variable("x", VarDomain::CONTINUOUS, 0.0, 1.0);
    LinearExpr e;
    e.add(0, 2.0);
    p.add_constraint(std::move(e), Sense::GE, 1.0);
    LinearExpr obj;
    obj.add(0, 1.0);
    p.set_objective(std::move(obj));
    std::string text = to_lp_text(p);
    text.replace(text.find(">="), 2, "??");
    CHECK_THROWS_AS(parse_lp_text(text), ParseError);
}

}  // TEST_SUITE
