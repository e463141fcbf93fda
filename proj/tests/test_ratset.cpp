#include "straloop/dnf.hpp"
#include "straloop/formula.hpp"
#include "straloop/parse.hpp"
#include "straloop/serialize.hpp"

#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace straloop;
using testutil::Rng;

namespace {
Formula F(const char* s) { return parse_formula(s); }
}

TEST_CASE("combine identities") {
    Formula f = F("h >= 1 & h <= 2");
    CHECK(combine(SetOp::And, {Formula::t(), f}).same_shape(f)); // TRUE absorbed
    CHECK(equivalent(combine(SetOp::Or, {Formula::f(), f}), f));
    CHECK(combine(SetOp::And, {Formula::f(), f}).is_false());

    // self-difference is empty
    Formula box = F("0 <= h & h <= 4");
    CHECK(is_empty(combine(SetOp::Diff, {box, box})));

    CHECK_THROWS_AS(combine(SetOp::Not, {f, f}), std::invalid_argument);
    CHECK_THROWS_AS(combine(SetOp::Diff, {f}), std::invalid_argument);
}

TEST_CASE("set difference produces strict faces") {
    // [0,2] \ [0,1] = (1,2]
    Formula d = f_diff(F("0 <= h <= 2"), F("0 <= h <= 1"));
    CHECK(equivalent(d, F("h > 1 & h <= 2")));
    CHECK_FALSE(d.eval({{"h", Rat(1)}}));
    CHECK(d.eval({{"h", Rat(1001, 1000)}}));
    CHECK(d.eval({{"h", Rat(2)}}));
}

TEST_CASE("substitute_affine shifts atoms and keeps shape") {
    Formula f = F("h >= 1");
    Formula g = substitute_affine(f, {{"h", LinExpr::var("h") + LinExpr::var("d")}});
    CHECK(equivalent(g, F("h + d >= 1")));

    // identity map is structurally inert
    Formula big = F("(h >= 1 & t <= 2) | !(h > 3)");
    CHECK(substitute_affine(big, {}).same_shape(big));
    CHECK(substitute_affine(big, {{"h", LinExpr::var("h")}}).same_shape(big));

    // chained renames are order-dependent and rejected
    CHECK_THROWS_AS(substitute_affine(f, {{"h", LinExpr::var("t")},
                                          {"t", LinExpr::var("h")}}),
                    std::invalid_argument);
}

TEST_CASE("is_empty on edge cases") {
    CHECK(is_empty(F("h > 2 & h < 2")));
    CHECK(is_empty(F("h > 2 & h <= 2")));
    CHECK_FALSE(is_empty(F("h >= 2 & h <= 2"))); // point set
    CHECK(is_empty(Formula::f()));
    CHECK_FALSE(is_empty(Formula::t()));

    // the paper's guard conflict: both bands requested at once
    Formula bands = f_and(F("3/2 <= h & h <= 2"), F("5/2 <= h & h <= 3"));
    CHECK(is_empty(bands));
}

TEST_CASE("includes") {
    Formula a = F("0 <= h & h <= 4");
    Formula b = F("1 <= h & h <= 2");
    CHECK(includes(a, a));
    CHECK(includes(a, b));
    CHECK_FALSE(includes(b, a));
    CHECK(includes(a, Formula::f()));
    // strictness matters
    CHECK(includes(F("h >= 1"), F("h > 1")));
    CHECK_FALSE(includes(F("h > 1"), F("h >= 1")));
}

TEST_CASE("canonicalize preserves semantics (round trip)") {
    Rng rng(20240811);
    std::vector<VarId> vars{"x", "y", "z"};
    for (int iter = 0; iter < 150; ++iter) {
        Formula f = testutil::random_formula(rng, vars, 6);
        Formula c = canonicalize(f);
        CHECK(equivalent(f, c));
    }
}

TEST_CASE("DIFF then OR reassembles the original set") {
    Rng rng(7);
    std::vector<VarId> vars{"x", "y"};
    for (int iter = 0; iter < 80; ++iter) {
        Formula a = testutil::random_formula(rng, vars, 4);
        Formula b = testutil::random_formula(rng, vars, 4);
        Formula recombined = f_or(f_diff(a, b), f_and(a, b));
        CHECK(equivalent(recombined, a));
    }
}

TEST_CASE("is_empty agrees with rational grid search") {
    // Grid witnesses force non-emptiness; conversely every non-empty verdict
    // must come with a rational witness that evaluates true (thin strict
    // slivers can legitimately evade the grid).
    Rng rng(99);
    std::vector<VarId> vars{"x", "y"};
    auto pts = testutil::grid(Rat(-4), Rat(4), Rat(1, 8));
    for (int iter = 0; iter < 60; ++iter) {
        Formula f = testutil::random_formula(rng, vars, 4, /*coeffAbs=*/1, /*maxDen=*/1);
        bool gridWitness = false;
        for (const auto& x : pts) {
            for (const auto& y : pts) {
                if (f.eval({{"x", x}, {"y", y}})) { gridWitness = true; break; }
            }
            if (gridWitness) break;
        }
        bool empty = is_empty(f);
        if (gridWitness) CHECK_FALSE(empty);
        if (!empty) {
            auto w = find_point(f);
            REQUIRE(w.has_value());
            std::map<VarId, Rat> p = *w;
            for (const auto& v : vars) p.emplace(v, Rat(0));
            CHECK(f.eval(p));
        }
    }
}

TEST_CASE("canonical serialization round-trips bit-exactly") {
    Rng rng(4242);
    std::vector<VarId> vars{"x", "y"};
    for (int iter = 0; iter < 100; ++iter) {
        Formula f = testutil::random_formula(rng, vars, 5);
        std::string s1 = canonical_string(f);
        Formula g = parse_formula(s1);
        CHECK(equivalent(f, g));
        CHECK(canonical_string(g) == s1); // byte-stable
    }
    CHECK(canonical_string(Formula::t()) == "true");
    CHECK(canonical_string(F("x > 2 & x < 2")) == "false");
}

TEST_CASE("pretty serialization parses back") {
    Rng rng(31337);
    std::vector<VarId> vars{"x", "y"};
    for (int iter = 0; iter < 60; ++iter) {
        Formula f = testutil::random_formula(rng, vars, 4);
        Formula g = parse_formula(pretty_string(f));
        CHECK(equivalent(f, g));
    }
    CHECK(pretty_string(F("h - 4 >= 0 & 4 - h >= 0")) == "h >= 4 & h <= 4");
}

TEST_CASE("membership evaluation is exact at rational points") {
    Formula f = F("1/3 <= x & x <= 2/3");
    CHECK(f.eval({{"x", Rat(1, 3)}}));
    CHECK(f.eval({{"x", Rat(1, 2)}}));
    CHECK_FALSE(f.eval({{"x", Rat(333333333, 1000000000)}}));
    CHECK_FALSE(f.eval({{"x", Rat(2, 3) + Rat(1, 1000000000)}}));
}

TEST_CASE("find_point honors strict bounds") {
    auto w = find_point(F("x > 1 & x < 1 + 1/1000000"));
    REQUIRE(w.has_value());
    Rat x = w->at("x");
    CHECK(x > Rat(1));
    CHECK(x < Rat(1) + Rat(1, 1000000));
}
