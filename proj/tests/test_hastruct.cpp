#include "straloop/hastruct.hpp"

#include "straloop/model.hpp"
#include "straloop/serialize.hpp"
#include "straloop/simcheck.hpp"
#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace straloop;
using testutil::Rng;

namespace {

ModelFile reactor_ha() {
    return load_model_file(std::string(STRALOOP_MODELS_DIR) + "/reactor_ha.model");
}

Formula F(const char* s) { return parse_formula(s); }

} // namespace

TEST_CASE("reach_set of a band, a point set and false") {
    ModelFile mf = reactor_ha();
    Formula k = F("3 <= h & h <= 4 & t >= 0 & t <= 0");
    Formula r = reach_set(k, mf.model, {Rat(-1)});
    CHECK(equivalent(r, F("3 <= h + t & h + t <= 4 & t >= 0")));
    // sampled flow lines stay inside
    for (const char* x0s : {"3", "13/4", "4"}) {
        Rat x0 = Rat::parse(x0s);
        for (const auto& d : testutil::grid(Rat(0), Rat(3), Rat(1, 4)))
            CHECK(r.eval({{"h", x0 - d}, {"t", d}}));
    }

    CHECK(reach_set(Formula::f(), mf.model, {Rat(-1)}).is_false());

    Formula k2 = F("2 < h & h <= 3 & t >= 0 & t <= 0");
    Formula r2 = reach_set(k2, mf.model, {Rat(1)});
    CHECK(equivalent(r2, F("2 < h - t & h - t <= 3 & t >= 0")));
}

TEST_CASE("weakest_guard reproduces the worked bands") {
    ModelFile mf = reactor_ha();
    SynthesisResult syn = run_fixpoint(mf.model, mf.spec, mf.k);
    Formula init_q2_1 = F("3 <= h & h <= 4 & t >= 0 & t <= 0");
    Formula reach = reach_set(init_q2_1, mf.model, {Rat(-1)});

    Formula g0 = weakest_guard(reach, syn.family.at(0, 0));
    CHECK(equivalent(g0, F("3/2 <= h & h <= 2")));
    // per-h universal oracle over the band times t in [3-h, 4-h]
    for (const auto& h : testutil::grid(Rat(0), Rat(4), Rat(1, 8))) {
        bool ok = true;
        for (Rat t = Rat(3) - h; t <= Rat(4) - h; t += Rat(1, 16)) {
            if (t.sign() < 0) continue;
            if (!syn.family.at(0, 0).eval({{"h", h}, {"t", t}})) { ok = false; break; }
        }
        CHECK(g0.eval({{"h", h}, {"t", Rat(0)}}) == ok);
    }

    Formula g1 = weakest_guard(reach, syn.family.at(0, 1));
    CHECK(equivalent(g1, F("3/2 <= h & h <= 5/2")));

    CHECK(weakest_guard(Formula::t(), Formula::t()).is_true());
}

TEST_CASE("weakest guards are maximal within the reach projection") {
    Rng rng(606);
    ModelFile mf = reactor_ha();
    int exercised = 0;
    for (int iter = 0; iter < 40; ++iter) {
        Rat lo = rng.rat(-4, 4, 2);
        Rat wid = Rat(rng.range(1, 8), 2);
        Formula k = f_and({Formula::ge0(LinExpr::var("h") - LinExpr::constant(lo)),
                           Formula::ge0(LinExpr::constant(lo + wid) - LinExpr::var("h")),
                           F("t >= 0 & t <= 0")});
        std::vector<Rat> rate{rng.range(0, 1) ? Rat(1) : Rat(-1)};
        Formula reach = reach_set(k, mf.model, rate);
        Formula target = testutil::random_formula(rng, {"h", "t"}, 3);
        Formula g = weakest_guard(reach, target);
        // any point of proj(reach) outside g breaks the criterion when added
        Formula outside = f_and(qe_exists(kTimeVar, reach), f_not(g));
        auto w = find_point(outside);
        if (!w) continue;
        Rat hstar = w->at("h");
        Formula pt = f_and(Formula::ge0(LinExpr::var("h") - LinExpr::constant(hstar)),
                           Formula::ge0(LinExpr::constant(hstar) - LinExpr::var("h")));
        CHECK_FALSE(is_empty(f_and({reach, pt, f_not(target)})));
        ++exercised;
    }
    CHECK(exercised > 10);
}

TEST_CASE("resolve_and_assemble reproduces the reactor guards") {
    ModelFile mf = reactor_ha();
    SynthesisResult syn = run_fixpoint(mf.model, mf.spec, mf.k);
    AutomatonOut aut = resolve_and_assemble(mf.model, syn.family, syn.partition, mf.spec,
                                            mf.retry);
    CHECK_FALSE(aut.incomplete);
    REQUIRE(aut.guards.guards.count({0, 1}) == 1);
    REQUIRE(aut.guards.guards.count({1, 0}) == 1);
    CHECK(equivalent(aut.guards.guards.at({0, 1}), F("h >= 4 & h <= 4")));
    CHECK(equivalent(aut.guards.guards.at({1, 0}), F("h >= 5/2 & h <= 5/2")));
    // the (q2,q1) guard needed one expansion step: target level 1 for i = 0
    REQUIRE(aut.guards.per_i_level.count({{1, 0}, 0}) == 1);
    CHECK(aut.guards.per_i_level.at({{1, 0}, 0}) == 1);
    CHECK(aut.guards.dropped_inits.empty());

    // emitted initial sets are the confined bands
    CHECK(equivalent(aut.init[0], F("0 <= h & h <= 3")));
    CHECK(equivalent(aut.init[1], F("3 <= h & h <= 4")));
    // domains: exit boundaries of the guards
    CHECK(equivalent(aut.domains[0], F("h <= 4")));
    CHECK(equivalent(aut.domains[1], F("h >= 5/2")));

    // guard criterion holds post-hoc for every emitted per-i guard
    for (const auto& [key, gi] : aut.guards.per_i) {
        const auto& [edge, i] = key;
        const Formula& part = aut.parts[static_cast<size_t>(i) + 1][edge.first];
        Formula reach = reach_set(part, mf.model, mf.model.mode(edge.first).rate);
        int lvl = aut.guards.per_i_level.at(key);
        CHECK(includes(syn.family.at(edge.second, lvl), f_and(reach, gi)));
    }
}

TEST_CASE("single mode with empty edge set") {
    SwitchedModel m({"x"}, {Mode{"solo", {Rat(1)}, Formula::t()}},
                    std::vector<std::pair<size_t, size_t>>{});
    StraFormula phi(F("0 <= x & x <= 4"), F("x >= 1 & x <= 2"), Rat(0), Rat(2));
    SynthesisResult syn = run_fixpoint(m, phi, 2);
    AutomatonOut aut = resolve_and_assemble(m, syn.family, syn.partition, phi);
    CHECK(aut.guards.guards.empty());
    CHECK_FALSE(aut.incomplete);
    CHECK(equivalent(aut.init[0], syn.partition.at(0, 0)));
    CHECK(aut.domains[0].is_true());
}

TEST_CASE("unresolvable conflicts drop the offending init part") {
    // target mode r is only satisfiable far away (h >= 10) and early
    // (t <= 1): the flow from Init_q^1 = [0,1] reaches h = 10 long after
    // t = 1, so no time-free guard works at any expansion level
    SwitchedModel m({"h"}, {Mode{"q", {Rat(1)}, Formula::t()},
                            Mode{"r", {Rat(-1)}, Formula::t()}},
                    std::vector<std::pair<size_t, size_t>>{{0, 1}});
    StateTimeFamily fam;
    fam.k = 1;
    fam.sets = {{Formula::f(), F("h >= 10 & t <= 1")},
                {Formula::f(), F("h >= 10 & t <= 1")}};
    InitPartition part;
    part.parts = {{Formula::f(), Formula::f()}, {F("0 <= h & h <= 1"), Formula::f()}};
    StraFormula phi(Formula::t(), F("h >= 10"), Rat(0), Rat(1));
    AutomatonOut aut = resolve_and_assemble(m, fam, part, phi);
    CHECK(aut.guards.guards.empty());
    REQUIRE(aut.guards.dropped_inits.size() == 1);
    CHECK(std::get<0>(aut.guards.dropped_inits[0]) == 0);
    CHECK(std::get<1>(aut.guards.dropped_inits[0]) == 1);
    CHECK(aut.init[0].is_false()); // the dropped part left nothing
    CHECK_FALSE(aut.incomplete);
}

TEST_CASE("exit_boundary keeps the faces the flow leaves through") {
    ModelFile mf = reactor_ha();
    CHECK(equivalent(exit_boundary(F("h >= 5/2 & h <= 5/2"), mf.model, {Rat(-1)}),
                     F("h >= 5/2")));
    CHECK(equivalent(exit_boundary(F("h <= 4"), mf.model, {Rat(1)}), F("h <= 4")));

    SwitchedModel m2({"x", "y"}, {Mode{"m", {Rat(0), Rat(1)}, Formula::t()}});
    CHECK(exit_boundary(parse_formula("x >= 0"), m2, {Rat(0), Rat(1)}).is_true());
}

TEST_CASE("expansion safety: executions through the expanded guard satisfy phi") {
    ModelFile mf = reactor_ha();
    SynthesisResult syn = run_fixpoint(mf.model, mf.spec, mf.k);
    AutomatonOut aut = resolve_and_assemble(mf.model, syn.family, syn.partition, mf.spec,
                                            mf.retry);
    Rng rng(17);
    int runs = 0;
    for (int iter = 0; iter < 100; ++iter) {
        // start in q2 (whose first guard was expanded), x0 in [3,4]
        Rat x0 = Rat(3) + Rat(rng.range(0, 32), 32);
        ExecutionTrace tr = closed_loop_run(aut, mf.model, {x0},
                                            static_cast<uint64_t>(iter), mf.spec.hi);
        // must pass through the expanded guard band at h = 5/2 when it
        // switches, and still satisfy the specification
        CHECK(monitor(tr.trajectory, mf.spec, Rat(0)));
        ++runs;
    }
    CHECK(runs == 100);
}

TEST_CASE("worked closed-loop trace: x0 = 3 in q1") {
    // rises to the guard at h = 4 (t = 1), must-switch, descends to the
    // expanded guard at h = 5/2 (t = 5/2), must-switch, rises again; the
    // specification is met at tau' = 3 with h = 3
    ModelFile mf = reactor_ha();
    SynthesisResult syn = run_fixpoint(mf.model, mf.spec, mf.k);
    AutomatonOut aut = resolve_and_assemble(mf.model, syn.family, syn.partition, mf.spec,
                                            mf.retry);
    for (uint64_t seed : {0ull, 1ull, 42ull}) {
        ExecutionTrace tr = closed_loop_run(aut, mf.model, {Rat(3)}, seed, mf.spec.hi);
        REQUIRE(tr.mode_timeline.size() >= 3);
        CHECK(tr.mode_timeline[0] == std::make_pair<size_t, Rat>(0, Rat(0)));
        CHECK(tr.mode_timeline[1] == std::make_pair<size_t, Rat>(1, Rat(1)));
        CHECK(tr.mode_timeline[2] == std::make_pair<size_t, Rat>(0, Rat(5, 2)));
        CHECK(tr.trajectory.value(Rat(1)) == std::vector<Rat>{Rat(4)});
        CHECK(tr.trajectory.value(Rat(5, 2)) == std::vector<Rat>{Rat(5, 2)});
        CHECK(tr.trajectory.value(Rat(3)) == std::vector<Rat>{Rat(3)});
        CHECK(monitor(tr.trajectory, mf.spec, Rat(0)));
    }
}

TEST_CASE("closed-loop soundness from the emitted initial sets") {
    ModelFile mf = reactor_ha();
    SynthesisResult syn = run_fixpoint(mf.model, mf.spec, mf.k);
    AutomatonOut aut = resolve_and_assemble(mf.model, syn.family, syn.partition, mf.spec,
                                            mf.retry);
    Rng rng(23);
    for (int iter = 0; iter < 100; ++iter) {
        // draw x0 from either mode's emitted init
        size_t q = static_cast<size_t>(rng.range(0, 1));
        Rat x0 = q == 0 ? Rat(rng.range(0, 48), 16) : Rat(3) + Rat(rng.range(0, 16), 16);
        REQUIRE(aut.init[q].eval({{"h", x0}}));
        ExecutionTrace tr = closed_loop_run(aut, mf.model, {x0},
                                            static_cast<uint64_t>(1000 + iter), mf.spec.hi);
        CHECK(monitor(tr.trajectory, mf.spec, Rat(0)));
    }
}
