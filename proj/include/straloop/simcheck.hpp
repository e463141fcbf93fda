// ============================================================================
// straloop/simcheck.hpp — exact simulation and brute-force oracles
// ============================================================================
//
// simulate realizes a schedule as a piecewise-linear trace;
// brute_force_min_switches searches grid-time schedules exhaustively and
// backs the minimality/completeness property suites; closed_loop_run
// executes a synthesized automaton under guard/domain semantics with a
// seeded resolver for the may-switch nondeterminism.
//
// ============================================================================

#ifndef STRALOOP_SIMCHECK_HPP
#define STRALOOP_SIMCHECK_HPP

#include "straloop/hastruct.hpp"
#include "straloop/strl.hpp"
#include "straloop/synthesis.hpp"

#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

namespace straloop {

struct ExecutionTrace {
    PwlTrajectory trajectory;
    std::vector<std::pair<size_t, Rat>> mode_timeline; // (mode, enter time)
};

// Exact trace of a schedule up to the horizon; state is continuous and
// the final mode's segment extends to the horizon.
inline ExecutionTrace simulate(const SwitchedModel& model, const std::vector<Rat>& x0,
                               const Schedule& schedule, const Rat& horizon) {
    if (x0.size() != model.dim())
        throw std::invalid_argument("simulate: dimension mismatch");
    for (const auto& s : schedule.steps)
        if (!(s.time < horizon))
            throw std::invalid_argument("simulate: switch times must precede the horizon");
    std::vector<TrajSegment> segs;
    std::vector<std::pair<size_t, Rat>> timeline;
    std::vector<Rat> x = x0;
    for (size_t i = 0; i < schedule.steps.size(); ++i) {
        const auto& st = schedule.steps[i];
        Rat tEnd = (i + 1 < schedule.steps.size()) ? schedule.steps[i + 1].time : horizon;
        TrajSegment seg;
        seg.t0 = st.time;
        seg.x0 = x;
        seg.rate = model.mode(st.mode).rate;
        seg.t1 = tEnd;
        for (size_t k = 0; k < x.size(); ++k) x[k] += (tEnd - st.time) * seg.rate[k];
        segs.push_back(std::move(seg));
        timeline.emplace_back(st.mode, st.time);
    }
    return {PwlTrajectory(model.vars(), std::move(segs)), std::move(timeline)};
}

// time,mode,x1..xn at every segment breakpoint, rationals as p/q
inline std::string trace_csv(const ExecutionTrace& trace, const SwitchedModel& model) {
    std::ostringstream os;
    os << "time,mode";
    for (const auto& v : model.vars()) os << "," << v;
    os << "\n";
    const auto& segs = trace.trajectory.segments();
    for (size_t i = 0; i < segs.size(); ++i) {
        os << segs[i].t0.str() << "," << model.mode(trace.mode_timeline[i].first).id;
        for (const auto& xv : segs[i].x0) os << "," << xv.str();
        os << "\n";
    }
    // closing breakpoint
    const auto& last = segs.back();
    os << last.t1.str() << "," << model.mode(trace.mode_timeline.back().first).id;
    for (size_t k = 0; k < last.x0.size(); ++k)
        os << "," << (last.x0[k] + (last.t1 - last.t0) * last.rate[k]).str();
    os << "\n";
    return os.str();
}

// Smallest switch count <= max_switches for which some schedule with
// switch times on the grid satisfies phi, scanning all admissible start
// modes (those whose declared init set contains x0) and edge-respecting
// mode sequences; nullopt when no grid schedule works.
inline std::optional<int> brute_force_min_switches(const SwitchedModel& model,
                                                   const std::vector<Rat>& x0,
                                                   const StraFormula& phi, int max_switches,
                                                   const Rat& time_grid) {
    if (time_grid.sign() <= 0)
        throw std::invalid_argument("brute_force_min_switches: grid must be positive");
    std::map<VarId, Rat> p0;
    for (size_t i = 0; i < model.dim(); ++i) p0[model.vars()[i]] = x0[i];
    Rat horizon = phi.hi;
    std::vector<Rat> ticks;
    for (Rat t = time_grid; t < horizon; t += time_grid) ticks.push_back(t);

    // adjacency in declaration order
    std::vector<std::vector<size_t>> succ(model.n_modes());
    for (size_t q = 0; q < model.n_modes(); ++q) succ[q] = model.successors(q);

    for (int n = 0; n <= max_switches; ++n) {
        // choose switch time indices i1 < i2 < ... < in, then mode chains
        std::vector<size_t> idx(static_cast<size_t>(n));
        std::vector<Rat> times(static_cast<size_t>(n));
        std::function<bool(int, size_t)> pickTimes = [&](int pos, size_t from) -> bool {
            if (pos == n) {
                for (int i = 0; i < n; ++i) times[static_cast<size_t>(i)] = ticks[idx[static_cast<size_t>(i)]];
                // mode chains
                std::vector<Schedule::Step> steps(static_cast<size_t>(n) + 1);
                std::function<bool(int, size_t)> pickModes = [&](int d, size_t q) -> bool {
                    steps[static_cast<size_t>(d)] = {q, d == 0 ? Rat(0) : times[static_cast<size_t>(d) - 1]};
                    if (d == n) {
                        Schedule sched{std::vector<Schedule::Step>(steps.begin(), steps.end())};
                        ExecutionTrace tr = simulate(model, x0, sched, horizon);
                        return monitor(tr.trajectory, phi, Rat(0));
                    }
                    for (size_t qn : succ[q])
                        if (pickModes(d + 1, qn)) return true;
                    return false;
                };
                for (size_t q0 = 0; q0 < model.n_modes(); ++q0) {
                    if (!model.mode(q0).init.eval(p0)) continue;
                    if (pickModes(0, q0)) return true;
                }
                return false;
            }
            for (size_t i = from; i < ticks.size(); ++i) {
                idx[static_cast<size_t>(pos)] = i;
                if (pickTimes(pos + 1, i + 1)) return true;
            }
            return false;
        };
        if (pickTimes(0, 0)) return n;
    }
    return std::nullopt;
}

// ── Closed-loop execution of a synthesized automaton ───────────────────────

struct BlockedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Guard/domain semantics: inside the domain a transition with a true guard
// may fire (resolver's choice of edge and rational time); when the flow
// reaches the domain boundary a true guard must fire; a violated domain
// with no enabled guard blocks, which callers treat as a failure signal.
inline ExecutionTrace closed_loop_run(const AutomatonOut& automaton,
                                      const SwitchedModel& model, const std::vector<Rat>& x0,
                                      uint64_t seed, const Rat& horizon) {
    std::mt19937_64 rng(seed);
    auto pick = [&](size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); };

    auto p0 = [&](const std::vector<Rat>& x) {
        std::map<VarId, Rat> p;
        for (size_t i = 0; i < model.dim(); ++i) p[model.vars()[i]] = x[i];
        return p;
    };

    std::optional<size_t> start;
    for (size_t q = 0; q < model.n_modes(); ++q)
        if (automaton.init[q].eval(p0(x0))) { start = q; break; }
    if (!start)
        throw std::invalid_argument("closed_loop_run: x0 not in the synthesized initial set");

    size_t q = *start;
    std::vector<Rat> x = x0;
    Rat t(0);
    std::vector<TrajSegment> segs;
    std::vector<size_t> segModes;

    auto emit = [&](const Rat& tEnd) {
        TrajSegment s;
        s.t0 = t;
        s.x0 = x;
        s.rate = model.mode(q).rate;
        s.t1 = tEnd;
        for (size_t i = 0; i < x.size(); ++i) x[i] += (tEnd - t) * s.rate[i];
        segs.push_back(std::move(s));
        segModes.push_back(q);
        t = tEnd;
    };

    int guardSteps = 0;
    while (t < horizon) {
        if (++guardSteps > 1000)
            throw BlockedError("closed_loop_run: step budget exceeded (Zeno-like run)");
        const auto& rate = model.mode(q).rate;
        IntervalSet dom = line_truth_set(automaton.domains[q], model, x, t, rate)
                              .intersect(Ival::at_least(t));
        auto stay = dom.interval_containing(t);
        std::vector<std::pair<EdgeId, IntervalSet>> windows;
        Rat cap = horizon;
        bool capIsExit = false;
        if (!stay) {
            cap = t; // domain already violated: a guard must fire now
            capIsExit = true;
        } else if (stay->hi.v && *stay->hi.v < horizon) {
            cap = *stay->hi.v;
            capIsExit = true;
        }
        for (const auto& [edge, g] : automaton.guards.guards) {
            if (edge.first != q) continue;
            IntervalSet w = line_truth_set(g, model, x, t, rate)
                                .intersect(Ival{{t, false}, {cap, false}});
            if (!w.is_empty()) windows.emplace_back(edge, w);
        }
        // resolver: either take some enabled transition at a rational point
        // of its window, or flow on to the cap
        size_t choice = pick(windows.size() + 1);
        if (choice < windows.size()) {
            const auto& [edge, w] = windows[choice];
            const Ival& iv = w.intervals()[pick(w.intervals().size())];
            Rat a = iv.lo.v ? *iv.lo.v : t;
            Rat b = iv.hi.v ? *iv.hi.v : cap;
            static const Rat fracs[] = {Rat(0), Rat(1, 4), Rat(1, 2), Rat(3, 4), Rat(1)};
            Rat tau = a + (b - a) * fracs[pick(5)];
            if ((tau == a && (iv.lo.open || tau == t)) || (tau == b && iv.hi.open))
                tau = a + (b - a) / Rat(2);
            if (tau <= t || !iv.contains(tau)) {
                // degenerate window at the current instant: flow instead
            } else {
                emit(tau);
                q = edge.second;
                continue;
            }
        }
        // flow to the cap
        if (!capIsExit || cap >= horizon) {
            emit(horizon);
            break;
        }
        // domain exit: a guard must be enabled exactly at the cap
        std::vector<EdgeId> enabled;
        for (const auto& [edge, g] : automaton.guards.guards) {
            if (edge.first != q) continue;
            std::vector<Rat> xe = x;
            for (size_t i = 0; i < xe.size(); ++i) xe[i] += (cap - t) * rate[i];
            std::map<VarId, Rat> pe;
            for (size_t i = 0; i < model.dim(); ++i) pe[model.vars()[i]] = xe[i];
            if (g.eval(pe)) enabled.push_back(edge);
        }
        if (enabled.empty())
            throw BlockedError("closed_loop_run: domain exit with no enabled guard in mode " +
                               model.mode(q).id);
        EdgeId take = enabled[pick(enabled.size())];
        if (cap > t) emit(cap);
        q = take.second;
    }
    if (segs.empty() || segs.back().t1 < horizon) emit(horizon);
    std::vector<std::pair<size_t, Rat>> timeline;
    for (size_t i = 0; i < segs.size(); ++i) timeline.emplace_back(segModes[i], segs[i].t0);
    return {PwlTrajectory(model.vars(), std::move(segs)), std::move(timeline)};
}

} // namespace straloop

#endif // STRALOOP_SIMCHECK_HPP
