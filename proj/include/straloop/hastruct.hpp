// ============================================================================
// straloop/hastruct.hpp — switched hybrid automaton synthesis
// ============================================================================
//
// Turns the time-relevant state-time sets into a time-free automaton:
//
//   Reach(K)        = QE(exists d >= 0: K[x -> x - d*a, t -> t - d])
//   guard criterion   forall (x,tau):
//                       (x,tau) in Reach(Init_q^{i+1}) & G(q,q')^i
//                         implies (x,tau) in X_{q'}^i
//
// The i-switches guards are computed as the weakest time-free sets
// satisfying the criterion, restricted to states the source can actually
// occupy. Conflicting guards for one edge are resolved first by expanding
// the target X^i to a higher level (sound by the monotonicity of the
// family), then by dropping whole Init parts; both steps are recorded.
// After an edge is fixed, the switch points G(e) & Reach(Init_q^i) are
// added to the successor's Init part at level i-1 and the successor's
// outgoing edges are re-enqueued.
//
// Domains are the exit boundaries of the guards: the faces whose outward
// normal opposes the flow (b . a < 0), so that leaving the domain forces
// the transition while the guard still holds.
//
// ============================================================================

#ifndef STRALOOP_HASTRUCT_HPP
#define STRALOOP_HASTRUCT_HPP

#include "straloop/synthesis.hpp"

#include <deque>
#include <map>
#include <set>
#include <tuple>
#include <vector>

namespace straloop {

using EdgeId = std::pair<size_t, size_t>;

// Time-relevant reachable set of K under constant rate; K may constrain
// both x and t (conjoin t = 0 for a pure initial set).
inline Formula reach_set(const Formula& k, const SwitchedModel& model,
                         const std::vector<Rat>& rate) {
    std::map<VarId, LinExpr> sub;
    for (size_t i = 0; i < model.dim(); ++i) {
        if (rate[i].is_zero()) continue;
        sub[model.vars()[i]] =
            LinExpr::var(model.vars()[i]) - LinExpr::var(kAuxDelta, rate[i]);
    }
    sub[kTimeVar] = LinExpr::var(kTimeVar) - LinExpr::var(kAuxDelta);
    Formula shifted = substitute_affine(k, sub);
    return qe_exists(kAuxDelta, std::move(shifted), LinExpr::constant(Rat(0)));
}

// Weakest time-free guard satisfying the criterion, restricted to the
// states the reach tube actually visits:
//   project_x(reach) & !project_x(reach & !target).
// Any subset still satisfies the criterion.
inline Formula weakest_guard(const Formula& reach, const Formula& target) {
    Formula proj = qe_exists(kTimeVar, reach);
    Formula bad = qe_exists(kTimeVar, f_and(reach, f_not(target)));
    return canonicalize(f_and(std::move(proj), f_not(std::move(bad))));
}

// Faces of the guard the flow exits through: atoms b.x + c {>=,>} 0 with
// b . a < 0. Leaving the conjunction of these faces forces the switch.
inline Formula exit_boundary(const Formula& guard, const SwitchedModel& model,
                             const std::vector<Rat>& rate) {
    std::set<Atom> atoms;
    for (const auto& conj : to_dnf(canonicalize(guard)))
        for (const auto& a : conj) atoms.insert(a);
    std::vector<Formula> faces;
    for (const auto& a : atoms) {
        Rat dot(0);
        for (const auto& [v, c] : a.expr.coeffs()) {
            if (v == kTimeVar) continue;
            for (size_t i = 0; i < model.dim(); ++i)
                if (model.vars()[i] == v) { dot += c * rate[i]; break; }
        }
        if (dot.sign() < 0) faces.push_back(Formula::atom(a));
    }
    return canonicalize(f_and(std::move(faces)));
}

struct GuardTable {
    std::map<EdgeId, Formula> guards;               // retained edges only
    std::map<std::pair<EdgeId, int>, Formula> per_i;
    std::map<std::pair<EdgeId, int>, int> per_i_level; // expansion level used
    std::vector<std::tuple<size_t, int, Formula>> dropped_inits; // (mode, level, part)
};

struct AutomatonOut {
    std::vector<Formula> init;    // per mode, over x
    GuardTable guards;
    std::vector<Formula> domains; // per mode
    bool incomplete = false;
    std::vector<EdgeId> unresolved;
    // final working Init parts over (x, t): parts[i][q], after additions/drops
    std::vector<std::vector<Formula>> parts;
};

namespace detail {

inline Formula time_zero() {
    LinExpr tv = LinExpr::var(kTimeVar);
    return f_and(Formula::ge0(tv), Formula::ge0(-tv));
}

} // namespace detail

// The switch-logic worklist. Terminates by the per-edge pass budget; a
// budget overrun leaves the result flagged incomplete with the offending
// edges listed.
inline AutomatonOut resolve_and_assemble(const SwitchedModel& model,
                                         const StateTimeFamily& family,
                                         const InitPartition& partition,
                                         const StraFormula& phi, int retryBudget = 3) {
    (void)phi;
    size_t nq = model.n_modes();
    int top = family.top_index();
    AutomatonOut out;
    out.init.assign(nq, Formula::f());
    out.domains.assign(nq, Formula::t());

    // working Init parts over (x, t); pure-x parts enter at t = 0
    std::vector<std::vector<Formula>> P(static_cast<size_t>(top) + 1,
                                        std::vector<Formula>(nq, Formula::f()));
    for (int i = 0; i <= top && i <= partition.top_index(); ++i)
        for (size_t q = 0; q < nq; ++q)
            P[static_cast<size_t>(i)][q] =
                canonicalize(f_and(partition.at(q, i), detail::time_zero()));

    std::vector<EdgeId> edges = model.edges();
    std::deque<size_t> queue;
    std::vector<bool> inQueue(edges.size(), false);
    std::vector<int> passes(edges.size(), 0);
    for (size_t e = 0; e < edges.size(); ++e) {
        queue.push_back(e);
        inQueue[e] = true;
    }

    while (!queue.empty()) {
        size_t e = queue.front();
        queue.pop_front();
        inQueue[e] = false;
        auto [q, qn] = edges[e];
        if (passes[e] >= retryBudget) {
            out.incomplete = true;
            out.unresolved.push_back(edges[e]);
            continue;
        }
        ++passes[e];
        const auto& rate = model.mode(q).rate;

        auto active_levels = [&] {
            std::vector<int> act;
            for (int i = 0; i + 1 <= top; ++i)
                if (!is_empty(P[static_cast<size_t>(i) + 1][q])) act.push_back(i);
            return act;
        };

        std::vector<int> active = active_levels();
        // erase any stale guard records for this edge before recomputing
        for (int i = 0; i <= top; ++i) {
            out.guards.per_i.erase({edges[e], i});
            out.guards.per_i_level.erase({edges[e], i});
        }
        out.guards.guards.erase(edges[e]);
        if (active.empty()) continue; // nothing requests this edge

        std::map<int, Formula> gi;
        Formula g = Formula::f();
        bool resolved = false;
        while (!resolved) {
            std::map<int, Formula> reach;
            for (int i : active)
                reach[i] = reach_set(P[static_cast<size_t>(i) + 1][q], model, rate);
            std::map<int, int> usedLevel;
            for (int l = 0;; ++l) {
                gi.clear();
                usedLevel.clear();
                bool expandable = false;
                std::vector<Formula> parts;
                for (int i : active) {
                    int j = std::min(i + l, top);
                    if (i + l < top) expandable = true;
                    gi[i] = weakest_guard(reach[i], family.at(qn, j));
                    usedLevel[i] = j;
                    parts.push_back(gi[i]);
                }
                g = canonicalize(f_and(std::move(parts)));
                if (!is_empty(g)) {
                    resolved = true;
                    break;
                }
                if (!expandable) break; // expansion exhausted
            }
            if (resolved)
                for (const auto& [i, j] : usedLevel)
                    out.guards.per_i_level[{edges[e], i}] = j;
            if (resolved) break;
            // drop the deepest requesting part and retry from scratch
            int hi = active.back();
            out.guards.dropped_inits.emplace_back(q, hi + 1,
                                                  P[static_cast<size_t>(hi) + 1][q]);
            P[static_cast<size_t>(hi) + 1][q] = Formula::f();
            active = active_levels();
            if (active.empty()) break;
        }
        if (!resolved) continue; // edge ends up guardless

        for (const auto& [i, gf] : gi) out.guards.per_i[{edges[e], i}] = gf;
        out.guards.guards[edges[e]] = g;

        // switch points feed the successor's lower level
        std::set<size_t> enlarged;
        for (int i = 1; i <= top; ++i) {
            const Formula& part = P[static_cast<size_t>(i)][q];
            if (is_empty(part)) continue;
            Formula add = canonicalize(f_and(g, reach_set(part, model, rate)));
            if (is_empty(add)) continue;
            Formula& dst = P[static_cast<size_t>(i) - 1][qn];
            if (!includes(dst, add)) {
                dst = canonicalize(f_or(dst, add));
                enlarged.insert(qn);
            }
        }
        for (size_t q2 : enlarged) {
            for (size_t f = 0; f < edges.size(); ++f) {
                if (edges[f].first != q2 || inQueue[f]) continue;
                queue.push_back(f);
                inQueue[f] = true;
            }
        }
    }

    // emitted init: t = 0 slice of the (possibly enlarged) parts
    for (size_t q = 0; q < nq; ++q) {
        std::vector<Formula> slices;
        for (int i = 0; i <= top; ++i)
            slices.push_back(substitute_var(P[static_cast<size_t>(i)][q], kTimeVar,
                                            LinExpr::constant(Rat(0))));
        out.init[q] = canonicalize(f_or(std::move(slices)));
    }
    // domains: conjunction of exit boundaries over retained outgoing guards
    for (size_t q = 0; q < nq; ++q) {
        std::vector<Formula> faces;
        for (const auto& [edge, gf] : out.guards.guards)
            if (edge.first == q)
                faces.push_back(exit_boundary(gf, model, model.mode(q).rate));
        out.domains[q] = canonicalize(f_and(std::move(faces)));
    }
    out.parts = std::move(P);
    return out;
}

} // namespace straloop

#endif // STRALOOP_HASTRUCT_HPP
