// ============================================================================
// straloop/synthesis.hpp — state-time sets, fixpoint iteration, controllers
// ============================================================================
//
// The state-time set X_q^i collects every (x, tau) from which, starting in
// mode q at time tau, the specification is satisfiable with at most i
// switches. For constant rates a_q the sets are computed exactly:
//
//   X_q^0 = QE( exists d >= 0:
//                 phi2[x -> x + d*a_q, t -> t + d]  &  l <= t + d <= u
//               & forall h in [0, d]: phi1[x -> x + h*a_q, t -> t + h] )
//
//   X_q^i = OR over edges (q, q'):
//           QE( exists d >= 0:
//                 X_{q'}^{i-1}[x -> x + d*a_q, t -> t + d]
//               & forall h in [0, d]: phi1[x -> x + h*a_q, t -> t + h] )
//
// Sets are restricted to t >= 0 (global time is nonnegative).
//
// The iteration is monotone per mode; it stops at the switching bound k or
// at the semantic fixpoint, whichever comes first. fixpoint_at is the
// smallest index i with X^{i+1} equivalent to X^i for every mode — the
// index at which the family attains its limit (detection computes one
// extra level).
//
// ============================================================================

#ifndef STRALOOP_SYNTHESIS_HPP
#define STRALOOP_SYNTHESIS_HPP

#include "straloop/interval.hpp"
#include "straloop/model.hpp"
#include "straloop/parallel.hpp"
#include "straloop/qelim.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace straloop {

inline const VarId kAuxDelta = "$d";
inline const VarId kAuxSweep = "$h";

struct SynthesisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Piecewise-constant controller output: (q0,t0)(q1,t1)...(ql,tl), t0 = 0,
// times strictly increasing.
struct Schedule {
    struct Step {
        size_t mode;
        Rat time;
    };
    std::vector<Step> steps;

    explicit Schedule(std::vector<Step> s) : steps(std::move(s)) {
        if (steps.empty()) throw std::invalid_argument("Schedule: empty");
        if (!steps.front().time.is_zero())
            throw std::invalid_argument("Schedule: first switch time must be 0");
        for (size_t i = 1; i < steps.size(); ++i)
            if (!(steps[i - 1].time < steps[i].time))
                throw std::invalid_argument("Schedule: switch times must strictly increase");
    }

    size_t switches() const { return steps.size() - 1; }

    std::string str(const SwitchedModel& m) const {
        std::string out;
        for (const auto& s : steps)
            out += "(" + m.mode(s.mode).id + "," + s.time.str() + ")";
        return out;
    }
};

// X_q^i per mode and index; monotone in i per mode.
struct StateTimeFamily {
    std::vector<std::vector<Formula>> sets; // sets[i][q]
    int k = 0;                              // requested switching bound
    std::optional<int> fixpoint_at;

    int top_index() const { return static_cast<int>(sets.size()) - 1; }
    const Formula& at(size_t q, int i) const {
        int idx = i <= top_index() ? i : top_index();
        return sets[static_cast<size_t>(idx)][q];
    }
};

// Init[q]^i = (X_q^i \ X_q^{i-1})[t = 0], over state variables only,
// intersected with the mode's declared initial-state confinement.
struct InitPartition {
    std::vector<std::vector<Formula>> parts; // parts[i][q]

    int top_index() const { return static_cast<int>(parts.size()) - 1; }
    const Formula& at(size_t q, int i) const { return parts[static_cast<size_t>(i)][q]; }
    bool contains(size_t q, int i, const std::map<VarId, Rat>& x) const {
        return parts[static_cast<size_t>(i)][q].eval(x);
    }
};

namespace detail {

inline std::map<VarId, LinExpr> flow_shift(const SwitchedModel& m, size_t q,
                                           const VarId& step) {
    std::map<VarId, LinExpr> sub;
    const auto& rate = m.mode(q).rate;
    for (size_t i = 0; i < m.dim(); ++i) {
        if (rate[i].is_zero()) continue;
        sub[m.vars()[i]] = LinExpr::var(m.vars()[i]) + LinExpr::var(step, rate[i]);
    }
    sub[kTimeVar] = LinExpr::var(kTimeVar) + LinExpr::var(step);
    return sub;
}

// forall h in [0, d]: phi1 along the flow of q — shared by the base case
// and every induction step of the same mode.
inline Formula stay_condition(const SwitchedModel& m, size_t q, const Formula& phi1) {
    Formula shifted = substitute_affine(phi1, flow_shift(m, q, kAuxSweep));
    return qe_forall(kAuxSweep, shifted, LinExpr::constant(Rat(0)), LinExpr::var(kAuxDelta));
}

inline Formula time_nonneg() { return Formula::ge0(LinExpr::var(kTimeVar)); }

} // namespace detail

// Base case: satisfiable without switching from (x, t) in mode q.
inline Formula compute_X0(const SwitchedModel& model, size_t q, const StraFormula& phi) {
    Formula target = substitute_affine(phi.phi2, detail::flow_shift(model, q, kAuxDelta));
    LinExpr td = LinExpr::var(kTimeVar) + LinExpr::var(kAuxDelta);
    Formula window = f_and(Formula::ge0(td - LinExpr::constant(phi.lo)),
                           Formula::ge0(LinExpr::constant(phi.hi) - td));
    Formula stay = detail::stay_condition(model, q, phi.phi1);
    Formula body = f_and({std::move(target), std::move(window), std::move(stay)});
    Formula x0 = qe_exists(kAuxDelta, std::move(body), LinExpr::constant(Rat(0)));
    return canonicalize(f_and(std::move(x0), detail::time_nonneg()));
}

// Induction step: reach some X_{q'}^{i-1} over an edge (q, q') while phi1
// holds along the flow of q.
inline Formula compute_Xstep(const SwitchedModel& model, size_t q,
                             const std::vector<Formula>& prev, const Formula& phi1) {
    Formula stay = detail::stay_condition(model, q, phi1);
    auto shift = detail::flow_shift(model, q, kAuxDelta);
    std::vector<Formula> disjuncts;
    for (size_t qn : model.successors(q)) {
        Formula target = substitute_affine(prev[qn], shift);
        Formula body = f_and(std::move(target), stay);
        disjuncts.push_back(qe_exists(kAuxDelta, std::move(body), LinExpr::constant(Rat(0))));
    }
    if (disjuncts.empty()) return Formula::f();
    return canonicalize(f_and(f_or(std::move(disjuncts)), detail::time_nonneg()));
}

namespace detail {

inline Formula init_slice(const SwitchedModel& model, size_t q, const Formula& xset) {
    Formula at0 = substitute_var(xset, kTimeVar, LinExpr::constant(Rat(0)));
    return canonicalize(f_and(at0, model.mode(q).init));
}

} // namespace detail

struct SynthesisResult {
    StateTimeFamily family;
    InitPartition partition;
};

// Alg. 1: compute X_q^i for i <= k or until the semantic fixpoint, and
// split the t=0 slices into the minimal-switch partition.
inline SynthesisResult run_fixpoint(const SwitchedModel& model, const StraFormula& phi,
                                    int k) {
    if (k < 0) throw std::invalid_argument("run_fixpoint: k must be nonnegative");
    size_t nq = model.n_modes();
    StateTimeFamily family;
    family.k = k;
    InitPartition partition;

    std::vector<Formula> level(nq, Formula::f());
    parallel_for_index(nq, [&](size_t q) { level[q] = compute_X0(model, q, phi); });
    family.sets.push_back(level);

    std::vector<Formula> inits(nq, Formula::f());
    for (size_t q = 0; q < nq; ++q) inits[q] = detail::init_slice(model, q, level[q]);
    partition.parts.push_back(std::move(inits));

    for (int i = 1; i <= k; ++i) {
        const std::vector<Formula>& prev = family.sets.back();
        std::vector<Formula> cur(nq, Formula::f());
        parallel_for_index(nq, [&](size_t q) {
            cur[q] = compute_Xstep(model, q, prev, phi.phi1);
        });
        std::vector<Formula> curInit(nq, Formula::f());
        for (size_t q = 0; q < nq; ++q)
            curInit[q] = detail::init_slice(model, q, f_diff(cur[q], prev[q]));

        bool stable = true;
        for (size_t q = 0; q < nq && stable; ++q)
            stable = equivalent(cur[q], prev[q]);
        family.sets.push_back(std::move(cur));
        partition.parts.push_back(std::move(curInit));
        if (stable) {
            family.fixpoint_at = i - 1;
            break;
        }
    }
    return {std::move(family), std::move(partition)};
}

// Truth times of a formula over (x, t) along the affine line
// x(s) = x0 + (s - t0) * rate.
inline IntervalSet line_truth_set(const Formula& f, const SwitchedModel& model,
                                  const std::vector<Rat>& x0, const Rat& t0,
                                  const std::vector<Rat>& rate) {
    auto resolve = [&](const Atom& a) {
        AffineOfParam r{Rat(0), a.expr.constant_term()};
        for (const auto& [v, c] : a.expr.coeffs()) {
            if (v == kTimeVar) {
                r.slope += c;
                continue;
            }
            size_t vi = 0;
            for (; vi < model.dim(); ++vi)
                if (model.vars()[vi] == v) break;
            if (vi == model.dim())
                throw std::invalid_argument("line_truth_set: unknown variable " + v);
            r.slope += c * rate[vi];
            r.offset += c * (x0[vi] - t0 * rate[vi]);
        }
        return r;
    };
    return formula_param_set(f, resolve);
}

// Witness switch time into `target` along the flow line from (x_j, t_j):
// the earliest feasible time when the infimum is attained, otherwise the
// midpoint of the first feasible interval capped at infimum + 1.
inline Rat pick_switch_time(const SwitchedModel& model, const std::vector<Rat>& xj,
                            const Rat& tj, const std::vector<Rat>& rate,
                            const Formula& target) {
    IntervalSet feas = line_truth_set(target, model, xj, tj, rate)
                           .intersect(Ival::at_least(tj, /*open=*/true));
    if (feas.is_empty()) throw SynthesisError("no transition window");
    const Ival& first = feas.first();
    // lo is finite: the set is clipped to (tj, inf)
    Rat lo = *first.lo.v;
    if (!first.lo.open) return lo;
    if (!first.hi.v) return lo + Rat(1);
    Rat gap = *first.hi.v - lo;
    return lo + min(Rat(1), gap / Rat(2));
}

namespace detail {

inline std::map<VarId, Rat> point_of(const SwitchedModel& m, const std::vector<Rat>& x) {
    std::map<VarId, Rat> p;
    for (size_t i = 0; i < m.dim(); ++i) p[m.vars()[i]] = x[i];
    return p;
}

inline std::vector<Rat> advance(const SwitchedModel& m, size_t q, const std::vector<Rat>& x,
                                const Rat& from, const Rat& to) {
    std::vector<Rat> out(x);
    const auto& rate = m.mode(q).rate;
    for (size_t i = 0; i < out.size(); ++i) out[i] += (to - from) * rate[i];
    return out;
}

} // namespace detail

// Alg. 2: minimal-switch schedule for a concrete initial state. Finds the
// smallest partition index containing x0; at each step scans modes in
// declaration order and switches at the first feasible window. A tie
// between modes at the same (smallest) index is broken by the earliest
// feasible first-switch time, then declaration order.
inline Schedule extract_controller(const std::vector<Rat>& x0, const StateTimeFamily& family,
                                   const InitPartition& partition,
                                   const SwitchedModel& model) {
    if (x0.size() != model.dim())
        throw std::invalid_argument("extract_controller: dimension mismatch");
    auto p0 = detail::point_of(model, x0);

    std::vector<size_t> candidates;
    int l = -1;
    for (int i = 0; i <= partition.top_index() && candidates.empty(); ++i) {
        for (size_t q = 0; q < model.n_modes(); ++q)
            if (partition.at(q, i).eval(p0)) candidates.push_back(q);
        if (!candidates.empty()) l = i;
    }
    if (candidates.empty())
        throw SynthesisError("not synthesizable within k switches");

    auto first_window = [&](size_t q0) -> std::optional<std::pair<Rat, size_t>> {
        for (size_t qn : model.successors(q0)) {
            const Formula& target = family.at(qn, l - 1);
            try {
                Rat t = pick_switch_time(model, x0, Rat(0), model.mode(q0).rate, target);
                return std::make_pair(t, qn);
            } catch (const SynthesisError&) {
                continue;
            }
        }
        return std::nullopt;
    };

    size_t q0 = candidates.front();
    if (l >= 1 && candidates.size() > 1) {
        std::optional<Rat> bestT;
        for (size_t q : candidates) {
            auto w = first_window(q);
            if (w && (!bestT || w->first < *bestT)) {
                bestT = w->first;
                q0 = q;
            }
        }
    }

    std::vector<Schedule::Step> steps{{q0, Rat(0)}};
    std::vector<Rat> x = x0;
    Rat t(0);
    size_t q = q0;
    for (int j = 1; j <= l; ++j) {
        bool advanced = false;
        for (size_t qn : model.successors(q)) {
            const Formula& target = family.at(qn, l - j);
            try {
                Rat tn = pick_switch_time(model, x, t, model.mode(q).rate, target);
                x = detail::advance(model, q, x, t, tn);
                t = tn;
                q = qn;
                steps.push_back({q, t});
                advanced = true;
                break;
            } catch (const SynthesisError&) {
                continue;
            }
        }
        if (!advanced) throw SynthesisError("no transition window");
    }
    return Schedule(std::move(steps));
}

} // namespace straloop

#endif // STRALOOP_SYNTHESIS_HPP
