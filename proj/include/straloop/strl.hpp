// ============================================================================
// straloop/strl.hpp — ST-RA formulas and exact monitoring of PWL signals
// ============================================================================
//
// An ST-RA specification is phi1 U[l,u] phi2 over Boolean combinations of
// affine atoms in the state variables and global time t. Satisfaction at
// (x, tau) follows the shifted-window semantics: a witness time
// tau' in [max(tau, l), u] where phi2 holds, with phi1 holding on the
// closed interval [tau, tau'] — including tau' itself.
//
// Monitoring is exact: per trajectory segment every atom is an affine
// function of time, so satisfaction sets are finite unions of rational
// intervals; no sampling is involved anywhere.
//
// ============================================================================

#ifndef STRALOOP_STRL_HPP
#define STRALOOP_STRL_HPP

#include "straloop/dnf.hpp"
#include "straloop/interval.hpp"
#include "straloop/parse.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace straloop {

struct StraFormula {
    Formula phi1;
    Formula phi2;
    Rat lo, hi; // I = [lo, hi], 0 <= lo <= hi

    StraFormula(Formula p1, Formula p2, Rat l, Rat u)
        : phi1(std::move(p1)), phi2(std::move(p2)), lo(std::move(l)), hi(std::move(u)) {
        if (lo.sign() < 0 || hi < lo)
            throw std::invalid_argument("StraFormula: interval must satisfy 0 <= l <= u");
    }

    // phi2 & (l <= t <= u) — the until-rewrite target (unbounded form).
    Formula phi2_in_window() const {
        LinExpr tv = LinExpr::var(kTimeVar);
        return f_and({phi2, Formula::ge0(tv - LinExpr::constant(lo)),
                      Formula::ge0(LinExpr::constant(hi) - tv)});
    }
};

// Parses the published grammar; rejects nested until.
inline StraFormula parse_stra(std::string_view text) {
    StraParts p = parse_stra_parts(text);
    return StraFormula(std::move(p.phi1), std::move(p.phi2), p.lo, p.hi);
}

// ── Piecewise-linear trajectories ───────────────────────────────────────────

struct TrajSegment {
    Rat t0;
    std::vector<Rat> x0;   // state at t0
    std::vector<Rat> rate; // dx/dt on [t0, t1]
    Rat t1;
};

class PwlTrajectory {
public:
    PwlTrajectory(std::vector<VarId> varNames, std::vector<TrajSegment> segments)
        : names_(std::move(varNames)), segs_(std::move(segments)) {
        if (segs_.empty()) throw std::invalid_argument("PwlTrajectory: no segments");
        for (size_t i = 0; i < segs_.size(); ++i) {
            const auto& s = segs_[i];
            if (s.x0.size() != names_.size() || s.rate.size() != names_.size())
                throw std::invalid_argument("PwlTrajectory: dimension mismatch");
            if (s.t1 < s.t0)
                throw std::invalid_argument("PwlTrajectory: segment times out of order");
            if (i > 0) {
                if (segs_[i - 1].t1 != s.t0)
                    throw std::invalid_argument("PwlTrajectory: segments not contiguous");
                std::vector<Rat> endPrev = at_segment_end(i - 1);
                if (endPrev != s.x0)
                    throw std::invalid_argument("PwlTrajectory: state discontinuity");
            }
        }
    }

    const std::vector<VarId>& names() const { return names_; }
    const std::vector<TrajSegment>& segments() const { return segs_; }
    Rat start_time() const { return segs_.front().t0; }
    Rat end_time() const { return segs_.back().t1; }

    std::vector<Rat> value(const Rat& t) const {
        for (const auto& s : segs_) {
            if (t >= s.t0 && t <= s.t1) {
                std::vector<Rat> x(names_.size());
                for (size_t i = 0; i < x.size(); ++i)
                    x[i] = s.x0[i] + (t - s.t0) * s.rate[i];
                return x;
            }
        }
        throw std::out_of_range("PwlTrajectory::value: time outside trajectory");
    }

    // Exact satisfaction time-set of a formula over (x, t), clipped to the
    // trajectory's domain.
    IntervalSet truth_set(const Formula& f) const {
        IntervalSet out;
        for (const auto& s : segs_) {
            auto resolve = [&](const Atom& a) {
                AffineOfParam r{Rat(0), a.expr.constant_term()};
                for (const auto& [v, c] : a.expr.coeffs()) {
                    if (v == kTimeVar) {
                        r.slope += c;
                        continue;
                    }
                    size_t idx = index_of(v);
                    r.slope += c * s.rate[idx];
                    r.offset += c * (s.x0[idx] - s.t0 * s.rate[idx]);
                }
                return r;
            };
            IntervalSet seg = formula_param_set(f, resolve).intersect(Ival::closed(s.t0, s.t1));
            out = out.unite(seg);
        }
        return out;
    }

private:
    std::vector<Rat> at_segment_end(size_t i) const {
        const auto& s = segs_[i];
        std::vector<Rat> x(names_.size());
        for (size_t k = 0; k < x.size(); ++k)
            x[k] = s.x0[k] + (s.t1 - s.t0) * s.rate[k];
        return x;
    }
    size_t index_of(const VarId& v) const {
        for (size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == v) return i;
        throw std::invalid_argument("trajectory: unknown variable " + v);
    }

    std::vector<VarId> names_;
    std::vector<TrajSegment> segs_;
};

// ── Monitoring ──────────────────────────────────────────────────────────────

struct MonitorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Generic until with an arbitrary (x,t)-target: exists tau' in
// [tau, horizon] with target(tau') and phi1 on [tau, tau'].
inline bool monitor_until_unbounded(const PwlTrajectory& traj, const Formula& phi1,
                                    const Formula& target, const Rat& tau) {
    if (tau < traj.start_time() || tau > traj.end_time())
        throw MonitorError("monitor: tau outside trajectory");
    IntervalSet t1 = traj.truth_set(phi1);
    auto cover = t1.interval_containing(tau);
    if (!cover) return false; // phi1 must hold at tau'' = tau
    IntervalSet reachable(Ival{{tau, false}, cover->hi});
    IntervalSet t2 = traj.truth_set(target);
    return !t2.intersect(reachable).is_empty();
}

// (x, tau) |= phi1 U_{I (-) tau} phi2, i.e. a witness in [max(tau,l), u].
inline bool monitor(const PwlTrajectory& traj, const StraFormula& phi, const Rat& tau) {
    if (traj.end_time() < phi.hi)
        throw MonitorError("monitor: insufficient horizon (trajectory ends before u)");
    if (tau > phi.hi) return false; // I (-) tau is empty
    if (tau < traj.start_time())
        throw MonitorError("monitor: tau outside trajectory");
    IntervalSet t1 = traj.truth_set(phi.phi1);
    auto cover = t1.interval_containing(tau);
    if (!cover) return false;
    IntervalSet reachable(Ival{{tau, false}, cover->hi});
    Ival window = Ival::closed(max(tau, phi.lo), phi.hi);
    IntervalSet t2 = traj.truth_set(phi.phi2);
    return !t2.intersect(reachable).intersect(window).is_empty();
}

} // namespace straloop

#endif // STRALOOP_STRL_HPP
