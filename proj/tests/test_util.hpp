// Shared helpers for the unit suites: seeded random formula/trajectory
// generators and small grids. Everything is deterministic per seed.

#ifndef STRALOOP_TEST_UTIL_HPP
#define STRALOOP_TEST_UTIL_HPP

#include "straloop/formula.hpp"
#include "straloop/strl.hpp"

#include <random>
#include <vector>

namespace testutil {

using namespace straloop;

struct Rng {
    std::mt19937_64 g;
    explicit Rng(uint64_t seed) : g(seed) {}
    int range(int lo, int hi) { // inclusive
        return std::uniform_int_distribution<int>(lo, hi)(g);
    }
    Rat rat(int numLo, int numHi, int maxDen) {
        int den = range(1, maxDen);
        return Rat(range(numLo, numHi), den);
    }
};

inline LinExpr random_linexpr(Rng& rng, const std::vector<VarId>& vars, int coeffAbs,
                              int maxDen) {
    LinExpr e;
    bool any = false;
    for (const auto& v : vars) {
        int c = rng.range(-coeffAbs, coeffAbs);
        if (c != 0) {
            e.add_term(v, Rat(c, rng.range(1, maxDen)));
            any = true;
        }
    }
    if (!any) e.add_term(vars[static_cast<size_t>(rng.range(0, int(vars.size()) - 1))], Rat(1));
    e += LinExpr::constant(rng.rat(-8, 8, maxDen));
    return e;
}

inline Formula random_formula(Rng& rng, const std::vector<VarId>& vars, int depth,
                              int coeffAbs = 2, int maxDen = 2) {
    if (depth <= 0 || rng.range(0, 3) == 0) {
        Atom a(random_linexpr(rng, vars, coeffAbs, maxDen),
               rng.range(0, 1) ? Rel::Ge : Rel::Gt);
        return Formula::atom(a);
    }
    switch (rng.range(0, 3)) {
        case 0:
            return f_and(random_formula(rng, vars, depth - 1, coeffAbs, maxDen),
                         random_formula(rng, vars, depth - 1, coeffAbs, maxDen));
        case 1:
            return f_or(random_formula(rng, vars, depth - 1, coeffAbs, maxDen),
                        random_formula(rng, vars, depth - 1, coeffAbs, maxDen));
        case 2:
            return f_not(random_formula(rng, vars, depth - 1, coeffAbs, maxDen));
        default: {
            Atom a(random_linexpr(rng, vars, coeffAbs, maxDen),
                   rng.range(0, 1) ? Rel::Ge : Rel::Gt);
            return Formula::atom(a);
        }
    }
}

// Exact one-variable quantifier check: with all free variables fixed, the
// body is piecewise-constant between the atom roots, so testing the roots,
// the midpoints between them and points beyond the extremes decides the
// existential exactly.
inline bool oracle_exists_1d(const Formula& body, const VarId& v,
                             std::map<VarId, Rat> freePoint) {
    std::vector<Rat> roots;
    std::set<Atom> atoms;
    struct Walk {
        std::set<Atom>& out;
        void operator()(const Formula& g) const {
            if (g.kind() == Formula::Kind::Leaf) out.insert(g.leaf());
            else
                for (const auto& k : g.children()) (*this)(k);
        }
    };
    Walk{atoms}(body);
    for (const auto& a : atoms) {
        Rat c = a.expr.coeff(v);
        if (c.is_zero()) continue;
        Rat rest = a.expr.without(v).eval(freePoint);
        roots.push_back(-rest / c);
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    std::vector<Rat> cands;
    if (roots.empty()) {
        cands.push_back(Rat(0));
    } else {
        cands.push_back(roots.front() - Rat(1));
        for (size_t i = 0; i < roots.size(); ++i) {
            cands.push_back(roots[i]);
            if (i + 1 < roots.size()) cands.push_back((roots[i] + roots[i + 1]) / Rat(2));
        }
        cands.push_back(roots.back() + Rat(1));
    }
    for (const auto& c : cands) {
        freePoint[v] = c;
        if (body.eval(freePoint)) return true;
    }
    return false;
}

// all rationals k*step in [lo, hi]
inline std::vector<Rat> grid(const Rat& lo, const Rat& hi, const Rat& step) {
    std::vector<Rat> out;
    for (Rat v = lo; v <= hi; v += step) out.push_back(v);
    return out;
}

// random piecewise-linear trajectory over the given variables
inline PwlTrajectory random_trajectory(Rng& rng, const std::vector<VarId>& names,
                                       const Rat& horizon) {
    int nseg = rng.range(1, 4);
    std::vector<TrajSegment> segs;
    Rat t0(0);
    std::vector<Rat> x;
    for (const auto& n : names) {
        (void)n;
        x.push_back(rng.rat(-8, 8, 2));
    }
    for (int i = 0; i < nseg; ++i) {
        TrajSegment s;
        s.t0 = t0;
        s.x0 = x;
        for (size_t k = 0; k < names.size(); ++k) s.rate.push_back(rng.rat(-4, 4, 2));
        Rat dur = (i == nseg - 1) ? horizon - t0
                                  : min(Rat(rng.range(1, 4), rng.range(1, 2)), horizon - t0);
        if (dur.sign() <= 0) dur = horizon - t0;
        s.t1 = t0 + dur;
        for (size_t k = 0; k < names.size(); ++k)
            x[k] = s.x0[k] + (s.t1 - s.t0) * s.rate[k];
        t0 = s.t1;
        segs.push_back(std::move(s));
        if (t0 >= horizon) break;
    }
    if (segs.back().t1 < horizon) segs.back().t1 = horizon;
    return PwlTrajectory(std::vector<VarId>(names), std::move(segs));
}

} // namespace testutil

#endif
