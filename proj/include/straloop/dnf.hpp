// ============================================================================
// straloop/dnf.hpp — DNF normalization, exact feasibility, set predicates
// ============================================================================
//
// Semantic equality of formulas is defined as mutual inclusion and decided
// through  is_empty(B & !A); feasibility of a conjunction of linear atoms
// is decided by Fourier–Motzkin elimination with strict-inequality
// bookkeeping. find_point back-substitutes a rational witness, which the
// property suites use to cross-check every non-empty verdict.
//
// ============================================================================

#ifndef STRALOOP_DNF_HPP
#define STRALOOP_DNF_HPP

#include "straloop/formula.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace straloop {

using Conj = std::vector<Atom>; // implicit conjunction, sorted + deduped

namespace detail {

inline void push_atom(Conj& c, const Atom& a) {
    auto it = std::lower_bound(c.begin(), c.end(), a);
    if (it != c.end() && *it == a) return;
    c.insert(it, a);
}

// Negation-normal form with negations folded into atoms.
inline Formula to_nnf(const Formula& f, bool neg) {
    switch (f.kind()) {
        case Formula::Kind::True: return neg ? Formula::f() : Formula::t();
        case Formula::Kind::False: return neg ? Formula::t() : Formula::f();
        case Formula::Kind::Leaf:
            return Formula::atom(neg ? f.leaf().negated() : f.leaf());
        case Formula::Kind::Not: return to_nnf(f.children()[0], !neg);
        case Formula::Kind::And:
        case Formula::Kind::Or: {
            bool isAnd = (f.kind() == Formula::Kind::And) != neg;
            std::vector<Formula> ks;
            ks.reserve(f.children().size());
            for (const auto& k : f.children()) ks.push_back(to_nnf(k, neg));
            return isAnd ? f_and(std::move(ks)) : f_or(std::move(ks));
        }
    }
    return f;
}

// Constant-free residue of an atom list: returns false if some constant
// atom is violated, dropping satisfied constants.
inline bool prune_constants(Conj& c) {
    Conj out;
    for (auto& a : c) {
        if (a.expr.is_constant()) {
            int s = a.expr.constant_term().sign();
            if (a.strict() ? s <= 0 : s < 0) return false;
            continue;
        }
        out.push_back(std::move(a));
    }
    c = std::move(out);
    return true;
}

} // namespace detail

// Exact feasibility of a conjunction over the ordered rationals.
// Fourier–Motzkin; combination of two strict/nonstrict bounds is strict
// iff either input is strict.
inline bool conj_feasible(Conj atoms) {
    if (!detail::prune_constants(atoms)) return false;
    while (!atoms.empty()) {
        // eliminate the variable minimizing the lower*upper product
        std::map<VarId, std::pair<int, int>> occ; // var -> (#lower, #upper)
        for (const auto& a : atoms) {
            for (const auto& [v, c] : a.expr.coeffs()) {
                auto& e = occ[v];
                (c.sign() > 0 ? e.first : e.second)++;
            }
        }
        VarId best;
        long bestCost = -1;
        for (const auto& [v, e] : occ) {
            long cost = static_cast<long>(e.first) * e.second;
            if (bestCost < 0 || cost < bestCost) { bestCost = cost; best = v; }
        }
        std::vector<Atom> lowers, uppers, rest;
        for (auto& a : atoms) {
            Rat c = a.expr.coeff(best);
            if (c.is_zero()) rest.push_back(std::move(a));
            else if (c.sign() > 0) lowers.push_back(std::move(a));
            else uppers.push_back(std::move(a));
        }
        Conj next;
        for (auto& a : rest) detail::push_atom(next, a);
        for (const auto& lo : lowers) {
            //  lo: c v + r >= 0  (c>0)   => v >= -r/c
            //  up: d v + s >= 0  (d<0)   => v <= -s/d
            // combine: (-s/d) - (-r/c) >= 0  <=>  c*(-s) - d*(-r) ... scale-free:
            //  c*s' with signs: r*(-d) + s*c  {>=,>} 0
            Rat c = lo.expr.coeff(best);
            LinExpr r = lo.expr.without(best);
            for (const auto& up : uppers) {
                Rat d = up.expr.coeff(best);
                LinExpr s = up.expr.without(best);
                LinExpr comb = r * (-d) + s * c;
                Atom a(std::move(comb), (lo.strict() || up.strict()) ? Rel::Gt : Rel::Ge);
                if (a.expr.is_constant()) {
                    int sg = a.expr.constant_term().sign();
                    if (a.strict() ? sg <= 0 : sg < 0) return false;
                } else {
                    detail::push_atom(next, a);
                }
            }
        }
        atoms = std::move(next);
    }
    return true;
}

// Feasibility with a rational witness, via back-substitution through the
// elimination order.
inline std::optional<std::map<VarId, Rat>> conj_point(const Conj& atoms0) {
    struct Level {
        VarId var;
        std::vector<Atom> lowers, uppers; // atoms mentioning var, over later vars
    };
    Conj atoms = atoms0;
    if (!detail::prune_constants(atoms)) return std::nullopt;
    std::vector<Level> levels;
    while (!atoms.empty()) {
        std::map<VarId, std::pair<int, int>> occ;
        for (const auto& a : atoms)
            for (const auto& [v, c] : a.expr.coeffs()) {
                auto& e = occ[v];
                (c.sign() > 0 ? e.first : e.second)++;
            }
        VarId best;
        long bestCost = -1;
        for (const auto& [v, e] : occ) {
            long cost = static_cast<long>(e.first) * e.second;
            if (bestCost < 0 || cost < bestCost) { bestCost = cost; best = v; }
        }
        Level lev;
        lev.var = best;
        std::vector<Atom> rest;
        for (auto& a : atoms) {
            Rat c = a.expr.coeff(best);
            if (c.is_zero()) rest.push_back(std::move(a));
            else if (c.sign() > 0) lev.lowers.push_back(std::move(a));
            else lev.uppers.push_back(std::move(a));
        }
        Conj next;
        for (auto& a : rest) detail::push_atom(next, a);
        for (const auto& lo : lev.lowers) {
            Rat c = lo.expr.coeff(best);
            LinExpr r = lo.expr.without(best);
            for (const auto& up : lev.uppers) {
                Rat d = up.expr.coeff(best);
                LinExpr s = up.expr.without(best);
                Atom a(r * (-d) + s * c, (lo.strict() || up.strict()) ? Rel::Gt : Rel::Ge);
                if (a.expr.is_constant()) {
                    int sg = a.expr.constant_term().sign();
                    if (a.strict() ? sg <= 0 : sg < 0) return std::nullopt;
                } else {
                    detail::push_atom(next, a);
                }
            }
        }
        levels.push_back(std::move(lev));
        atoms = std::move(next);
    }
    // back-substitute, last eliminated var first
    std::map<VarId, Rat> point;
    for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
        // A variable canceled out of every lower/upper combination at this
        // level never reached a later level; the bound gap is then constant
        // in it (checked during elimination), so 0 is a valid choice.
        for (const auto* side : {&it->lowers, &it->uppers})
            for (const auto& a : *side)
                for (const auto& [v, c] : a.expr.coeffs())
                    if (v != it->var) point.emplace(v, Rat(0));
        // v >= (-r/c) for lowers, v <= (-s/d) for uppers (values now concrete)
        std::optional<Rat> lo, hi;
        bool loStrict = false, hiStrict = false;
        for (const auto& a : it->lowers) {
            Rat c = a.expr.coeff(it->var);
            Rat bound = -(a.expr.without(it->var).eval(point)) / c;
            if (!lo || bound > *lo || (bound == *lo && a.strict())) {
                if (!lo || bound > *lo) loStrict = a.strict();
                else loStrict = loStrict || a.strict();
                lo = bound;
            }
        }
        for (const auto& a : it->uppers) {
            Rat d = a.expr.coeff(it->var);
            Rat bound = -(a.expr.without(it->var).eval(point)) / d;
            if (!hi || bound < *hi || (bound == *hi && a.strict())) {
                if (!hi || bound < *hi) hiStrict = a.strict();
                else hiStrict = hiStrict || a.strict();
                hi = bound;
            }
        }
        Rat val(0);
        if (lo && hi) {
            if (*lo > *hi) return std::nullopt;
            if (*lo == *hi) {
                if (loStrict || hiStrict) return std::nullopt;
                val = *lo;
            } else {
                val = (*lo + *hi) / Rat(2);
            }
        } else if (lo) {
            val = loStrict ? *lo + Rat(1) : *lo;
        } else if (hi) {
            val = hiStrict ? *hi - Rat(1) : *hi;
        }
        point[it->var] = val;
    }
    return point;
}

// DNF conversion with infeasible-branch pruning along the way.
inline std::vector<Conj> to_dnf(const Formula& f0) {
    Formula f = detail::to_nnf(f0, false);
    std::vector<Conj> out;
    struct Rec {
        std::vector<Conj>& out;
        void walk(const Formula& g, Conj cur) {
            switch (g.kind()) {
                case Formula::Kind::True:
                    out.push_back(std::move(cur));
                    return;
                case Formula::Kind::False:
                    return;
                case Formula::Kind::Leaf: {
                    detail::push_atom(cur, g.leaf());
                    out.push_back(std::move(cur));
                    return;
                }
                case Formula::Kind::And: {
                    // fold atom children first, recurse into the rest
                    std::vector<const Formula*> complex;
                    for (const auto& k : g.children()) {
                        if (k.kind() == Formula::Kind::Leaf) detail::push_atom(cur, k.leaf());
                        else complex.push_back(&k);
                    }
                    expand_and(complex, 0, std::move(cur));
                    return;
                }
                case Formula::Kind::Or:
                    for (const auto& k : g.children()) walk(k, cur);
                    return;
                case Formula::Kind::Not:
                    throw std::logic_error("to_dnf: NOT survived NNF");
            }
        }
        void expand_and(const std::vector<const Formula*>& ks, size_t i, Conj cur) {
            if (i == ks.size()) {
                out.push_back(std::move(cur));
                return;
            }
            const Formula& g = *ks[i];
            if (g.kind() == Formula::Kind::Or) {
                for (const auto& alt : g.children()) {
                    Conj branch = cur;
                    if (alt.kind() == Formula::Kind::Leaf) {
                        detail::push_atom(branch, alt.leaf());
                        if (!conj_feasible(branch)) continue;
                        expand_and(ks, i + 1, std::move(branch));
                    } else {
                        // alt is an AND (or atom handled above); splice it in
                        std::vector<Conj> sub;
                        Rec{sub}.walk(alt, std::move(branch));
                        for (auto& c : sub) {
                            if (!conj_feasible(c)) continue;
                            expand_and(ks, i + 1, std::move(c));
                        }
                    }
                }
            } else { // nested AND
                std::vector<Conj> sub;
                Rec{sub}.walk(g, std::move(cur));
                for (auto& c : sub) {
                    if (!conj_feasible(c)) continue;
                    expand_and(ks, i + 1, std::move(c));
                }
            }
        }
    };
    Rec{out}.walk(f, {});
    return out;
}

namespace detail {

// Drop atoms implied by the rest of the conjunction: a is redundant when
// (C \ {a}) & !a is infeasible.
inline void remove_redundant_atoms(Conj& c) {
    for (size_t i = 0; i < c.size();) {
        Conj rest;
        rest.reserve(c.size());
        for (size_t j = 0; j < c.size(); ++j)
            if (j != i) rest.push_back(c[j]);
        Conj test = rest;
        push_atom(test, c[i].negated());
        if (!conj_feasible(test)) {
            c = std::move(rest);
        } else {
            ++i;
        }
    }
}

// Does every point of a satisfy b? (conjunctions)
inline bool conj_implies(const Conj& a, const Conj& b) {
    for (const auto& atom : b) {
        Conj test = a;
        push_atom(test, atom.negated());
        if (conj_feasible(test)) return false;
    }
    return true;
}

// Exact pairwise merge: when the conjunction of every atom (drawn from
// either side) that already contains both disjuncts equals their union,
// the pair collapses to that hull. Turns (0<=h<=1) | (1<h<=2) into
// 0<=h<=2.
inline bool try_merge(const Conj& a, const Conj& b, Conj& out) {
    Conj hull;
    for (const Conj* side : {&a, &b}) {
        for (const auto& atom : *side) {
            // atom includes a conjunction iff conj & !atom is infeasible
            Conj t1 = a;
            push_atom(t1, atom.negated());
            if (conj_feasible(t1)) continue;
            Conj t2 = b;
            push_atom(t2, atom.negated());
            if (conj_feasible(t2)) continue;
            push_atom(hull, atom);
        }
    }
    // hull covers both by construction; equality needs hull => a or b
    // pointwise: hull & !a & !b must be infeasible
    std::vector<Conj> residue{hull};
    for (const Conj* side : {&a, &b}) {
        std::vector<Conj> next;
        for (const auto& part : residue) {
            for (const auto& atom : *side) {
                Conj c = part;
                push_atom(c, atom.negated());
                if (conj_feasible(c)) next.push_back(std::move(c));
            }
        }
        residue = std::move(next);
        if (residue.empty()) break;
    }
    if (!residue.empty()) return false;
    out = std::move(hull);
    return true;
}

} // namespace detail

// Canonical form: feasible, redundancy-free DNF with subsumed disjuncts
// removed. Exact; the satisfying set is unchanged. The quadratic semantic
// passes (subsumption, hull merging) only run below a size threshold; a
// cheap syntactic superset check always runs first.
inline Formula canonicalize(const Formula& f) {
    std::vector<Conj> dnf = to_dnf(f);
    std::vector<Conj> feas;
    for (auto& c : dnf) {
        if (!conj_feasible(c)) continue;
        detail::remove_redundant_atoms(c);
        if (c.empty()) return Formula::t();
        feas.push_back(std::move(c));
    }
    if (feas.empty()) return Formula::f();
    std::sort(feas.begin(), feas.end());
    feas.erase(std::unique(feas.begin(), feas.end()), feas.end());
    // syntactic subsumption: a superset of atoms describes a subset
    {
        std::vector<bool> dead(feas.size(), false);
        for (size_t i = 0; i < feas.size(); ++i) {
            if (dead[i]) continue;
            for (size_t j = 0; j < feas.size(); ++j) {
                if (i == j || dead[j] || feas[j].size() > feas[i].size()) continue;
                if (i != j && std::includes(feas[i].begin(), feas[i].end(), feas[j].begin(),
                                            feas[j].end()) &&
                    feas[i].size() > feas[j].size()) {
                    dead[i] = true;
                    break;
                }
            }
        }
        std::vector<Conj> alive;
        for (size_t i = 0; i < feas.size(); ++i)
            if (!dead[i]) alive.push_back(std::move(feas[i]));
        feas = std::move(alive);
    }
    constexpr size_t kSemanticCap = 64;
    // semantic subsumption: drop c_i if it implies some other disjunct
    std::vector<bool> dead(feas.size(), false);
    if (feas.size() <= kSemanticCap) {
        for (size_t i = 0; i < feas.size(); ++i) {
            if (dead[i]) continue;
            for (size_t j = 0; j < feas.size(); ++j) {
                if (i == j || dead[j]) continue;
                if (detail::conj_implies(feas[i], feas[j])) { dead[i] = true; break; }
            }
        }
    }
    std::vector<Conj> kept;
    for (size_t i = 0; i < feas.size(); ++i)
        if (!dead[i]) kept.push_back(std::move(feas[i]));
    // pairwise hull merging until stable
    bool merged = kept.size() <= kSemanticCap;
    while (merged && kept.size() > 1) {
        merged = false;
        for (size_t i = 0; i < kept.size() && !merged; ++i) {
            for (size_t j = i + 1; j < kept.size() && !merged; ++j) {
                Conj hull;
                if (detail::try_merge(kept[i], kept[j], hull)) {
                    detail::remove_redundant_atoms(hull);
                    if (hull.empty()) return Formula::t();
                    kept.erase(kept.begin() + static_cast<long>(j));
                    kept[i] = std::move(hull);
                    merged = true;
                }
            }
        }
    }
    std::sort(kept.begin(), kept.end());
    std::vector<Formula> disj;
    for (const auto& c : kept) {
        std::vector<Formula> lits;
        lits.reserve(c.size());
        for (const auto& a : c) lits.push_back(Formula::atom(a));
        disj.push_back(f_and(std::move(lits)));
    }
    return f_or(std::move(disj));
}

// True iff no rational assignment satisfies f.
inline bool is_empty(const Formula& f) {
    for (const auto& c : to_dnf(f))
        if (conj_feasible(c)) return false;
    return true;
}

// A witness point when f is satisfiable.
inline std::optional<std::map<VarId, Rat>> find_point(const Formula& f) {
    for (const auto& c : to_dnf(f)) {
        auto p = conj_point(c);
        if (p) return p;
    }
    return std::nullopt;
}

// B => A, i.e. the satisfying set of A includes that of B.
inline bool includes(const Formula& a, const Formula& b) {
    return is_empty(f_and(b, f_not(a)));
}

inline bool equivalent(const Formula& a, const Formula& b) {
    return includes(a, b) && includes(b, a);
}

} // namespace straloop

#endif // STRALOOP_DNF_HPP
