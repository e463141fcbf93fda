// ============================================================================
// straloop/qelim.hpp — linear quantifier elimination over ordered rationals
// ============================================================================
//
// eliminate_exists projects an existential variable out of an arbitrary
// Boolean combination of affine atoms. The existential distributes over
// the disjunctive normal form, and within one conjunction the variable's
// satisfying set is a single interval, so projection is the exact
// combination of every lower bound with every upper bound; a combination
// is strict iff either side is strict, which keeps the strict faces
// produced by set differences exact through the elimination.
//
// eliminate_forall is the dual: !exists(!body).
//
// Bounds attached to a QuantBlock are conjoined into the body before
// elimination (exists delta >= 0 encodes lower = 0).
//
// ============================================================================

#ifndef STRALOOP_QELIM_HPP
#define STRALOOP_QELIM_HPP

#include "straloop/dnf.hpp"
#include "straloop/formula.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace straloop {

namespace detail {

// Projects v out of one conjunction exactly: every (lower, upper) bound
// pair combines into  r*(-d) + s*c {>=,>} 0, strict when either side is
// strict. Atoms not mentioning v pass through. Exact over the ordered
// rationals; strict faces survive via the combination rule.
inline std::optional<Conj> project_conj(const Conj& atoms, const VarId& v) {
    Conj out;
    std::vector<Atom> lowers, uppers;
    for (const auto& a : atoms) {
        Rat c = a.expr.coeff(v);
        if (c.is_zero()) push_atom(out, a);
        else if (c.sign() > 0) lowers.push_back(a);
        else uppers.push_back(a);
    }
    for (const auto& lo : lowers) {
        Rat c = lo.expr.coeff(v);
        LinExpr r = lo.expr.without(v);
        for (const auto& up : uppers) {
            Rat d = up.expr.coeff(v);
            LinExpr s = up.expr.without(v);
            Atom a(r * (-d) + s * c, (lo.strict() || up.strict()) ? Rel::Gt : Rel::Ge);
            if (a.expr.is_constant()) {
                int sg = a.expr.constant_term().sign();
                if (a.strict() ? sg <= 0 : sg < 0) return std::nullopt; // conj infeasible
            } else {
                push_atom(out, a);
            }
        }
    }
    return out;
}

} // namespace detail

// QE(exists v, body): quantifier-free projection onto the remaining
// variables, exact over the ordered rationals. The existential distributes
// over the body's disjunctive normal form, so elimination runs disjunct
// by disjunct on small conjunctions.
inline Formula eliminate_exists_raw(const VarId& v, const Formula& body) {
    if (!body.mentions(v)) return body; // vacuous quantifier
    std::vector<Formula> cases;
    for (const auto& conj : to_dnf(body)) {
        auto projected = detail::project_conj(conj, v);
        if (!projected) continue;
        std::vector<Formula> lits;
        lits.reserve(projected->size());
        for (const auto& a : *projected) lits.push_back(Formula::atom(a));
        cases.push_back(f_and(std::move(lits)));
    }
    return canonicalize(f_or(std::move(cases)));
}

enum class Quant { Exists, Forall };

// exists/forall var in [lower, upper]: body — bounds optional, conjoined
// into the body (or its negation, for forall) before elimination.
struct QuantBlock {
    Quant quantifier = Quant::Exists;
    VarId var;
    std::optional<LinExpr> lower, upper;
    Formula body;

    QuantBlock(Quant q, VarId v, std::optional<LinExpr> lo, std::optional<LinExpr> hi,
               Formula b)
        : quantifier(q), var(std::move(v)), lower(std::move(lo)), upper(std::move(hi)),
          body(std::move(b)) {
        if (lower && lower->mentions(var))
            throw std::invalid_argument("QuantBlock: variable occurs in its own lower bound");
        if (upper && upper->mentions(var))
            throw std::invalid_argument("QuantBlock: variable occurs in its own upper bound");
    }

    Formula bound_constraints() const {
        std::vector<Formula> cs;
        if (lower) cs.push_back(Formula::ge0(LinExpr::var(var) - *lower));
        if (upper) cs.push_back(Formula::ge0(*upper - LinExpr::var(var)));
        return f_and(std::move(cs));
    }
};

inline Formula eliminate_exists(const QuantBlock& blk) {
    if (blk.quantifier != Quant::Exists)
        throw std::invalid_argument("eliminate_exists: block is not existential");
    return eliminate_exists_raw(blk.var, f_and(blk.bound_constraints(), blk.body));
}

// forall v in [lo,hi]: F  ==  !(exists v: lo<=v<=hi & !F)
inline Formula eliminate_forall(const QuantBlock& blk) {
    if (blk.quantifier != Quant::Forall)
        throw std::invalid_argument("eliminate_forall: block is not universal");
    Formula inner = f_and(blk.bound_constraints(), f_not(blk.body));
    return canonicalize(f_not(eliminate_exists_raw(blk.var, inner)));
}

// Convenience wrappers used throughout the synthesis code.
inline Formula qe_exists(const VarId& v, Formula body,
                         std::optional<LinExpr> lo = std::nullopt,
                         std::optional<LinExpr> hi = std::nullopt) {
    return eliminate_exists(QuantBlock(Quant::Exists, v, std::move(lo), std::move(hi),
                                       std::move(body)));
}
inline Formula qe_forall(const VarId& v, Formula body,
                         std::optional<LinExpr> lo = std::nullopt,
                         std::optional<LinExpr> hi = std::nullopt) {
    return eliminate_forall(QuantBlock(Quant::Forall, v, std::move(lo), std::move(hi),
                                       std::move(body)));
}

} // namespace straloop

#endif // STRALOOP_QELIM_HPP
