// ============================================================================
// straloop/formula.hpp — quantifier-free linear formulas over the rationals
// ============================================================================
//
// QFFormula is the universal currency of the toolkit: state-time sets,
// initial sets, guards and domains are all values of this type. Nodes are
// immutable and shared, so formulas are cheap to copy and safe to read
// from any thread.
//
// Atoms are kept in the two normal forms  e >= 0  and  e > 0; every other
// comparison is rewritten into these at construction time. Negation of an
// atom stays an atom:  !(e >= 0) == (-e > 0).
//
// ============================================================================

#ifndef STRALOOP_FORMULA_HPP
#define STRALOOP_FORMULA_HPP

#include "straloop/linexpr.hpp"

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace straloop {

enum class Rel { Ge, Gt }; // e >= 0, e > 0

struct Atom {
    LinExpr expr;
    Rel rel = Rel::Ge;

    Atom() = default;
    Atom(LinExpr e, Rel r) : expr(std::move(e)), rel(r) { expr.normalize_primitive(); }

    bool strict() const { return rel == Rel::Gt; }

    Atom negated() const { return Atom(-expr, strict() ? Rel::Ge : Rel::Gt); }

    bool eval(const std::map<VarId, Rat>& point) const {
        Rat v = expr.eval(point);
        return strict() ? v.sign() > 0 : v.sign() >= 0;
    }

    friend bool operator==(const Atom& a, const Atom& b) {
        return a.rel == b.rel && a.expr == b.expr;
    }
    friend bool operator<(const Atom& a, const Atom& b) {
        if (!(a.expr == b.expr)) return a.expr < b.expr;
        return a.rel < b.rel;
    }
};

class Formula {
public:
    enum class Kind { True, False, Leaf, And, Or, Not };

    Formula() : Formula(make(Kind::True)) {}

    static Formula t() { return Formula(make(Kind::True)); }
    static Formula f() { return Formula(make(Kind::False)); }
    static Formula atom(Atom a) {
        // A constant atom decides itself.
        if (a.expr.is_constant()) {
            int s = a.expr.constant_term().sign();
            bool val = a.strict() ? s > 0 : s >= 0;
            return val ? t() : f();
        }
        auto n = make(Kind::Leaf);
        n->atom = std::move(a);
        return Formula(std::move(n));
    }
    // e >= 0 / e > 0 shorthands
    static Formula ge0(LinExpr e) { return atom(Atom(std::move(e), Rel::Ge)); }
    static Formula gt0(LinExpr e) { return atom(Atom(std::move(e), Rel::Gt)); }

    Kind kind() const { return n_->kind; }
    bool is_true() const { return kind() == Kind::True; }
    bool is_false() const { return kind() == Kind::False; }
    const Atom& leaf() const { return n_->atom; }
    const std::vector<Formula>& children() const { return n_->kids; }

    bool eval(const std::map<VarId, Rat>& point) const {
        switch (kind()) {
            case Kind::True: return true;
            case Kind::False: return false;
            case Kind::Leaf: return n_->atom.eval(point);
            case Kind::Not: return !n_->kids[0].eval(point);
            case Kind::And:
                for (const auto& k : n_->kids) if (!k.eval(point)) return false;
                return true;
            case Kind::Or:
                for (const auto& k : n_->kids) if (k.eval(point)) return true;
                return false;
        }
        return false;
    }

    void collect_vars(std::set<VarId>& out) const {
        switch (kind()) {
            case Kind::Leaf: n_->atom.expr.collect_vars(out); break;
            case Kind::Not:
            case Kind::And:
            case Kind::Or:
                for (const auto& k : n_->kids) k.collect_vars(out);
                break;
            default: break;
        }
    }
    std::set<VarId> vars() const {
        std::set<VarId> s;
        collect_vars(s);
        return s;
    }
    bool mentions(const VarId& v) const { return vars().count(v) != 0; }

    // Structural equality (cheap; semantic equality lives in dnf.hpp).
    bool same_shape(const Formula& o) const {
        if (n_ == o.n_) return true;
        if (kind() != o.kind()) return false;
        if (kind() == Kind::Leaf) return n_->atom == o.n_->atom;
        if (n_->kids.size() != o.n_->kids.size()) return false;
        for (size_t i = 0; i < n_->kids.size(); ++i)
            if (!n_->kids[i].same_shape(o.n_->kids[i])) return false;
        return true;
    }

private:
    struct Node {
        Kind kind;
        Atom atom;
        std::vector<Formula> kids;
    };
    using NodePtr = std::shared_ptr<const Node>;

    explicit Formula(NodePtr n) : n_(std::move(n)) {}
    static std::shared_ptr<Node> make(Kind k) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        return n;
    }

    friend Formula f_and(std::vector<Formula> kids);
    friend Formula f_or(std::vector<Formula> kids);
    friend Formula f_not(Formula f);

    NodePtr n_;
};

inline Formula f_and(std::vector<Formula> kids) {
    std::vector<Formula> flat;
    for (auto& k : kids) {
        if (k.is_false()) return Formula::f();
        if (k.is_true()) continue;
        if (k.kind() == Formula::Kind::And) {
            for (const auto& g : k.children()) flat.push_back(g);
        } else {
            flat.push_back(std::move(k));
        }
    }
    if (flat.empty()) return Formula::t();
    if (flat.size() == 1) return flat[0];
    auto n = Formula::make(Formula::Kind::And);
    n->kids = std::move(flat);
    return Formula(std::move(n));
}

inline Formula f_or(std::vector<Formula> kids) {
    std::vector<Formula> flat;
    for (auto& k : kids) {
        if (k.is_true()) return Formula::t();
        if (k.is_false()) continue;
        if (k.kind() == Formula::Kind::Or) {
            for (const auto& g : k.children()) flat.push_back(g);
        } else {
            flat.push_back(std::move(k));
        }
    }
    if (flat.empty()) return Formula::f();
    if (flat.size() == 1) return flat[0];
    auto n = Formula::make(Formula::Kind::Or);
    n->kids = std::move(flat);
    return Formula(std::move(n));
}

inline Formula f_not(Formula f) {
    switch (f.kind()) {
        case Formula::Kind::True: return Formula::f();
        case Formula::Kind::False: return Formula::t();
        case Formula::Kind::Leaf: return Formula::atom(f.leaf().negated());
        case Formula::Kind::Not: return f.children()[0];
        default: break;
    }
    auto n = Formula::make(Formula::Kind::Not);
    n->kids = {std::move(f)};
    return Formula(std::move(n));
}

inline Formula f_and(Formula a, Formula b) { return f_and(std::vector<Formula>{std::move(a), std::move(b)}); }
inline Formula f_or(Formula a, Formula b) { return f_or(std::vector<Formula>{std::move(a), std::move(b)}); }
inline Formula f_diff(Formula a, Formula b) { return f_and(std::move(a), f_not(std::move(b))); }

enum class SetOp { And, Or, Not, Diff };

// The exact Boolean combination of satisfying sets; DIFF(A,B) = AND(A, !B).
inline Formula combine(SetOp op, std::vector<Formula> operands) {
    switch (op) {
        case SetOp::And: return f_and(std::move(operands));
        case SetOp::Or: return f_or(std::move(operands));
        case SetOp::Not:
            if (operands.size() != 1)
                throw std::invalid_argument("combine(NOT): exactly one operand expected");
            return f_not(std::move(operands[0]));
        case SetOp::Diff:
            if (operands.size() != 2)
                throw std::invalid_argument("combine(DIFF): exactly two operands expected");
            return f_diff(std::move(operands[0]), std::move(operands[1]));
    }
    throw std::logic_error("combine: bad op");
}

// Simultaneous affine substitution over every atom; formula shape is kept.
// Chained renames (an image mentioning a different substituted key) are
// rejected, because simultaneous and sequential readings then diverge.
inline Formula substitute_affine(const Formula& f, const std::map<VarId, LinExpr>& map) {
    for (const auto& [key, image] : map) {
        for (const auto& [v, c] : image.coeffs()) {
            if (v != key && map.count(v))
                throw std::invalid_argument(
                    "substitute_affine: cyclic substitution through variable " + v);
        }
    }
    struct Walk {
        const std::map<VarId, LinExpr>& m;
        Formula operator()(const Formula& g) const {
            switch (g.kind()) {
                case Formula::Kind::True:
                case Formula::Kind::False: return g;
                case Formula::Kind::Leaf:
                    return Formula::atom(Atom(g.leaf().expr.substituted(m), g.leaf().rel));
                case Formula::Kind::Not: return f_not((*this)(g.children()[0]));
                case Formula::Kind::And: {
                    std::vector<Formula> ks;
                    ks.reserve(g.children().size());
                    for (const auto& k : g.children()) ks.push_back((*this)(k));
                    return f_and(std::move(ks));
                }
                case Formula::Kind::Or: {
                    std::vector<Formula> ks;
                    ks.reserve(g.children().size());
                    for (const auto& k : g.children()) ks.push_back((*this)(k));
                    return f_or(std::move(ks));
                }
            }
            return g;
        }
    };
    return Walk{map}(f);
}

inline Formula substitute_var(const Formula& f, const VarId& v, const LinExpr& image) {
    return substitute_affine(f, {{v, image}});
}

} // namespace straloop

#endif // STRALOOP_FORMULA_HPP
