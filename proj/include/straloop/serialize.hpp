// ============================================================================
// straloop/serialize.hpp — canonical and comparison-style formula rendering
// ============================================================================
//
// Two renderings share one grammar:
//
//   canonical_string:  atoms exactly as  <linexpr> (>=|>) 0  with rationals
//                      as p/q — the machine format of sets.txt/init.txt,
//                      bit-exact under round-trip;
//   pretty_string:     atoms as comparisons with the constant moved to the
//                      right-hand side (h >= 4, h - t > 1/2) — the format
//                      used inside model/automaton files.
//
// Both parse back with parse_formula (parse.hpp).
//
// ============================================================================

#ifndef STRALOOP_SERIALIZE_HPP
#define STRALOOP_SERIALIZE_HPP

#include "straloop/dnf.hpp"
#include "straloop/formula.hpp"

#include <sstream>
#include <string>

namespace straloop {

namespace detail {

inline std::string linexpr_canonical(const LinExpr& e) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [v, c] : e.coeffs()) {
        if (!first) os << " + ";
        os << c.str() << "*" << v;
        first = false;
    }
    if (first) {
        os << e.constant_term().str();
    } else if (!e.constant_term().is_zero()) {
        os << " + " << e.constant_term().str();
    }
    return os.str();
}

inline std::string atom_canonical(const Atom& a) {
    return linexpr_canonical(a.expr) + (a.strict() ? " > 0" : " >= 0");
}

// h - t >= 4 style: variables left, constant right; leading coefficient
// negative flips the relation, and the expression is scaled so the leading
// coefficient is 1 (bounds read as h >= 5/2, not 2*h >= 5).
inline std::string atom_pretty(const Atom& a) {
    LinExpr e = a.expr;
    bool flip = false;
    if (!e.coeffs().empty() && e.coeffs().begin()->second.sign() < 0) {
        e *= Rat(-1);
        flip = true;
    }
    if (!e.coeffs().empty()) {
        Rat lead = e.coeffs().begin()->second;
        if (lead != Rat(1)) e *= Rat(1) / lead;
    }
    std::ostringstream os;
    bool first = true;
    for (const auto& [v, c] : e.coeffs()) {
        if (first) {
            if (c == Rat(1)) os << v;
            else if (c == Rat(-1)) os << "-" << v;
            else os << c.str() << "*" << v;
            first = false;
            continue;
        }
        if (c.sign() < 0) {
            os << " - ";
            if (-c == Rat(1)) os << v;
            else os << (-c).str() << "*" << v;
        } else {
            os << " + ";
            if (c == Rat(1)) os << v;
            else os << c.str() << "*" << v;
        }
    }
    Rat rhs = -e.constant_term();
    if (first) { // constant atom (shouldn't survive Formula::atom, but be total)
        os << e.constant_term().str();
        rhs = Rat(0);
    }
    if (flip) os << (a.strict() ? " < " : " <= ");
    else os << (a.strict() ? " > " : " >= ");
    os << rhs.str();
    return os.str();
}

enum class StringStyle { Canonical, Pretty };

inline std::string formula_string(const Formula& f, StringStyle style, int prec = 0);

inline std::string nary_string(const Formula& f, StringStyle style, const char* sep,
                               int myPrec, int prec) {
    std::ostringstream os;
    bool first = true;
    for (const auto& k : f.children()) {
        if (!first) os << sep;
        os << formula_string(k, style, myPrec);
        first = false;
    }
    std::string s = os.str();
    if (myPrec < prec) return "(" + s + ")";
    return s;
}

inline std::string formula_string(const Formula& f, StringStyle style, int prec) {
    switch (f.kind()) {
        case Formula::Kind::True: return "true";
        case Formula::Kind::False: return "false";
        case Formula::Kind::Leaf: {
            std::string s = style == StringStyle::Canonical ? atom_canonical(f.leaf())
                                                            : atom_pretty(f.leaf());
            if (prec >= 3) return "(" + s + ")";
            return s;
        }
        case Formula::Kind::Or: return nary_string(f, style, " | ", 1, prec);
        case Formula::Kind::And: return nary_string(f, style, " & ", 2, prec);
        case Formula::Kind::Not:
            return "!" + formula_string(f.children()[0], style, 3);
    }
    return "";
}

// Atom display order inside a conjunction: lower-bound-like atoms
// (positive leading coefficient) before upper-bound-like, then by
// expression. This is what makes a point guard print as
// "h >= 4 & h <= 4" rather than the reverse.
inline bool atom_display_less(const Atom& a, const Atom& b) {
    auto lead = [](const Atom& x) {
        return x.expr.coeffs().empty() ? 0 : x.expr.coeffs().begin()->second.sign();
    };
    int la = lead(a), lb = lead(b);
    if (la != lb) return la > lb;
    return a < b;
}

} // namespace detail

// Canonical text: the satisfying set re-parses bit-exactly.
inline std::string canonical_string(const Formula& f) {
    Formula c = canonicalize(f);
    if (c.is_true()) return "true";
    if (c.is_false()) return "false";
    std::vector<Conj> dnf = to_dnf(c);
    for (auto& conj : dnf) std::sort(conj.begin(), conj.end(), detail::atom_display_less);
    std::sort(dnf.begin(), dnf.end());
    std::ostringstream os;
    bool firstDisj = true;
    for (const auto& conj : dnf) {
        if (!firstDisj) os << " | ";
        std::ostringstream cs;
        bool firstAtom = true;
        for (const auto& a : conj) {
            if (!firstAtom) cs << " & ";
            cs << detail::atom_canonical(a);
            firstAtom = false;
        }
        if (dnf.size() > 1 && conj.size() > 1) os << "(" << cs.str() << ")";
        else os << cs.str();
        firstDisj = false;
    }
    return os.str();
}

// Human-facing comparison style over the canonical DNF.
inline std::string pretty_string(const Formula& f) {
    Formula c = canonicalize(f);
    if (c.is_true()) return "true";
    if (c.is_false()) return "false";
    std::vector<Conj> dnf = to_dnf(c);
    for (auto& conj : dnf) std::sort(conj.begin(), conj.end(), detail::atom_display_less);
    std::sort(dnf.begin(), dnf.end());
    std::ostringstream os;
    bool firstDisj = true;
    for (const auto& conj : dnf) {
        if (!firstDisj) os << " | ";
        std::ostringstream cs;
        bool firstAtom = true;
        for (const auto& a : conj) {
            if (!firstAtom) cs << " & ";
            cs << detail::atom_pretty(a);
            firstAtom = false;
        }
        if (dnf.size() > 1 && conj.size() > 1) os << "(" << cs.str() << ")";
        else os << cs.str();
        firstDisj = false;
    }
    return os.str();
}

} // namespace straloop

#endif // STRALOOP_SERIALIZE_HPP
