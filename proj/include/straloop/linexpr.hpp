// ============================================================================
// straloop/linexpr.hpp — affine expressions over named variables
// ============================================================================

#ifndef STRALOOP_LINEXPR_HPP
#define STRALOOP_LINEXPR_HPP

#include "straloop/rat.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace straloop {

// Variable identifiers are interned as plain names. "t" is the reserved
// global time variable; names starting with '$' are reserved for auxiliary
// quantified variables and are rejected by the parsers, so eliminator-
// introduced variables can never collide with user variables.
using VarId = std::string;

inline const VarId kTimeVar = "t";

inline bool is_aux_var(const VarId& v) { return !v.empty() && v[0] == '$'; }

// c1*v1 + ... + cn*vn + c0. Zero coefficients are never stored.
class LinExpr {
public:
    LinExpr() = default;
    explicit LinExpr(Rat constant) : constant_(std::move(constant)) {}

    static LinExpr var(const VarId& v, Rat coeff = Rat(1)) {
        LinExpr e;
        e.add_term(v, std::move(coeff));
        return e;
    }
    static LinExpr constant(Rat c) { return LinExpr(std::move(c)); }

    const std::map<VarId, Rat>& coeffs() const { return coeffs_; }
    const Rat& constant_term() const { return constant_; }

    Rat coeff(const VarId& v) const {
        auto it = coeffs_.find(v);
        return it == coeffs_.end() ? Rat(0) : it->second;
    }
    bool mentions(const VarId& v) const { return coeffs_.count(v) != 0; }
    bool is_constant() const { return coeffs_.empty(); }

    void add_term(const VarId& v, Rat c) {
        if (c.is_zero()) return;
        auto [it, fresh] = coeffs_.emplace(v, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) coeffs_.erase(it);
        }
    }

    LinExpr& operator+=(const LinExpr& o) {
        for (const auto& [v, c] : o.coeffs_) add_term(v, c);
        constant_ += o.constant_;
        return *this;
    }
    LinExpr& operator-=(const LinExpr& o) {
        for (const auto& [v, c] : o.coeffs_) add_term(v, -c);
        constant_ -= o.constant_;
        return *this;
    }
    LinExpr& operator*=(const Rat& k) {
        if (k.is_zero()) { coeffs_.clear(); constant_ = Rat(0); return *this; }
        for (auto& [v, c] : coeffs_) c *= k;
        constant_ *= k;
        return *this;
    }

    friend LinExpr operator+(LinExpr a, const LinExpr& b) { a += b; return a; }
    friend LinExpr operator-(LinExpr a, const LinExpr& b) { a -= b; return a; }
    friend LinExpr operator*(LinExpr a, const Rat& k) { a *= k; return a; }
    friend LinExpr operator*(const Rat& k, LinExpr a) { a *= k; return a; }
    friend LinExpr operator-(const LinExpr& a) { return a * Rat(-1); }

    friend bool operator==(const LinExpr& a, const LinExpr& b) {
        return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
    }
    friend bool operator<(const LinExpr& a, const LinExpr& b) {
        if (a.coeffs_ != b.coeffs_) return a.coeffs_ < b.coeffs_;
        return a.constant_ < b.constant_;
    }

    // Simultaneous substitution v -> map[v]. Variables absent from the map
    // are untouched. Self-referencing images (x -> x + d) are the normal
    // flow-shift use; an image referencing a *different* substituted key
    // would be order-dependent and is rejected.
    LinExpr substituted(const std::map<VarId, LinExpr>& map) const {
        LinExpr out(constant_);
        for (const auto& [v, c] : coeffs_) {
            auto it = map.find(v);
            if (it == map.end()) {
                out.add_term(v, c);
            } else {
                out += it->second * c;
            }
        }
        return out;
    }

    Rat eval(const std::map<VarId, Rat>& point) const {
        Rat r = constant_;
        for (const auto& [v, c] : coeffs_) {
            auto it = point.find(v);
            if (it == point.end())
                throw std::invalid_argument("LinExpr::eval: unbound variable " + v);
            r += c * it->second;
        }
        return r;
    }

    void collect_vars(std::set<VarId>& out) const {
        for (const auto& [v, c] : coeffs_) out.insert(v);
    }

    // Drops v and returns the remainder; v's coefficient via coeff(v).
    LinExpr without(const VarId& v) const {
        LinExpr out = *this;
        out.coeffs_.erase(v);
        return out;
    }

    // Rescales so that coefficients and constant are coprime integers.
    // The scale factor is positive, so atom relations are preserved.
    void normalize_primitive() {
        mpz_class l = 1;
        for (const auto& [v, c] : coeffs_) l = lcm(l, c.den());
        l = lcm(l, constant_.den());
        mpz_class g = 0;
        auto acc = [&](const Rat& c) {
            mpz_class n = c.num() * (l / c.den());
            g = gcd(g, n);
        };
        for (const auto& [v, c] : coeffs_) acc(c);
        acc(constant_);
        if (g == 0) return; // identically zero
        Rat scale(mpq_class(l, g));
        *this *= scale;
    }

private:
    std::map<VarId, Rat> coeffs_;
    Rat constant_{0};
};

} // namespace straloop

#endif // STRALOOP_LINEXPR_HPP
