// ============================================================================
// straloop/rat.hpp — exact rational scalars
// ============================================================================
//
// Arbitrary-precision rationals backing every numeric constant in the
// toolkit. Values are always in lowest terms with a positive denominator;
// there is no floating-point path anywhere in the core.
//
// ============================================================================

#ifndef STRALOOP_RAT_HPP
#define STRALOOP_RAT_HPP

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace straloop {

class Rat {
public:
    Rat() : v_(0) {}
    Rat(long n) : v_(static_cast<long>(n)) {}
    Rat(long num, long den) : v_(num, den) {
        if (den == 0) throw std::domain_error("Rat: zero denominator");
        v_.canonicalize();
    }
    explicit Rat(mpq_class q) : v_(std::move(q)) { v_.canonicalize(); }

    static Rat from_int(long n) { return Rat(n); }

    // Accepts "p", "p/q" and finite decimal literals ("2.5", "-0.125").
    // Every finite decimal is an exact rational; there is no rounding.
    static Rat parse(std::string_view s);
    static std::optional<Rat> try_parse(std::string_view s);

    const mpq_class& raw() const { return v_; }
    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    Rat operator-() const { return Rat(mpq_class(-v_)); }
    Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
    Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
    Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
    Rat& operator/=(const Rat& o) {
        if (o.is_zero()) throw std::domain_error("Rat: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rat operator+(Rat a, const Rat& b) { a += b; return a; }
    friend Rat operator-(Rat a, const Rat& b) { a -= b; return a; }
    friend Rat operator*(Rat a, const Rat& b) { a *= b; return a; }
    friend Rat operator/(Rat a, const Rat& b) { a /= b; return a; }

    friend bool operator==(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) == 0; }
    friend bool operator!=(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) != 0; }
    friend bool operator<(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) < 0; }
    friend bool operator<=(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) <= 0; }
    friend bool operator>(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) > 0; }
    friend bool operator>=(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) >= 0; }

    Rat abs() const { return sign() < 0 ? -*this : *this; }

    // Canonical rendering: "p" when integral, "p/q" otherwise.
    std::string str() const {
        if (is_integer()) return v_.get_num().get_str();
        return v_.get_num().get_str() + "/" + v_.get_den().get_str();
    }

    double approx() const { return v_.get_d(); }

private:
    mpq_class v_;
};

inline Rat min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

inline std::optional<Rat> Rat::try_parse(std::string_view s) {
    if (s.empty()) return std::nullopt;
    bool neg = false;
    size_t i = 0;
    if (s[i] == '+' || s[i] == '-') { neg = (s[i] == '-'); ++i; }
    if (i >= s.size()) return std::nullopt;

    std::string intpart, fracpart, denpart;
    std::string* cur = &intpart;
    bool sawSlash = false, sawDot = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c >= '0' && c <= '9') { cur->push_back(c); continue; }
        if (c == '/' && !sawSlash && !sawDot) { sawSlash = true; cur = &denpart; continue; }
        if (c == '.' && !sawDot && !sawSlash) { sawDot = true; cur = &fracpart; continue; }
        return std::nullopt;
    }
    if (intpart.empty() && fracpart.empty()) return std::nullopt;
    mpq_class q;
    if (sawSlash) {
        if (denpart.empty() || intpart.empty()) return std::nullopt;
        mpz_class den(denpart);
        if (den == 0) return std::nullopt;
        q = mpq_class(mpz_class(intpart), den);
    } else if (sawDot) {
        mpz_class scale = 1;
        for (size_t k = 0; k < fracpart.size(); ++k) scale *= 10;
        mpz_class whole = intpart.empty() ? mpz_class(0) : mpz_class(intpart);
        mpz_class frac = fracpart.empty() ? mpz_class(0) : mpz_class(fracpart);
        q = mpq_class(whole * scale + frac, scale);
    } else {
        q = mpq_class(mpz_class(intpart));
    }
    q.canonicalize();
    if (neg) q = -q;
    return Rat(q);
}

inline Rat Rat::parse(std::string_view s) {
    auto r = try_parse(s);
    if (!r) throw std::invalid_argument("Rat: cannot parse '" + std::string(s) + "'");
    return *r;
}

} // namespace straloop

#endif // STRALOOP_RAT_HPP
