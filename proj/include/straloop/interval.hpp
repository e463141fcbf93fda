// ============================================================================
// straloop/interval.hpp — exact one-dimensional interval sets
// ============================================================================
//
// Finite unions of rational intervals with open/closed ends, used for the
// time axis: satisfaction intervals of formulas along a trajectory, switch
// windows, guard/domain enablement. All operations are exact.
//
// ============================================================================

#ifndef STRALOOP_INTERVAL_HPP
#define STRALOOP_INTERVAL_HPP

#include "straloop/formula.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace straloop {

struct Endpoint {
    std::optional<Rat> v; // nullopt = infinite on that side
    bool open = false;
};

struct Ival {
    Endpoint lo, hi; // lo.v == nullopt means -inf; hi.v == nullopt means +inf

    bool empty() const {
        if (!lo.v || !hi.v) return false;
        if (*lo.v < *hi.v) return false;
        if (*lo.v > *hi.v) return true;
        return lo.open || hi.open;
    }
    bool contains(const Rat& x) const {
        if (lo.v) {
            if (x < *lo.v) return false;
            if (x == *lo.v && lo.open) return false;
        }
        if (hi.v) {
            if (x > *hi.v) return false;
            if (x == *hi.v && hi.open) return false;
        }
        return true;
    }

    static Ival all() { return {}; }
    static Ival closed(Rat a, Rat b) { return {{a, false}, {b, false}}; }
    static Ival point(Rat a) { return closed(a, a); }
    static Ival at_least(Rat a, bool open = false) { return {{a, open}, {std::nullopt, false}}; }
    static Ival at_most(Rat a, bool open = false) { return {{std::nullopt, false}, {a, open}}; }
};

namespace detail {

// lower-endpoint order: -inf first; at equal values closed before open
inline bool lo_less(const Endpoint& a, const Endpoint& b) {
    if (!a.v) return b.v.has_value();
    if (!b.v) return false;
    if (*a.v != *b.v) return *a.v < *b.v;
    return !a.open && b.open;
}
// tighter-of upper endpoints: +inf loosest; at equal values open tighter
inline bool hi_less(const Endpoint& a, const Endpoint& b) {
    if (!a.v) return false;
    if (!b.v) return true;
    if (*a.v != *b.v) return *a.v < *b.v;
    return a.open && !b.open;
}

} // namespace detail

class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(Ival i) {
        if (!i.empty()) ivals_.push_back(std::move(i));
    }

    static IntervalSet empty() { return IntervalSet(); }
    static IntervalSet all() { return IntervalSet(Ival::all()); }

    const std::vector<Ival>& intervals() const { return ivals_; }
    bool is_empty() const { return ivals_.empty(); }

    bool contains(const Rat& x) const {
        for (const auto& i : ivals_)
            if (i.contains(x)) return true;
        return false;
    }

    IntervalSet unite(const IntervalSet& o) const {
        std::vector<Ival> all = ivals_;
        all.insert(all.end(), o.ivals_.begin(), o.ivals_.end());
        return normalized(std::move(all));
    }

    IntervalSet intersect(const IntervalSet& o) const {
        std::vector<Ival> out;
        for (const auto& a : ivals_) {
            for (const auto& b : o.ivals_) {
                Ival r;
                r.lo = detail::lo_less(a.lo, b.lo) ? b.lo : a.lo;
                r.hi = detail::hi_less(a.hi, b.hi) ? a.hi : b.hi;
                if (!r.empty()) out.push_back(std::move(r));
            }
        }
        return normalized(std::move(out));
    }

    IntervalSet intersect(const Ival& i) const { return intersect(IntervalSet(i)); }

    IntervalSet complement() const {
        // walk left to right over the (normalized) intervals
        std::vector<Ival> out;
        Endpoint cursor{std::nullopt, false}; // -inf, next gap starts closed
        bool cursorOpen = false;              // openness of the gap's lower end
        for (const auto& i : ivals_) {
            Ival gap;
            gap.lo = cursor;
            gap.lo.open = cursorOpen;
            if (i.lo.v) {
                gap.hi = {*i.lo.v, !i.lo.open};
                if (!gap.empty()) out.push_back(gap);
            } else {
                // interval starts at -inf: no gap before it
            }
            if (i.hi.v) {
                cursor = {*i.hi.v, false};
                cursorOpen = !i.hi.open;
            } else {
                return normalized(std::move(out)); // reaches +inf
            }
        }
        Ival tail;
        tail.lo = cursor;
        tail.lo.open = cursorOpen;
        tail.hi = {std::nullopt, false};
        if (ivals_.empty()) tail = Ival::all();
        out.push_back(tail);
        return normalized(std::move(out));
    }

    // first interval (leftmost); set must be nonempty
    const Ival& first() const { return ivals_.front(); }

    // the interval containing x, if any
    std::optional<Ival> interval_containing(const Rat& x) const {
        for (const auto& i : ivals_)
            if (i.contains(x)) return i;
        return std::nullopt;
    }

private:
    static IntervalSet normalized(std::vector<Ival> v) {
        std::erase_if(v, [](const Ival& i) { return i.empty(); });
        std::sort(v.begin(), v.end(), [](const Ival& a, const Ival& b) {
            if (detail::lo_less(a.lo, b.lo)) return true;
            if (detail::lo_less(b.lo, a.lo)) return false;
            return detail::hi_less(b.hi, a.hi); // wider first
        });
        std::vector<Ival> out;
        for (auto& i : v) {
            if (out.empty()) { out.push_back(std::move(i)); continue; }
            Ival& last = out.back();
            if (mergeable(last, i)) {
                if (detail::hi_less(last.hi, i.hi)) last.hi = i.hi;
            } else {
                out.push_back(std::move(i));
            }
        }
        IntervalSet s;
        s.ivals_ = std::move(out);
        return s;
    }

    // overlapping or touching without a point gap
    static bool mergeable(const Ival& a, const Ival& b) {
        // b.lo is >= a.lo by the sort; merge if b.lo <= a.hi "with contact"
        if (!a.hi.v) return true;
        if (!b.lo.v) return true;
        if (*b.lo.v < *a.hi.v) return true;
        if (*b.lo.v > *a.hi.v) return false;
        return !(a.hi.open && b.lo.open);
    }

    std::vector<Ival> ivals_;
};

// Truth set of a formula whose atoms were pre-resolved to univariate
// affine functions a*s + b ⋈ 0 of a single parameter s.
struct AffineOfParam {
    Rat slope;  // a
    Rat offset; // b
};

inline IntervalSet atom_param_set(const AffineOfParam& f, bool strict) {
    if (f.slope.is_zero()) {
        bool truth = strict ? f.offset.sign() > 0 : f.offset.sign() >= 0;
        return truth ? IntervalSet::all() : IntervalSet::empty();
    }
    Rat root = -f.offset / f.slope;
    if (f.slope.sign() > 0) return IntervalSet(Ival::at_least(root, strict));
    return IntervalSet(Ival::at_most(root, strict));
}

// Evaluates formula truth as a set of parameter values, given a resolver
// mapping each atom to its univariate affine form.
template <class AtomResolve>
IntervalSet formula_param_set(const Formula& f, const AtomResolve& resolve) {
    switch (f.kind()) {
        case Formula::Kind::True: return IntervalSet::all();
        case Formula::Kind::False: return IntervalSet::empty();
        case Formula::Kind::Leaf:
            return atom_param_set(resolve(f.leaf()), f.leaf().strict());
        case Formula::Kind::Not:
            return formula_param_set(f.children()[0], resolve).complement();
        case Formula::Kind::And: {
            IntervalSet s = IntervalSet::all();
            for (const auto& k : f.children()) {
                s = s.intersect(formula_param_set(k, resolve));
                if (s.is_empty()) break;
            }
            return s;
        }
        case Formula::Kind::Or: {
            IntervalSet s;
            for (const auto& k : f.children())
                s = s.unite(formula_param_set(k, resolve));
            return s;
        }
    }
    return IntervalSet::empty();
}

} // namespace straloop

#endif // STRALOOP_INTERVAL_HPP
