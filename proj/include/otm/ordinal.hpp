#pragma once

#include <algorithm>
#include <cassert>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "otm/errors.hpp"

namespace otm {

// Ordinals below epsilon_0 in Cantor normal form:
//   w^e1 * c1 + w^e2 * c2 + ... + w^ek * ck
// with e1 > e2 > ... > ek (exponents are themselves Ordinals) and ci >= 1.
// The empty term list is 0; the finite ordinal n is the single term (0, n).

class Ordinal;
struct OrdTerm;

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = 0;
    if (__builtin_add_overflow(a, b, &r))
        throw Error("unsupported-range", "coefficient overflow in ordinal arithmetic");
    return r;
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r))
        throw Error("unsupported-range", "coefficient overflow in ordinal arithmetic");
    return r;
}

class Ordinal {
public:
    Ordinal() = default;  // zero

    static Ordinal finite(std::uint64_t n);
    static Ordinal omega();
    static Ordinal from_terms(std::vector<OrdTerm> terms);

    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_finite() const noexcept;
    /// Value of a finite ordinal; throws on infinite input.
    std::uint64_t finite_value() const;
    bool is_successor() const noexcept;
    bool is_limit() const noexcept { return !is_zero() && !is_successor(); }

    const std::vector<OrdTerm>& terms() const noexcept { return terms_; }

    friend std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b);
    friend bool operator==(const Ordinal& a, const Ordinal& b);

private:
    std::vector<OrdTerm> terms_;
};

struct OrdTerm {
    Ordinal exponent;
    std::uint64_t coefficient = 0;
};

inline std::strong_ordering compare(const Ordinal& a, const Ordinal& b);

inline bool operator==(const OrdTerm& a, const OrdTerm& b) {
    return a.coefficient == b.coefficient && compare(a.exponent, b.exponent) == 0;
}

inline std::strong_ordering compare(const Ordinal& a, const Ordinal& b) {
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    const std::size_t n = std::min(ta.size(), tb.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (auto c = compare(ta[i].exponent, tb[i].exponent); c != 0) return c;
        if (auto c = ta[i].coefficient <=> tb[i].coefficient; c != 0) return c;
    }
    return ta.size() <=> tb.size();
}

inline std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b) {
    return compare(a, b);
}

inline bool operator==(const Ordinal& a, const Ordinal& b) {
    return compare(a, b) == 0;
}

inline Ordinal Ordinal::finite(std::uint64_t n) {
    Ordinal o;
    if (n > 0) o.terms_.push_back(OrdTerm{Ordinal(), n});
    return o;
}

inline Ordinal Ordinal::omega() {
    Ordinal o;
    o.terms_.push_back(OrdTerm{Ordinal::finite(1), 1});
    return o;
}

inline Ordinal Ordinal::from_terms(std::vector<OrdTerm> terms) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i].coefficient == 0)
            throw Error("unsupported-range", "zero coefficient in CNF term list");
        if (i + 1 < terms.size() && compare(terms[i].exponent, terms[i + 1].exponent) <= 0)
            throw Error("unsupported-range", "CNF exponents must strictly decrease");
    }
    Ordinal o;
    o.terms_ = std::move(terms);
    return o;
}

inline bool Ordinal::is_finite() const noexcept {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent.is_zero());
}

inline std::uint64_t Ordinal::finite_value() const {
    if (is_zero()) return 0;
    if (!is_finite()) throw Error("unsupported-range", "ordinal is not finite");
    return terms_[0].coefficient;
}

inline bool Ordinal::is_successor() const noexcept {
    return !terms_.empty() && terms_.back().exponent.is_zero();
}

/// w^a.
inline Ordinal w_pow(const Ordinal& a) {
    return Ordinal::from_terms({OrdTerm{a, 1}});
}

inline Ordinal operator+(const Ordinal& a, const Ordinal& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const Ordinal& lead = b.terms().front().exponent;
    std::vector<OrdTerm> out;
    for (const OrdTerm& t : a.terms()) {
        if (compare(t.exponent, lead) > 0) out.push_back(t);
    }
    // A term of a with exponent equal to b's leading exponent merges coefficients;
    // everything smaller in a is absorbed.
    std::uint64_t merged = 0;
    for (const OrdTerm& t : a.terms()) {
        if (compare(t.exponent, lead) == 0) merged = t.coefficient;
    }
    bool first = true;
    for (const OrdTerm& t : b.terms()) {
        if (first) {
            out.push_back(OrdTerm{t.exponent, checked_add(t.coefficient, merged)});
            first = false;
        } else {
            out.push_back(t);
        }
    }
    return Ordinal::from_terms(std::move(out));
}

inline Ordinal operator*(const Ordinal& a, const Ordinal& b) {
    if (a.is_zero() || b.is_zero()) return Ordinal();
    const Ordinal& a_lead = a.terms().front().exponent;
    Ordinal result;
    for (const OrdTerm& t : b.terms()) {
        Ordinal piece;
        if (t.exponent.is_zero()) {
            // a * n: multiply the leading coefficient, keep the tail of a.
            std::vector<OrdTerm> ts = a.terms();
            ts.front().coefficient = checked_mul(ts.front().coefficient, t.coefficient);
            piece = Ordinal::from_terms(std::move(ts));
        } else {
            piece = Ordinal::from_terms({OrdTerm{a_lead + t.exponent, t.coefficient}});
        }
        result = result + piece;
    }
    return result;
}

/// Predecessor of a successor ordinal.
inline Ordinal pred(const Ordinal& a) {
    if (!a.is_successor()) throw Error("unsupported-range", "pred of a non-successor");
    std::vector<OrdTerm> ts = a.terms();
    if (ts.back().coefficient == 1)
        ts.pop_back();
    else
        ts.back().coefficient -= 1;
    return Ordinal::from_terms(std::move(ts));
}

/// Largest limit-or-zero ordinal <= a (a with its finite tail removed).
inline Ordinal limit_floor(const Ordinal& a) {
    if (!a.is_successor()) return a;
    std::vector<OrdTerm> ts = a.terms();
    ts.pop_back();
    return Ordinal::from_terms(std::move(ts));
}

/// The unique d with a + d = b; requires a <= b.
inline Ordinal left_subtract(const Ordinal& a, const Ordinal& b) {
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    std::size_t i = 0;
    while (i < ta.size() && i < tb.size() && ta[i] == tb[i]) ++i;
    if (i == ta.size() && i == tb.size()) return Ordinal();
    if (i == ta.size())
        return Ordinal::from_terms({tb.begin() + static_cast<std::ptrdiff_t>(i), tb.end()});
    if (i == tb.size() || compare(a, b) > 0)
        throw Error("unsupported-range", "left_subtract requires a <= b");
    std::vector<OrdTerm> out;
    if (compare(ta[i].exponent, tb[i].exponent) == 0) {
        assert(ta[i].coefficient < tb[i].coefficient);
        out.push_back(OrdTerm{tb[i].exponent, tb[i].coefficient - ta[i].coefficient});
        ++i;
    }
    out.insert(out.end(), tb.begin() + static_cast<std::ptrdiff_t>(i), tb.end());
    return Ordinal::from_terms(std::move(out));
}

namespace detail {

inline bool below_w_to_w(const Ordinal& a) {
    for (const OrdTerm& t : a.terms())
        if (!t.exponent.is_finite()) return false;
    return true;
}

inline void require_below_w_to_w(const Ordinal& a, const char* what) {
    if (!below_w_to_w(a))
        throw Error("unsupported-range", std::string(what) + " must be below w^w");
}

inline Ordinal drop_last_term(const Ordinal& a) {
    std::vector<OrdTerm> ts = a.terms();
    ts.pop_back();
    return Ordinal::from_terms(std::move(ts));
}

}  // namespace detail

/// Order type of { (a,b) : max(a,b) < m } under the Godel (max-then-lex) order.
/// Satisfies square(0) = 0, square(g+1) = square(g) + g*2 + 1, continuity at limits.
inline Ordinal godel_square(const Ordinal& m) {
    detail::require_below_w_to_w(m, "godel_square argument");
    if (m.is_zero()) return Ordinal();
    if (m.is_finite()) {
        std::uint64_t n = m.finite_value();
        return Ordinal::finite(checked_mul(n, n));
    }
    const auto& ts = m.terms();
    const OrdTerm& last = ts.back();
    if (last.exponent.is_zero()) {
        // m = mu + n with mu a limit: square(mu) + (mu*2)*n + n.
        Ordinal mu = detail::drop_last_term(m);
        std::uint64_t n = last.coefficient;
        return godel_square(mu) + mu * Ordinal::finite(checked_mul(2, n)) + Ordinal::finite(n);
    }
    std::uint64_t k = last.exponent.finite_value();
    std::uint64_t c = last.coefficient;
    if (ts.size() == 1) {
        // square(w^k) = w^(2k-1); each further w^k step appends w^(2k).
        if (c == 1) return w_pow(Ordinal::finite(2 * k - 1));
        return w_pow(Ordinal::finite(checked_mul(2, k))) * Ordinal::finite(c - 1);
    }
    Ordinal prefix = detail::drop_last_term(m);
    std::uint64_t k1 = ts.front().exponent.finite_value();
    return godel_square(prefix) + w_pow(Ordinal::finite(checked_add(k1, k))) * Ordinal::finite(c);
}

/// Godel pairing: order pairs by maximum, then lexicographically. Bijective below w^w.
inline Ordinal godel_pair(const Ordinal& a, const Ordinal& b) {
    detail::require_below_w_to_w(a, "godel_pair argument");
    detail::require_below_w_to_w(b, "godel_pair argument");
    if (compare(a, b) < 0) return godel_square(b) + a;  // (a, m) with a < m
    return godel_square(a) + a + b;                     // (m, b) with b <= m
}

namespace detail {

// Largest j >= 0 with pred(j); pred must be monotone and hold at 0.
template <typename Pred>
std::uint64_t gallop_max(Pred&& pred) {
    if (!pred(1)) return 0;
    std::uint64_t lo = 1, hi = 2;
    while (hi < (std::uint64_t{1} << 62) && pred(hi)) {
        lo = hi;
        hi *= 2;
    }
    // invariant: pred(lo), !pred(hi)
    while (hi - lo > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        (pred(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace detail

inline std::pair<Ordinal, Ordinal> godel_unpair(const Ordinal& c) {
    detail::require_below_w_to_w(c, "godel_unpair argument");
    if (c.is_finite()) {
        std::uint64_t n = c.finite_value();
        std::uint64_t m = 0;
        while ((m + 1) <= n / (m + 1)) ++m;  // integer sqrt
        std::uint64_t r = n - m * m;
        if (r < m) return {Ordinal::finite(r), Ordinal::finite(m)};
        return {Ordinal::finite(m), Ordinal::finite(r - m)};
    }
    // Build the largest m with square(m) <= c greedily, one CNF digit at a time.
    std::uint64_t top = c.terms().front().exponent.finite_value();
    Ordinal m;
    for (std::uint64_t k = (top + 1) / 2; k >= 1; --k) {
        Ordinal unit = w_pow(Ordinal::finite(k));
        std::uint64_t j = detail::gallop_max([&](std::uint64_t j) {
            return compare(godel_square(m + unit * Ordinal::finite(j)), c) <= 0;
        });
        if (j > 0) m = m + unit * Ordinal::finite(j);
    }
    std::uint64_t n = detail::gallop_max([&](std::uint64_t j) {
        return compare(godel_square(m + Ordinal::finite(j)), c) <= 0;
    });
    m = m + Ordinal::finite(n);
    Ordinal delta = left_subtract(godel_square(m), c);
    if (compare(delta, m) < 0) return {delta, m};
    Ordinal b = left_subtract(m, delta);
    assert(compare(b, m) <= 0);
    return {m, b};
}

// ---------------------------------------------------------------------------
// Text form.
//
// ordinal := "0" | term ("+" term)*
// term    := "w" ("^" atom)? ("*" nat)? | nat
// atom    := nat | "(" ordinal ")"
// nat is decimal without leading zeros; omitted coefficient and exponent mean 1.

inline std::string ord_to_text(const Ordinal& a) {
    if (a.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const OrdTerm& t : a.terms()) {
        if (!first) out += '+';
        first = false;
        if (t.exponent.is_zero()) {
            out += std::to_string(t.coefficient);
            continue;
        }
        out += 'w';
        if (!(t.exponent == Ordinal::finite(1))) {
            out += '^';
            if (t.exponent.is_finite())
                out += std::to_string(t.exponent.finite_value());
            else
                out += '(' + ord_to_text(t.exponent) + ')';
        }
        out += '*';
        out += std::to_string(t.coefficient);
    }
    return out;
}

namespace detail {

struct OrdParser {
    std::string_view text;
    std::size_t pos = 0;

    bool at_end() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(pos, message); }

    std::uint64_t parse_nat() {
        if (at_end() || peek() < '0' || peek() > '9') fail("expected a decimal number");
        std::size_t start = pos;
        std::uint64_t value = 0;
        while (!at_end() && peek() >= '0' && peek() <= '9') {
            std::uint64_t digit = static_cast<std::uint64_t>(peek() - '0');
            value = checked_add(checked_mul(value, 10), digit);
            ++pos;
        }
        if (pos - start > 1 && text[start] == '0')
            throw ParseError(start, "leading zeros are not allowed");
        return value;
    }

    Ordinal parse_term() {
        if (!at_end() && peek() == 'w') {
            ++pos;
            Ordinal exponent = Ordinal::finite(1);
            if (!at_end() && peek() == '^') {
                ++pos;
                if (!at_end() && peek() == '(') {
                    ++pos;
                    exponent = parse_ordinal();
                    if (at_end() || peek() != ')') fail("expected ')'");
                    ++pos;
                } else {
                    exponent = Ordinal::finite(parse_nat());
                }
            }
            std::uint64_t coefficient = 1;
            if (!at_end() && peek() == '*') {
                ++pos;
                coefficient = parse_nat();
            }
            return w_pow(exponent) * Ordinal::finite(coefficient);
        }
        return Ordinal::finite(parse_nat());
    }

    Ordinal parse_ordinal() {
        // "+" is ordinal addition, so non-canonical spellings normalize.
        Ordinal value = parse_term();
        while (!at_end() && peek() == '+') {
            ++pos;
            value = value + parse_term();
        }
        return value;
    }
};

}  // namespace detail

inline Ordinal ord_from_text(std::string_view text) {
    detail::OrdParser p{text};
    Ordinal value = p.parse_ordinal();
    if (!p.at_end()) p.fail("trailing characters after ordinal");
    return value;
}

}  // namespace otm
