#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "otm/errors.hpp"

namespace otm {

// Hereditarily finite sets in canonical form. Children are stored sorted
// ascending and duplicate-free; equality is extensional. The canonical total
// order compares child lists lexicographically with the larger child first.

class SetValue {
public:
    SetValue() = default;  // empty set
    explicit SetValue(std::vector<SetValue> children) : children_(std::move(children)) {
        std::sort(children_.begin(), children_.end());
        children_.erase(std::unique(children_.begin(), children_.end()), children_.end());
    }

    const std::vector<SetValue>& children() const noexcept { return children_; }
    bool empty() const noexcept { return children_.empty(); }
    std::size_t size() const noexcept { return children_.size(); }

    bool contains(const SetValue& v) const {
        return std::binary_search(children_.begin(), children_.end(), v);
    }

    friend std::strong_ordering operator<=>(const SetValue& a, const SetValue& b) {
        const auto& ca = a.children_;
        const auto& cb = b.children_;
        const std::size_t n = std::min(ca.size(), cb.size());
        for (std::size_t i = 0; i < n; ++i) {
            auto c = ca[ca.size() - 1 - i] <=> cb[cb.size() - 1 - i];
            if (c != 0) return c;
        }
        return ca.size() <=> cb.size();
    }
    friend bool operator==(const SetValue& a, const SetValue& b) { return (a <=> b) == 0; }

private:
    std::vector<SetValue> children_;
};

inline SetValue singleton(const SetValue& a) {
    return SetValue(std::vector<SetValue>{a});
}

inline SetValue set_union(const SetValue& a, const SetValue& b) {
    std::vector<SetValue> cs = a.children();
    cs.insert(cs.end(), b.children().begin(), b.children().end());
    return SetValue(std::move(cs));
}

inline SetValue set_insert(const SetValue& a, const SetValue& v) {
    std::vector<SetValue> cs = a.children();
    cs.push_back(v);
    return SetValue(std::move(cs));
}

inline SetValue set_erase(const SetValue& a, const SetValue& v) {
    std::vector<SetValue> cs;
    for (const SetValue& c : a.children())
        if (!(c == v)) cs.push_back(c);
    return SetValue(std::move(cs));
}

/// Union of the members of x's members.
inline SetValue big_union(const SetValue& x) {
    std::vector<SetValue> cs;
    for (const SetValue& c : x.children())
        cs.insert(cs.end(), c.children().begin(), c.children().end());
    return SetValue(std::move(cs));
}

inline std::size_t rank(const SetValue& x) {
    std::size_t r = 0;
    for (const SetValue& c : x.children()) r = std::max(r, rank(c) + 1);
    return r;
}

/// Transitive closure of x's members (x itself excluded).
inline std::vector<SetValue> transitive_members(const SetValue& x) {
    std::vector<SetValue> out;
    std::vector<const SetValue*> stack;
    for (const SetValue& c : x.children()) stack.push_back(&c);
    while (!stack.empty()) {
        const SetValue* top = stack.back();
        stack.pop_back();
        if (std::find(out.begin(), out.end(), *top) != out.end()) continue;
        out.push_back(*top);
        for (const SetValue& c : top->children()) stack.push_back(&c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// --- Kuratowski pairs and set-coded functions ------------------------------

inline SetValue kpair(const SetValue& a, const SetValue& b) {
    return SetValue({singleton(a), SetValue({a, b})});
}

inline std::optional<std::pair<SetValue, SetValue>> split_kpair(const SetValue& p) {
    const auto& cs = p.children();
    if (cs.size() == 1) {
        if (cs[0].size() != 1) return std::nullopt;
        return std::make_pair(cs[0].children()[0], cs[0].children()[0]);
    }
    if (cs.size() != 2) return std::nullopt;
    const SetValue* single = nullptr;
    const SetValue* both = nullptr;
    for (const SetValue& c : cs) {
        if (c.size() == 1 && !single)
            single = &c;
        else if (c.size() == 2 && !both)
            both = &c;
    }
    if (!single || !both) return std::nullopt;
    const SetValue& a = single->children()[0];
    if (!both->contains(a)) return std::nullopt;
    const SetValue& b =
        both->children()[0] == a ? both->children()[1] : both->children()[0];
    return std::make_pair(a, b);
}

/// Decomposes a set of Kuratowski pairs; nullopt if some member is not a pair.
inline std::optional<std::vector<std::pair<SetValue, SetValue>>> as_pair_set(const SetValue& f) {
    std::vector<std::pair<SetValue, SetValue>> out;
    for (const SetValue& c : f.children()) {
        auto p = split_kpair(c);
        if (!p) return std::nullopt;
        out.push_back(*p);
    }
    return out;
}

/// Pairs of a single-valued function, or nullopt.
inline std::optional<std::vector<std::pair<SetValue, SetValue>>> as_function(const SetValue& f) {
    auto pairs = as_pair_set(f);
    if (!pairs) return std::nullopt;
    for (std::size_t i = 0; i < pairs->size(); ++i)
        for (std::size_t j = i + 1; j < pairs->size(); ++j)
            if ((*pairs)[i].first == (*pairs)[j].first) return std::nullopt;
    return pairs;
}

inline std::optional<SetValue> apply_function(
    const std::vector<std::pair<SetValue, SetValue>>& pairs, const SetValue& a) {
    for (const auto& [k, v] : pairs)
        if (k == a) return v;
    return std::nullopt;
}

// --- von Neumann naturals ---------------------------------------------------

inline SetValue vn(std::uint64_t n) {
    SetValue v;
    for (std::uint64_t i = 0; i < n; ++i) v = set_insert(v, v);
    return v;
}

inline std::optional<std::uint64_t> as_vn(const SetValue& x) {
    SetValue v;
    for (std::uint64_t i = 0; i < x.size(); ++i) {
        if (!(x.children()[i] == v)) return std::nullopt;
        v = set_insert(v, v);
    }
    return x.size();
}

// --- Set literals -----------------------------------------------------------
//
// set := "{" (set ("," set)*)? "}"; whitespace insignificant; duplicates are
// tolerated on input and normalized away.

inline std::string set_to_text(const SetValue& x) {
    std::string out = "{";
    bool first = true;
    for (const SetValue& c : x.children()) {
        if (!first) out += ',';
        first = false;
        out += set_to_text(c);
    }
    out += '}';
    return out;
}

namespace detail {

struct SetParser {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() &&
               (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' || text[pos] == '\r'))
            ++pos;
    }

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(pos, message); }

    SetValue parse_set() {
        skip_ws();
        if (pos >= text.size() || text[pos] != '{') fail("expected '{'");
        ++pos;
        std::vector<SetValue> children;
        skip_ws();
        if (pos < text.size() && text[pos] == '}') {
            ++pos;
            return SetValue();
        }
        while (true) {
            children.push_back(parse_set());
            skip_ws();
            if (pos >= text.size()) fail("unterminated set literal");
            if (text[pos] == ',') {
                ++pos;
                continue;
            }
            if (text[pos] == '}') {
                ++pos;
                return SetValue(std::move(children));
            }
            fail("expected ',' or '}'");
        }
    }
};

}  // namespace detail

inline SetValue set_from_text(std::string_view text) {
    detail::SetParser p{text};
    SetValue v = p.parse_set();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing characters after set literal");
    return v;
}

}  // namespace otm
