#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "otm/errors.hpp"
#include "otm/hfset.hpp"
#include "otm/ordinal.hpp"

namespace otm {

// A code is a finite set of ordinals. Each element unpairs into an edge
// (i, j) meaning "node i is a member of node j"; node 0 is the coded set.

class Code {
public:
    Code() = default;
    explicit Code(std::vector<Ordinal> elements) : elements_(std::move(elements)) {
        std::sort(elements_.begin(), elements_.end());
        elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
    }

    const std::vector<Ordinal>& elements() const noexcept { return elements_; }
    bool empty() const noexcept { return elements_.empty(); }
    std::size_t size() const noexcept { return elements_.size(); }

    friend bool operator==(const Code& a, const Code& b) { return a.elements_ == b.elements_; }

private:
    std::vector<Ordinal> elements_;  // ascending, unique
};

/// A listing of tc({x}) without repetition; items[0] is the coded set itself.
struct Enumeration {
    std::vector<SetValue> items;
};

namespace detail {

inline void require_valid_enumeration(const SetValue& x, const Enumeration& f) {
    if (f.items.empty() || !(f.items[0] == x))
        throw Error("invalid-enumeration", "enumeration must list the coded set at index 0");
    std::vector<SetValue> sorted = f.items;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error("invalid-enumeration", "enumeration contains repeated items");
    std::vector<SetValue> expected = transitive_members(x);
    expected.push_back(x);
    std::sort(expected.begin(), expected.end());
    expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
    if (sorted != expected)
        throw Error("invalid-enumeration", "enumeration is not exactly tc({x})");
}

}  // namespace detail

inline Code encode(const SetValue& x, const Enumeration& f) {
    detail::require_valid_enumeration(x, f);
    std::map<SetValue, std::size_t> index;
    for (std::size_t i = 0; i < f.items.size(); ++i) index[f.items[i]] = i;
    std::vector<Ordinal> edges;
    for (std::size_t j = 0; j < f.items.size(); ++j) {
        for (const SetValue& child : f.items[j].children()) {
            std::size_t i = index.at(child);
            edges.push_back(godel_pair(Ordinal::finite(i), Ordinal::finite(j)));
        }
    }
    return Code(std::move(edges));
}

/// Breadth-first listing of tc({x}) in canonical order, root first.
inline Enumeration canonical_enumeration(const SetValue& x) {
    Enumeration f;
    std::set<SetValue> seen;
    f.items.push_back(x);
    seen.insert(x);
    for (std::size_t head = 0; head < f.items.size(); ++head) {
        SetValue current = f.items[head];
        for (const SetValue& child : current.children()) {
            if (seen.insert(child).second) f.items.push_back(child);
        }
    }
    return f;
}

inline SetValue decode(const Code& c) {
    std::map<Ordinal, std::vector<Ordinal>> members;  // node -> members of node
    std::set<Ordinal> nodes;
    nodes.insert(Ordinal());
    for (const Ordinal& q : c.elements()) {
        auto [i, j] = godel_unpair(q);
        members[j].push_back(i);
        nodes.insert(i);
        nodes.insert(j);
    }

    // Well-foundedness: the finite membership digraph must be acyclic.
    std::map<Ordinal, int> mark;  // 0 unvisited, 1 on stack, 2 done
    std::vector<std::pair<Ordinal, std::size_t>> stack;
    for (const Ordinal& start : nodes) {
        if (mark[start] != 0) continue;
        stack.emplace_back(start, 0);
        mark[start] = 1;
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            const auto& ms = members[node];
            if (next == ms.size()) {
                mark[node] = 2;
                stack.pop_back();
                continue;
            }
            const Ordinal& child = ms[next++];
            if (mark[child] == 1)
                throw Error("ill-founded-code", "membership cycle through node " + ord_to_text(child));
            if (mark[child] == 0) {
                mark[child] = 1;
                stack.emplace_back(child, 0);
            }
        }
    }

    // Mostowski collapse, children first.
    std::map<Ordinal, SetValue> value;
    std::vector<Ordinal> order;  // post-order: every node after its members
    {
        std::map<Ordinal, int> done;
        std::vector<std::pair<Ordinal, std::size_t>> walk;
        for (const Ordinal& start : nodes) {
            if (done[start]) continue;
            walk.emplace_back(start, 0);
            while (!walk.empty()) {
                auto& [node, next] = walk.back();
                const auto& ms = members[node];
                if (next == ms.size()) {
                    if (!done[node]) {
                        order.push_back(node);
                        done[node] = 1;
                    }
                    walk.pop_back();
                    continue;
                }
                const Ordinal& child = ms[next++];
                if (!done[child]) walk.emplace_back(child, 0);
            }
        }
    }
    for (const Ordinal& node : order) {
        std::vector<SetValue> cs;
        for (const Ordinal& m : members[node]) cs.push_back(value.at(m));
        value[node] = SetValue(std::move(cs));
    }

    // Extensionality: distinct nodes must collapse to distinct sets.
    std::vector<std::pair<SetValue, Ordinal>> collapsed;
    for (const Ordinal& node : nodes) collapsed.emplace_back(value.at(node), node);
    std::sort(collapsed.begin(), collapsed.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i + 1 < collapsed.size(); ++i) {
        if (collapsed[i].first == collapsed[i + 1].first)
            throw Error("non-extensional-code",
                        "nodes " + ord_to_text(collapsed[i].second) + " and " +
                            ord_to_text(collapsed[i + 1].second) + " collapse to the same set");
    }

    return value.at(Ordinal());
}

inline bool check_rep(const Code& c, const SetValue& x) {
    try {
        return decode(c) == x;
    } catch (const Error&) {
        return false;
    }
}

namespace detail {

/// Deterministic permutation of the non-root slots, derived from the seed.
inline Enumeration permuted_enumeration(const SetValue& x, std::uint64_t seed) {
    Enumeration f = canonical_enumeration(x);
    if (f.items.size() > 2) {
        std::mt19937_64 rng(seed);
        for (std::size_t i = f.items.size() - 1; i >= 2; --i) {
            std::size_t j = 1 + static_cast<std::size_t>(rng() % i);  // j in [1, i]
            std::swap(f.items[i], f.items[j]);
        }
    }
    return f;
}

}  // namespace detail

/// Encode x under a seed-determined enumeration (root stays first).
inline Code encode_with_seed(const SetValue& x, std::uint64_t seed) {
    return encode(x, detail::permuted_enumeration(x, seed));
}

inline Code encode_canonical(const SetValue& x) {
    return encode(x, canonical_enumeration(x));
}

/// Same set, different code: re-encode under a seed-determined enumeration.
inline Code reencode(const Code& c, std::uint64_t seed) {
    return encode_with_seed(decode(c), seed);
}

// --- Code literals ----------------------------------------------------------
//
// Codes serialize as a bracketed, comma-separated list of ordinal texts in
// increasing order, e.g. "[2,5,6]".

inline std::string code_to_text(const Code& c) {
    std::string out = "[";
    bool first = true;
    for (const Ordinal& q : c.elements()) {
        if (!first) out += ',';
        first = false;
        out += ord_to_text(q);
    }
    out += ']';
    return out;
}

inline Code code_from_text(std::string_view text) {
    std::size_t pos = 0;
    if (pos >= text.size() || text[pos] != '[') throw ParseError(pos, "expected '['");
    ++pos;
    std::vector<Ordinal> elements;
    if (pos < text.size() && text[pos] == ']') {
        ++pos;
    } else {
        while (true) {
            std::size_t next = text.find_first_of(",]", pos);
            if (next == std::string_view::npos) throw ParseError(pos, "unterminated code literal");
            try {
                elements.push_back(ord_from_text(text.substr(pos, next - pos)));
            } catch (const ParseError& e) {
                throw ParseError(pos + e.position(), "bad ordinal in code literal");
            }
            pos = next + 1;
            if (text[next] == ']') break;
        }
    }
    if (pos != text.size()) throw ParseError(pos, "trailing characters after code literal");
    return Code(std::move(elements));
}

}  // namespace otm
