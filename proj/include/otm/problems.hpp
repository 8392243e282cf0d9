#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "otm/code.hpp"
#include "otm/hfset.hpp"
#include "otm/vm.hpp"

namespace otm {

// The four choice principles as checkable construction problems on
// hereditarily finite instances. Ordered pairs and functions are Kuratowski-
// coded; the ordinal of a well-ordering is a von Neumann natural.

enum class ProblemKind { AC, ACprime, WO, ZL };

inline const char* problem_name(ProblemKind p) {
    switch (p) {
        case ProblemKind::AC: return "ac";
        case ProblemKind::ACprime: return "acp";
        case ProblemKind::WO: return "wo";
        case ProblemKind::ZL: return "zl";
    }
    return "?";
}

inline std::optional<ProblemKind> problem_from_name(std::string_view name) {
    if (name == "ac") return ProblemKind::AC;
    if (name == "acp") return ProblemKind::ACprime;
    if (name == "wo") return ProblemKind::WO;
    if (name == "zl") return ProblemKind::ZL;
    return std::nullopt;
}

// --- Posets ------------------------------------------------------------------

struct Poset {
    SetValue carrier;
    SetValue relation;
    std::vector<std::pair<SetValue, SetValue>> pairs;

    bool related(const SetValue& a, const SetValue& b) const {
        for (const auto& [x, y] : pairs)
            if (x == a && y == b) return true;
        return false;
    }

    std::vector<SetValue> maximal_elements() const {
        std::vector<SetValue> out;
        for (const SetValue& e : carrier.children()) {
            bool maximal = true;
            for (const SetValue& z : carrier.children()) {
                if (!(z == e) && related(e, z)) {
                    maximal = false;
                    break;
                }
            }
            if (maximal) out.push_back(e);
        }
        return out;
    }
};

/// Reads x as a Kuratowski pair (X, R) with R a (reflexive) partial order on X.
inline std::optional<Poset> as_poset(const SetValue& x) {
    auto kp = split_kpair(x);
    if (!kp) return std::nullopt;
    Poset p;
    p.carrier = kp->first;
    p.relation = kp->second;
    auto pairs = as_pair_set(p.relation);
    if (!pairs) return std::nullopt;
    p.pairs = *pairs;
    for (const auto& [a, b] : p.pairs)
        if (!p.carrier.contains(a) || !p.carrier.contains(b)) return std::nullopt;
    for (const SetValue& v : p.carrier.children())
        if (!p.related(v, v)) return std::nullopt;
    for (const auto& [a, b] : p.pairs)
        if (!(a == b) && p.related(b, a)) return std::nullopt;
    for (const auto& [a, b] : p.pairs)
        for (const auto& [c, d] : p.pairs)
            if (b == c && !p.related(a, d)) return std::nullopt;
    return p;
}

// --- Domains, checking, canonifying -----------------------------------------

inline bool in_domain(ProblemKind p, const SetValue& x) {
    switch (p) {
        case ProblemKind::AC:
        case ProblemKind::WO:
            return true;
        case ProblemKind::ACprime: {
            const auto& zs = x.children();
            for (const SetValue& z : zs)
                if (z.empty()) return false;
            for (std::size_t i = 0; i < zs.size(); ++i)
                for (std::size_t j = i + 1; j < zs.size(); ++j)
                    for (const SetValue& m : zs[i].children())
                        if (zs[j].contains(m)) return false;
            return true;
        }
        case ProblemKind::ZL: {
            auto poset = as_poset(x);
            // Finite posets: every chain has an upper bound iff the carrier is
            // nonempty (the empty chain needs one).
            return poset && !poset->carrier.empty();
        }
    }
    return false;
}

inline bool check(ProblemKind p, const SetValue& x, const SetValue& y) {
    switch (p) {
        case ProblemKind::AC: {
            auto f = as_function(y);
            if (!f) return false;
            SetValue expected_domain = set_insert(x, SetValue());
            std::vector<SetValue> firsts;
            for (const auto& [a, b] : *f) firsts.push_back(a);
            if (!(SetValue(firsts) == expected_domain)) return false;
            for (const auto& [a, b] : *f) {
                if (a.empty() && !b.empty()) return false;
                if (!a.empty() && !a.contains(b)) return false;
            }
            return true;
        }
        case ProblemKind::ACprime: {
            SetValue pool = big_union(x);
            for (const SetValue& m : y.children())
                if (!pool.contains(m)) return false;
            for (const SetValue& z : x.children()) {
                std::size_t hits = 0;
                for (const SetValue& m : y.children())
                    if (z.contains(m)) ++hits;
                if (hits != 1) return false;
            }
            return true;
        }
        case ProblemKind::WO: {
            auto f = as_function(y);
            if (!f) return false;
            std::size_t n = f->size();
            std::vector<bool> seen(n, false);
            std::vector<SetValue> range;
            for (const auto& [a, b] : *f) {
                auto k = as_vn(a);
                if (!k || *k >= n || seen[*k]) return false;
                seen[*k] = true;
                range.push_back(b);
            }
            std::vector<SetValue> sorted_range = range;
            std::sort(sorted_range.begin(), sorted_range.end());
            if (std::adjacent_find(sorted_range.begin(), sorted_range.end()) != sorted_range.end())
                return false;  // not injective
            return SetValue(std::move(sorted_range)) == x;
        }
        case ProblemKind::ZL: {
            auto poset = as_poset(x);
            if (!poset || !poset->carrier.contains(y)) return false;
            for (const SetValue& z : poset->carrier.children())
                if (!(z == y) && poset->related(y, z)) return false;
            return true;
        }
    }
    return false;
}

namespace detail {

inline SetValue canonify_impl(ProblemKind p, const SetValue& x, bool greatest) {
    if (!in_domain(p, x)) return SetValue();
    auto choose = [&](const SetValue& z) {
        return greatest ? z.children().back() : z.children().front();
    };
    switch (p) {
        case ProblemKind::AC: {
            std::vector<SetValue> pairs{kpair(SetValue(), SetValue())};
            for (const SetValue& z : x.children())
                if (!z.empty()) pairs.push_back(kpair(z, choose(z)));
            return SetValue(std::move(pairs));
        }
        case ProblemKind::ACprime: {
            std::vector<SetValue> picks;
            for (const SetValue& z : x.children()) picks.push_back(choose(z));
            return SetValue(std::move(picks));
        }
        case ProblemKind::WO: {
            std::vector<SetValue> items = x.children();
            if (greatest) std::reverse(items.begin(), items.end());
            std::vector<SetValue> pairs;
            for (std::size_t i = 0; i < items.size(); ++i)
                pairs.push_back(kpair(vn(i), items[i]));
            return SetValue(std::move(pairs));
        }
        case ProblemKind::ZL: {
            auto poset = as_poset(x);
            std::vector<SetValue> maxima = poset->maximal_elements();
            return greatest ? maxima.back() : maxima.front();
        }
    }
    return SetValue();
}

}  // namespace detail

/// Deterministic solution on the problem's domain, empty set elsewhere.
inline SetValue canonify(ProblemKind p, const SetValue& x) {
    return detail::canonify_impl(p, x, false);
}

/// Like canonify but preferring canonical-greatest choices wherever the
/// solution is not unique.
inline SetValue canonify_adversarial(ProblemKind p, const SetValue& x) {
    return detail::canonify_impl(p, x, true);
}

/// A total deterministic SetValue -> SetValue witness map.
struct Canonification {
    std::string name;
    std::function<SetValue(const SetValue&)> fn;
};

inline Canonification canonical_canonification(ProblemKind p) {
    return Canonification{std::string("canonical-") + problem_name(p),
                          [p](const SetValue& x) { return canonify(p, x); }};
}

inline Canonification adversarial_canonification(ProblemKind p) {
    return Canonification{std::string("adversarial-") + problem_name(p),
                          [p](const SetValue& x) { return canonify_adversarial(p, x); }};
}

/// Code-level form of a canonification: decode, canonify, re-encode. Seed 0
/// encodes canonically; other seeds permute the enumeration.
inline CodeOracle code_oracle(const Canonification& f, std::uint64_t seed = 0) {
    std::string name = f.name + "/seed" + std::to_string(seed);
    auto fn = f.fn;
    return CodeOracle{name, [fn, seed](const Code& c) -> std::optional<Code> {
                          SetValue y;
                          try {
                              y = decode(c);
                          } catch (const Error&) {
                              return std::nullopt;
                          }
                          SetValue fy = fn(y);
                          return seed == 0 ? encode_canonical(fy) : encode_with_seed(fy, seed);
                      }};
}

// --- Instance generation -----------------------------------------------------

/// All hereditarily finite sets of rank <= max_rank, in canonical order.
/// Counts grow as iterated powers of two; keep max_rank <= 3 here.
inline std::vector<SetValue> hf_universe(std::size_t max_rank) {
    std::vector<SetValue> layer{SetValue()};
    for (std::size_t r = 0; r < max_rank; ++r) {
        std::vector<SetValue> next;
        const std::size_t n = layer.size();
        if (n > 20) throw Error("unsupported-range", "hf_universe layer too large");
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            std::vector<SetValue> cs;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (std::uint64_t{1} << i)) cs.push_back(layer[i]);
            next.push_back(SetValue(std::move(cs)));
        }
        std::sort(next.begin(), next.end());
        layer = std::move(next);
    }
    return layer;
}

/// Deterministic instance suite: sets built from elements of rank <=
/// max_elem_rank with at most max_carrier elements; for ZL, all partial
/// orders on such carriers.
inline std::vector<SetValue> problem_instances(ProblemKind p, std::size_t max_elem_rank = 2,
                                               std::size_t max_carrier = 4) {
    std::vector<SetValue> universe = hf_universe(max_elem_rank);
    std::vector<SetValue> carriers;
    const std::size_t n = universe.size();
    if (n > 20) throw Error("unsupported-range", "instance universe too large");
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<SetValue> cs;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::uint64_t{1} << i)) cs.push_back(universe[i]);
        if (cs.size() > max_carrier) continue;
        carriers.push_back(SetValue(std::move(cs)));
    }
    std::sort(carriers.begin(), carriers.end());

    std::vector<SetValue> out;
    switch (p) {
        case ProblemKind::AC:
        case ProblemKind::WO:
            out = carriers;
            break;
        case ProblemKind::ACprime:
            for (const SetValue& x : carriers)
                if (in_domain(p, x)) out.push_back(x);
            break;
        case ProblemKind::ZL:
            for (const SetValue& carrier : carriers) {
                const auto& elems = carrier.children();
                const std::size_t k = elems.size();
                if (k == 0) continue;
                const std::size_t off_diag = k * k - k;
                for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << off_diag); ++mask) {
                    // Bit b of mask drives the b-th off-diagonal entry of the
                    // adjacency matrix, row-major; the diagonal is forced.
                    std::vector<std::vector<bool>> rel(k, std::vector<bool>(k, false));
                    std::size_t b = 0;
                    for (std::size_t i = 0; i < k; ++i)
                        for (std::size_t j = 0; j < k; ++j) {
                            if (i == j)
                                rel[i][j] = true;
                            else
                                rel[i][j] = (mask >> b++) & 1;
                        }
                    bool ok = true;
                    for (std::size_t i = 0; i < k && ok; ++i)
                        for (std::size_t j = 0; j < k && ok; ++j) {
                            if (i != j && rel[i][j] && rel[j][i]) ok = false;
                            for (std::size_t l = 0; l < k && ok; ++l)
                                if (rel[i][j] && rel[j][l] && !rel[i][l]) ok = false;
                        }
                    if (!ok) continue;
                    std::vector<SetValue> rpairs;
                    for (std::size_t i = 0; i < k; ++i)
                        for (std::size_t j = 0; j < k; ++j)
                            if (rel[i][j]) rpairs.push_back(kpair(elems[i], elems[j]));
                    out.push_back(kpair(carrier, SetValue(std::move(rpairs))));
                }
            }
            break;
    }
    return out;
}

}  // namespace otm
