#include <catch2/catch_amalgamated.hpp>

#include "otm/problems.hpp"
#include "oracles.hpp"

using namespace otm;

namespace {

SetValue sv(const char* literal) { return set_from_text(literal); }

SetValue chain_poset(const std::vector<SetValue>& elems) {
    std::vector<SetValue> rel;
    for (std::size_t i = 0; i < elems.size(); ++i)
        for (std::size_t j = i; j < elems.size(); ++j) rel.push_back(kpair(elems[i], elems[j]));
    return kpair(SetValue(elems), SetValue(std::move(rel)));
}

SetValue antichain_poset(const std::vector<SetValue>& elems) {
    std::vector<SetValue> rel;
    for (const SetValue& e : elems) rel.push_back(kpair(e, e));
    return kpair(SetValue(elems), SetValue(std::move(rel)));
}

}  // namespace

TEST_CASE("kuratowski pairs and functions") {
    SetValue a = sv("{}");
    SetValue b = sv("{{}}");
    auto p = split_kpair(kpair(a, b));
    REQUIRE(p);
    CHECK(p->first == a);
    CHECK(p->second == b);
    auto q = split_kpair(kpair(a, a));
    REQUIRE(q);
    CHECK(q->first == a);
    CHECK(q->second == a);
    CHECK(!split_kpair(sv("{{},{{}}}")));

    SetValue f = SetValue({kpair(a, b), kpair(b, a)});
    auto pairs = as_function(f);
    REQUIRE(pairs);
    CHECK(apply_function(*pairs, a) == b);
    SetValue not_single = SetValue({kpair(a, a), kpair(a, b)});
    CHECK(!as_function(not_single));
}

TEST_CASE("von Neumann naturals") {
    CHECK(vn(0) == sv("{}"));
    CHECK(vn(1) == sv("{{}}"));
    CHECK(vn(2) == sv("{{},{{}}}"));
    for (std::uint64_t n = 0; n < 6; ++n) CHECK(as_vn(vn(n)) == n);
    CHECK(!as_vn(sv("{{{}}}")));
}

TEST_CASE("domain examples") {
    CHECK(in_domain(ProblemKind::ACprime, sv("{{{}}}")));
    CHECK(!in_domain(ProblemKind::ACprime, sv("{{{}},{{},{{}}}}")));
    CHECK(!in_domain(ProblemKind::ACprime, sv("{{}}")));  // empty member
    CHECK(in_domain(ProblemKind::AC, sv("{}")));
    CHECK(in_domain(ProblemKind::WO, sv("{{}}")));

    SetValue a = sv("{}");
    CHECK(in_domain(ProblemKind::ZL, kpair(singleton(a), singleton(kpair(a, a)))));
    CHECK(!in_domain(ProblemKind::ZL, sv("{}")));
    CHECK(!in_domain(ProblemKind::ZL, kpair(sv("{}"), sv("{}"))));  // empty carrier
    // a relation missing reflexivity is not a partial order here
    SetValue two = sv("{{},{{}}}");
    CHECK(!in_domain(ProblemKind::ZL, kpair(two, SetValue())));
}

TEST_CASE("check examples") {
    // the only choice on a singleton of a singleton
    SetValue x = sv("{{{}}}");
    SetValue y = SetValue({kpair(sv("{}"), sv("{}")), kpair(sv("{{}}"), sv("{}"))});
    CHECK(check(ProblemKind::AC, x, y));
    CHECK(!check(ProblemKind::AC, x, SetValue()));

    SetValue wo_x = sv("{{},{{}}}");
    SetValue wo_y = SetValue({kpair(vn(0), sv("{}")), kpair(vn(1), sv("{{}}"))});
    CHECK(check(ProblemKind::WO, wo_x, wo_y));
    SetValue wo_bad = SetValue({kpair(vn(0), sv("{}")), kpair(vn(1), sv("{}"))});
    CHECK(!check(ProblemKind::WO, wo_x, wo_bad));  // not injective

    std::vector<SetValue> ab{sv("{}"), sv("{{}}")};
    SetValue anti = antichain_poset(ab);
    CHECK(check(ProblemKind::ZL, anti, ab[0]));
    CHECK(check(ProblemKind::ZL, anti, ab[1]));
    CHECK(!check(ProblemKind::ZL, anti, sv("{{{}}}")));
}

TEST_CASE("canonify examples") {
    CHECK(canonify(ProblemKind::WO, sv("{}")) == SetValue());

    SetValue x = sv("{{{},{{}}}}");
    SetValue expected = SetValue({kpair(sv("{}"), sv("{}")), kpair(sv("{{},{{}}}"), sv("{}"))});
    CHECK(canonify(ProblemKind::AC, x) == expected);

    CHECK(canonify(ProblemKind::ZL, sv("{{},{{}}}")) == SetValue());  // not a poset pair

    // adversarial differs where the solution is not unique
    CHECK(!(canonify_adversarial(ProblemKind::AC, x) == canonify(ProblemKind::AC, x)));
    CHECK(canonify_adversarial(ProblemKind::AC, sv("{{{}}}")) ==
          canonify(ProblemKind::AC, sv("{{{}}}")));
}

TEST_CASE("soundness of both canonifications") {
    for (ProblemKind p :
         {ProblemKind::AC, ProblemKind::ACprime, ProblemKind::WO, ProblemKind::ZL}) {
        std::size_t in_dom = 0;
        for (const SetValue& x : problem_instances(p, 2, 3)) {
            if (!in_domain(p, x)) continue;
            ++in_dom;
            CHECK(check(p, x, canonify(p, x)));
            CHECK(check(p, x, canonify_adversarial(p, x)));
        }
        CHECK(in_dom > 0);
    }
    // out of domain maps to the empty set
    CHECK(canonify(ProblemKind::ACprime, sv("{{}}")) == SetValue());
}

TEST_CASE("check agrees with the exhaustive solution enumerator") {
    for (ProblemKind p :
         {ProblemKind::AC, ProblemKind::ACprime, ProblemKind::WO, ProblemKind::ZL}) {
        std::vector<SetValue> instances = problem_instances(p, 2, 3);
        std::size_t tested = 0;
        for (const SetValue& x : instances) {
            if (!in_domain(p, x)) continue;
            if (transitive_members(x).size() + 1 > 12) continue;
            ++tested;
            std::vector<SetValue> solutions = oracles::enumerate_solutions(p, x);
            auto is_solution = [&](const SetValue& y) {
                return std::binary_search(solutions.begin(), solutions.end(), y);
            };
            for (const SetValue& y : solutions) CHECK(check(p, x, y));
            // perturbations: drop an element, add a foreign one, the empty set
            std::vector<SetValue> candidates;
            for (const SetValue& y : solutions) {
                for (const SetValue& m : y.children()) candidates.push_back(set_erase(y, m));
                candidates.push_back(set_insert(y, sv("{{{{}}}}")));
            }
            candidates.push_back(SetValue());
            candidates.push_back(x);
            for (const SetValue& y : candidates) CHECK(check(p, x, y) == is_solution(y));
        }
        CHECK(tested > 0);
    }
}

TEST_CASE("ZL maximality against pairwise comparison") {
    std::vector<SetValue> elems{sv("{}"), sv("{{}}"), sv("{{{}}}")};
    SetValue chain = chain_poset(elems);
    CHECK(canonify(ProblemKind::ZL, chain) == elems[2]);
    CHECK(oracles::enumerate_solutions(ProblemKind::ZL, chain) ==
          std::vector<SetValue>{elems[2]});

    SetValue anti = antichain_poset(elems);
    auto maxima = oracles::enumerate_solutions(ProblemKind::ZL, anti);
    CHECK(maxima.size() == 3);
    CHECK(canonify(ProblemKind::ZL, anti) == elems[0]);
    CHECK(canonify_adversarial(ProblemKind::ZL, anti) == elems[2]);
}

TEST_CASE("instance generator is deterministic and sized as documented") {
    auto zl = problem_instances(ProblemKind::ZL, 2, 4);
    CHECK(zl.size() == 317);  // 4*1 + 6*3 + 4*19 + 1*219 posets on <= 4 points
    CHECK(zl == problem_instances(ProblemKind::ZL, 2, 4));
    for (const SetValue& x : zl) CHECK(in_domain(ProblemKind::ZL, x));

    auto ac = problem_instances(ProblemKind::AC, 2, 4);
    CHECK(ac.size() == 16);
    auto acp = problem_instances(ProblemKind::ACprime, 2, 4);
    CHECK(acp.size() == 5);
    for (const SetValue& x : acp) CHECK(in_domain(ProblemKind::ACprime, x));
}

TEST_CASE("code oracle answers only on valid codes") {
    CodeOracle g = code_oracle(canonical_canonification(ProblemKind::AC), 0);
    Code valid = encode_canonical(sv("{{{}}}"));
    auto reply = g.fn(valid);
    REQUIRE(reply);
    CHECK(decode(*reply) == canonify(ProblemKind::AC, sv("{{{}}}")));
    Code cycle(std::vector<Ordinal>{Ordinal::finite(1), Ordinal::finite(2)});
    CHECK(!g.fn(cycle));

    // seeded oracles re-encode the same value
    CodeOracle g2 = code_oracle(canonical_canonification(ProblemKind::AC), 5);
    auto reply2 = g2.fn(valid);
    REQUIRE(reply2);
    CHECK(decode(*reply2) == decode(*reply));
}
