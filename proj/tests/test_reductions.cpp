#include <catch2/catch_amalgamated.hpp>

#include "otm/reductions.hpp"
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

Code code_of(std::initializer_list<std::uint64_t> xs) {
    std::vector<Ordinal> es;
    for (auto x : xs) es.push_back(Ordinal::finite(x));
    return Code(std::move(es));
}

}  // namespace

TEST_CASE("run_relative with an unused oracle") {
    CodeOracle g = code_oracle(canonical_canonification(ProblemKind::AC));
    CodeTransformer copy = vm_transformer("copy", copy_program());
    CHECK(run_relative(copy, g, code_of({2})) == code_of({2}));
}

TEST_CASE("run_relative through the machine relay") {
    CodeOracle g = code_oracle(canonical_canonification(ProblemKind::AC));
    CodeTransformer relay = vm_transformer("relay", miracle_relay_program(), true);
    SetValue x = sv("{{{}}}");
    Code d = run_relative(relay, g, encode_canonical(x));
    CHECK(decode(d) == canonify(ProblemKind::AC, x));
}

TEST_CASE("run_relative surfaces an undefined oracle") {
    CodeOracle never{"never", [](const Code&) { return std::nullopt; }};
    RelativeProcedure wo = wo_from_ac_procedure();
    CHECK_THROWS_WITH(run_relative(wo.transform, never, encode_canonical(sv("{{}}"))),
                      Catch::Matchers::ContainsSubstring("oracle"));
    // the machine form reports miracle-undefined through its run outcome
    CodeTransformer relay = vm_transformer("relay", miracle_relay_program(), true);
    CHECK_THROWS_WITH(run_relative(relay, never, code_of({2})),
                      Catch::Matchers::ContainsSubstring("miracle-undefined"));
}

TEST_CASE("wo_from_ac builds a bijection with one call per element") {
    SetValue x = sv("{{},{{}},{{{}}}}");
    std::uint64_t calls = 0;
    CodeOracle base = code_oracle(canonical_canonification(ProblemKind::AC));
    CodeOracle counting{base.name, [&](const Code& q) {
                            ++calls;
                            return base.fn(q);
                        }};
    RelativeProcedure wo = wo_from_ac_procedure();
    SetValue f = decode(run_relative(wo.transform, counting, encode_canonical(x)));
    CHECK(calls == 3);
    CHECK(check(ProblemKind::WO, x, f));
    // canonical choices remove the least element first
    SetValue expected = SetValue({kpair(vn(0), sv("{}")), kpair(vn(1), sv("{{}}")),
                                  kpair(vn(2), sv("{{{}}}"))});
    CHECK(f == expected);
}

TEST_CASE("run_gw rejects instances outside the source domain") {
    CHECK_THROWS_WITH(
        run_gw(zl_from_wo_witness(), canonical_canonification(ProblemKind::WO), sv("{{}}")),
        Catch::Matchers::ContainsSubstring("domain"));
}

TEST_CASE("zl_from_wo picks the well-order-first maximal point") {
    std::vector<SetValue> ab{sv("{}"), sv("{{}}")};
    SetValue anti = antichain_poset(ab);
    SetValue z = run_gw(zl_from_wo_witness(), canonical_canonification(ProblemKind::WO), anti);
    CHECK(z == ab[0]);
    SetValue z_adv =
        run_gw(zl_from_wo_witness(), adversarial_canonification(ProblemKind::WO), anti);
    CHECK(check(ProblemKind::ZL, anti, z_adv));

    std::vector<SetValue> elems{sv("{}"), sv("{{}}"), sv("{{{}}}")};
    SetValue chain = chain_poset(elems);
    CHECK(run_gw(zl_from_wo_witness(), canonical_canonification(ProblemKind::WO), chain) ==
          elems[2]);
    CHECK(run_gw(zl_from_wo_witness(), adversarial_canonification(ProblemKind::WO), chain) ==
          elems[2]);
}

TEST_CASE("acp_from_ac on a singleton family") {
    SetValue x = sv("{{{}}}");
    SetValue z = run_gw(acp_from_ac_witness(), canonical_canonification(ProblemKind::AC), x);
    CHECK(z == sv("{{}}"));
}

TEST_CASE("ac_from_acp and ac_from_zl produce choice functions") {
    SetValue x = sv("{{{},{{}}}}");
    for (const GwWitness& w : {ac_from_acp_witness(), ac_from_zl_witness()}) {
        Canonification f = canonical_canonification(w.target);
        SetValue z1 = run_gw(w, f, x, {0, 1, 2, 3});
        CHECK(check(ProblemKind::AC, x, z1));
        SetValue z2 = run_gw(w, f, x, {4, 5, 6});
        CHECK(z1 == z2);  // stable across re-encodings
    }
    // the empty instance still gets the trivial function
    SetValue ze =
        run_gw(ac_from_zl_witness(), canonical_canonification(ProblemKind::ZL), sv("{}"));
    CHECK(check(ProblemKind::AC, sv("{}"), ze));
}

TEST_CASE("identity witness and composition") {
    std::vector<SetValue> ab{sv("{}"), sv("{{}}")};
    SetValue anti = antichain_poset(ab);
    GwWitness idzl = identity_witness(ProblemKind::ZL);
    SetValue direct = run_gw(idzl, canonical_canonification(ProblemKind::ZL), anti);
    CHECK(check(ProblemKind::ZL, anti, direct));

    // composing with the reflexivity witness changes nothing, suite-wide
    GwWitness composed = compose(idzl, zl_from_wo_witness());
    Canonification f = canonical_canonification(ProblemKind::WO);
    for (const SetValue& x : problem_instances(ProblemKind::ZL, 2, 3))
        CHECK(run_gw(composed, f, x) == run_gw(zl_from_wo_witness(), f, x));

    CHECK_THROWS_WITH(compose(zl_from_wo_witness(), zl_from_wo_witness()),
                      Catch::Matchers::ContainsSubstring("problem-mismatch"));
}

TEST_CASE("encoding-dependent outputs are reported as mismatches") {
    // a post step that leaks the concrete code it received
    GwWitness leaky = zl_from_wo_witness();
    leaky.name = "leaky";
    leaky.post = CodeTransformer{
        "leaky.post", CodeTransformer::Form::HostProcedure,
        [](const Code& c, const CodeOracle*, const Fuel&) {
            std::uint64_t top = c.elements().empty() ? 0 : c.elements().back().finite_value();
            return encode_canonical(vn(top % 5));
        },
        Program{}, false};
    std::vector<SetValue> elems{sv("{}"), sv("{{}}"), sv("{{{}}}")};
    SetValue chain = chain_poset(elems);
    CHECK_THROWS_WITH(
        run_gw(leaky, canonical_canonification(ProblemKind::WO), chain, {0, 1, 2, 3}),
        Catch::Matchers::ContainsSubstring("mismatch-across-encodings"));
}

TEST_CASE("composed witness passes its suite") {
    GwWitness w = compose(acp_from_ac_witness(), ac_from_zl_witness());
    CHECK(w.source == ProblemKind::ACprime);
    CHECK(w.target == ProblemKind::ZL);
    auto instances = problem_instances(ProblemKind::ACprime, 2, 4);
    SuiteReport report =
        verify_suite(w, canonical_canonification(ProblemKind::ZL), instances);
    CHECK(report.all_pass());
    CHECK(!report.rows.empty());
}

TEST_CASE("verify_suite over the bundled witnesses") {
    SuiteOptions options;
    options.seeds = {0, 1, 2};
    for (const std::string& name : bundled_witness_names()) {
        if (auto gw = bundled_gw_witness(name)) {
            auto instances = problem_instances(gw->source, 2, 3);
            SuiteReport r = verify_suite(*gw, canonical_canonification(gw->target), instances,
                                         options);
            INFO(name << "\n" << report_to_text(r));
            CHECK(r.all_pass());
            CHECK(!r.rows.empty());
        } else if (auto rel = bundled_relative_procedure(name)) {
            auto instances = problem_instances(rel->source, 2, 3);
            SuiteReport r = verify_suite(*rel, canonical_canonification(rel->target), instances,
                                         options);
            INFO(name << "\n" << report_to_text(r));
            CHECK(r.all_pass());
            for (const auto& row : r.rows) CHECK(row.oracle_calls == row.instance.size());
        }
    }
}

TEST_CASE("sabotaged witness fails somewhere") {
    GwWitness bad = sabotage(zl_from_wo_witness());
    auto instances = problem_instances(ProblemKind::ZL, 2, 3);
    SuiteReport r =
        verify_suite(bad, canonical_canonification(ProblemKind::WO), instances);
    CHECK(!r.all_pass());
    CHECK(r.failures() > 0);
}

TEST_CASE("empty generator gives an empty passing report") {
    SuiteReport r = verify_suite(zl_from_wo_witness(),
                                 canonical_canonification(ProblemKind::WO), {});
    CHECK(r.rows.empty());
    CHECK(r.all_pass());
}

TEST_CASE("parallel verification is deterministic") {
    auto instances = problem_instances(ProblemKind::ZL, 2, 3);
    SuiteOptions serial;
    SuiteOptions parallel;
    parallel.jobs = 4;
    SuiteReport a = verify_suite(zl_from_wo_witness(),
                                 canonical_canonification(ProblemKind::WO), instances, serial);
    SuiteReport b = verify_suite(zl_from_wo_witness(),
                                 canonical_canonification(ProblemKind::WO), instances, parallel);
    CHECK(report_to_text(a) == report_to_text(b));
}
