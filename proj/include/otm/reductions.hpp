#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "otm/code.hpp"
#include "otm/errors.hpp"
#include "otm/hfset.hpp"
#include "otm/problems.hpp"
#include "otm/program.hpp"
#include "otm/vm.hpp"

namespace otm {

// Reducibility harnesses. A code transformer maps codes to codes
// deterministically, realized either by a machine program run on the vm or by
// a registered host procedure obeying the same contract. Oracle access, where
// permitted, goes through the same miracle interface in both forms.

struct CodeTransformer {
    enum class Form { HostProcedure, MachineProgram };

    std::string name;
    Form form = Form::HostProcedure;
    std::function<Code(const Code&, const CodeOracle*, const Fuel&)> host;
    Program program;
    bool needs_oracle = false;

    Code apply(const Code& input, const CodeOracle* oracle, const Fuel& fuel = Fuel{}) const {
        if (form == Form::HostProcedure) return host(input, oracle, fuel);
        RunResult result = run(program, input, oracle, fuel);
        return output_code(result);
    }
};

/// Executes t with miracle calls answered by g.
inline Code run_relative(const CodeTransformer& t, const CodeOracle& g, const Code& c,
                         const Fuel& fuel = Fuel{}) {
    return t.apply(c, &g, fuel);
}

/// A (P, Q) pair witnessing source <=_gW target. Neither transformer may
/// invoke an oracle; the single canonification use happens between them.
struct GwWitness {
    std::string name;
    ProblemKind source = ProblemKind::AC;
    ProblemKind target = ProblemKind::AC;
    CodeTransformer pre;   // Q: instance translation
    CodeTransformer post;  // P: solution translation
};

/// An oracle-relative procedure (plain reducibility, not gW).
struct RelativeProcedure {
    std::string name;
    ProblemKind source = ProblemKind::WO;
    ProblemKind target = ProblemKind::AC;
    CodeTransformer transform;  // needs_oracle
};

/// [P, F, Q](x): encode x canonically, run Q, apply the canonification to the
/// decoded intermediate set, re-encode its value under every seed (0 means
/// the canonical code) and run P on each; all seeds must give the same set.
inline SetValue run_gw(const GwWitness& w, const Canonification& f, const SetValue& x,
                       const std::vector<std::uint64_t>& seeds = {0, 1, 2, 3},
                       const Fuel& fuel = Fuel{}) {
    if (!in_domain(w.source, x))
        throw Error("precondition-violation",
                    set_to_text(x) + " is not in the domain of " + problem_name(w.source));
    if (seeds.empty()) throw Error("precondition-violation", "run_gw needs at least one seed");
    Code c = encode_canonical(x);
    Code c1 = w.pre.apply(c, nullptr, fuel);
    SetValue y = decode(c1);
    SetValue fy = f.fn(y);
    std::optional<SetValue> z;
    for (std::uint64_t seed : seeds) {
        Code c2 = seed == 0 ? encode_canonical(fy) : encode_with_seed(fy, seed);
        Code c3 = w.post.apply(c2, nullptr, fuel);
        SetValue zs = decode(c3);
        if (!z)
            z = zs;
        else if (!(*z == zs))
            throw Error("mismatch-across-encodings",
                        w.name + " gave different outputs under different codes of " +
                            set_to_text(fy));
    }
    return *z;
}

/// Witness for transitivity: first w1's translation then w2's, and the
/// solution path back through w2 then w1.
inline GwWitness compose(const GwWitness& w1, const GwWitness& w2) {
    if (w1.target != w2.source)
        throw Error("problem-mismatch", w1.name + " targets " + problem_name(w1.target) +
                                            " but " + w2.name + " starts from " +
                                            problem_name(w2.source));
    auto seq = [](std::string name, const CodeTransformer& first, const CodeTransformer& second) {
        CodeTransformer t;
        t.name = std::move(name);
        t.form = CodeTransformer::Form::HostProcedure;
        t.host = [first, second](const Code& c, const CodeOracle* oracle, const Fuel& fuel) {
            return second.apply(first.apply(c, oracle, fuel), oracle, fuel);
        };
        return t;
    };
    GwWitness w;
    w.name = w1.name + "." + w2.name;
    w.source = w1.source;
    w.target = w2.target;
    w.pre = seq(w.name + ".pre", w1.pre, w2.pre);
    w.post = seq(w.name + ".post", w2.post, w1.post);
    return w;
}

// --- Bundled transformers and witnesses --------------------------------------

/// Mirrors the scratch tape to the output tape, running to the first limit to
/// cover the whole (finite) input support, then halts. The miracle tape's
/// cell 0 is used as a limit flag: sweep steps see it high, the limit sees it
/// low.
inline const char* copy_program_text() {
    return "; copy scratch to output\n"
           "#halt 9\n"
           "0 0 0 0 -> 0 0 1 S S S 1\n"
           "0 1 0 0 -> 1 0 1 S S S 1\n"
           "1 0 0 1 -> 0 0 0 R R S 2\n"
           "1 1 0 1 -> 1 1 0 R R S 2\n"
           "2 0 0 0 -> 0 0 1 S S S 1\n"
           "2 1 0 0 -> 1 0 1 S S S 1\n"
           "1 0 0 0 -> 0 0 0 S S S 9\n";
}

inline const Program& copy_program() {
    static const Program prog = parse_program(copy_program_text());
    return prog;
}

/// Copies scratch to the miracle tape, applies the miracle once, then copies
/// the miracle tape to the output tape. Each copy phase marches to a limit;
/// rewinding exploits the left-move reset at limit cells.
inline const char* miracle_relay_program_text() {
    return "; scratch -> miracle, MIRACLE, miracle -> output\n"
           "#halt 9\n"
           "; phase 1: raise flag on output cell 0, then sweep scratch to miracle\n"
           "0 0 0 0 -> 0 1 0 S S S 1\n"
           "0 1 0 0 -> 1 1 0 S S S 1\n"
           "1 0 1 0 -> 0 0 0 R S R 2\n"
           "1 1 1 0 -> 1 0 1 R S R 2\n"
           "2 0 0 0 -> 0 1 0 S S S 1\n"
           "2 1 0 0 -> 1 1 0 S S S 1\n"
           "; at the limit the flag reads 0: rewind scratch and miracle heads\n"
           "1 0 0 0 -> 0 0 0 L S L 3\n"
           "3 * -> MIRACLE 4\n"
           "; phase 2: raise flag on scratch cell 0, then sweep miracle to output\n"
           "4 0 0 0 -> 1 0 0 S S S 5\n"
           "4 0 0 1 -> 1 0 1 S S S 5\n"
           "4 1 0 0 -> 1 0 0 S S S 5\n"
           "4 1 0 1 -> 1 0 1 S S S 5\n"
           "5 1 0 0 -> 0 0 0 S R R 6\n"
           "5 1 0 1 -> 0 1 1 S R R 6\n"
           "6 0 0 0 -> 1 0 0 S S S 5\n"
           "6 0 0 1 -> 1 0 1 S S S 5\n"
           "5 0 0 0 -> 0 0 0 S S S 9\n";
}

inline const Program& miracle_relay_program() {
    static const Program prog = parse_program(miracle_relay_program_text());
    return prog;
}

inline CodeTransformer vm_transformer(std::string name, const Program& program,
                                      bool needs_oracle = false) {
    CodeTransformer t;
    t.name = std::move(name);
    t.form = CodeTransformer::Form::MachineProgram;
    t.program = program;
    t.needs_oracle = needs_oracle;
    return t;
}

inline CodeTransformer host_transformer(std::string name,
                                        std::function<SetValue(const SetValue&)> fn) {
    CodeTransformer t;
    t.name = std::move(name);
    t.form = CodeTransformer::Form::HostProcedure;
    t.host = [name = t.name, fn](const Code& c, const CodeOracle*, const Fuel&) {
        return encode_canonical(fn(decode(c)));
    };
    return t;
}

namespace detail {

/// Appends the (0, 0) pair turning a choice graph into a full AC witness.
inline SetValue append_empty_choice(const SetValue& graph) {
    auto pairs = as_pair_set(graph);
    if (!pairs)
        throw Error("precondition-violation", "expected a set of ordered pairs");
    return set_insert(graph, kpair(SetValue(), SetValue()));
}

/// All partial choice functions on x, as sets of (member, pick) pairs.
inline std::vector<SetValue> partial_choice_functions(const SetValue& x) {
    std::vector<SetValue> nonempty;
    for (const SetValue& z : x.children())
        if (!z.empty()) nonempty.push_back(z);
    std::vector<std::vector<SetValue>> acc{{}};
    for (const SetValue& z : nonempty) {
        std::vector<std::vector<SetValue>> next;
        for (const auto& partial : acc) {
            next.push_back(partial);  // z unassigned
            for (const SetValue& e : z.children()) {
                auto extended = partial;
                extended.push_back(kpair(z, e));
                next.push_back(std::move(extended));
            }
        }
        acc = std::move(next);
        if (acc.size() > 200000)
            throw Error("unsupported-range", "partial choice poset too large");
    }
    std::vector<SetValue> out;
    out.reserve(acc.size());
    for (auto& pairs : acc) out.push_back(SetValue(std::move(pairs)));
    return out;
}

inline bool subset_of(const SetValue& a, const SetValue& b) {
    for (const SetValue& m : a.children())
        if (!b.contains(m)) return false;
    return true;
}

}  // namespace detail

/// AC' <=_gW AC. Q is the identity (run on the vm); P turns the choice
/// function for x into the transversal of its values.
inline GwWitness acp_from_ac_witness() {
    GwWitness w;
    w.name = "acp_from_ac";
    w.source = ProblemKind::ACprime;
    w.target = ProblemKind::AC;
    w.pre = vm_transformer("acp_from_ac.pre(copy)", copy_program());
    w.post = host_transformer("acp_from_ac.post", [](const SetValue& f) {
        auto pairs = as_function(f);
        if (!pairs) throw Error("precondition-violation", "expected a choice function");
        std::vector<SetValue> picks;
        for (const auto& [a, b] : *pairs)
            if (!a.empty()) picks.push_back(b);
        return SetValue(std::move(picks));
    });
    return w;
}

/// AC <=_gW AC'. Q tags each nonempty member z as {z} x z, making the family
/// disjoint; a transversal of the tagged family is the choice graph itself.
inline GwWitness ac_from_acp_witness() {
    GwWitness w;
    w.name = "ac_from_acp";
    w.source = ProblemKind::AC;
    w.target = ProblemKind::ACprime;
    w.pre = host_transformer("ac_from_acp.pre", [](const SetValue& x) {
        std::vector<SetValue> tagged;
        for (const SetValue& z : x.children()) {
            if (z.empty()) continue;
            std::vector<SetValue> product;
            for (const SetValue& e : z.children()) product.push_back(kpair(z, e));
            tagged.push_back(SetValue(std::move(product)));
        }
        return SetValue(std::move(tagged));
    });
    w.post = host_transformer("ac_from_acp.post", detail::append_empty_choice);
    return w;
}

/// AC <=_gW ZL via the inclusion-ordered poset of partial choice functions;
/// its maximal elements are exactly the total choice functions.
inline GwWitness ac_from_zl_witness() {
    GwWitness w;
    w.name = "ac_from_zl";
    w.source = ProblemKind::AC;
    w.target = ProblemKind::ZL;
    w.pre = host_transformer("ac_from_zl.pre", [](const SetValue& x) {
        std::vector<SetValue> pcfs = detail::partial_choice_functions(x);
        std::vector<SetValue> rel;
        for (const SetValue& p : pcfs)
            for (const SetValue& q : pcfs)
                if (detail::subset_of(p, q)) rel.push_back(kpair(p, q));
        return kpair(SetValue(pcfs), SetValue(std::move(rel)));
    });
    w.post = host_transformer("ac_from_zl.post", detail::append_empty_choice);
    return w;
}

/// ZL <=_gW WO. Q passes the carrier along with the instance itself; after
/// the well-ordering arrives, P climbs greedily: always the well-order-least
/// element strictly above the chain so far, returning the final element.
inline GwWitness zl_from_wo_witness() {
    GwWitness w;
    w.name = "zl_from_wo";
    w.source = ProblemKind::ZL;
    w.target = ProblemKind::WO;
    w.pre = host_transformer("zl_from_wo.pre", [](const SetValue& x) {
        auto poset = as_poset(x);
        if (!poset) throw Error("precondition-violation", "expected a poset pair");
        return set_insert(poset->carrier, x);
    });
    w.post = host_transformer("zl_from_wo.post", [](const SetValue& f) {
        auto pairs = as_function(f);
        if (!pairs) throw Error("precondition-violation", "expected a well-ordering");
        std::vector<SetValue> order(pairs->size());
        for (const auto& [a, b] : *pairs) {
            auto k = as_vn(a);
            if (!k || *k >= order.size())
                throw Error("precondition-violation", "well-ordering domain is not an ordinal");
            order[*k] = b;
        }
        SetValue y(order);
        // The instance rides along as the unique member that is a pair whose
        // first component is everything else; foundation rules out impostors.
        std::optional<SetValue> instance;
        for (const SetValue& e : y.children()) {
            auto kp = split_kpair(e);
            if (kp && kp->first == set_erase(y, e)) {
                instance = e;
                break;
            }
        }
        if (!instance)
            throw Error("precondition-violation", "well-ordered set does not carry its instance");
        auto poset = as_poset(*instance);
        if (!poset) throw Error("precondition-violation", "carried instance is not a poset pair");
        std::vector<SetValue> chain;
        auto in_chain = [&](const SetValue& e) {
            for (const SetValue& c : chain)
                if (c == e) return true;
            return false;
        };
        while (true) {
            std::optional<SetValue> next;
            for (const SetValue& e : order) {
                if (e == *instance || in_chain(e)) continue;
                bool above_all = true;
                for (const SetValue& c : chain)
                    if (!poset->related(c, e)) {
                        above_all = false;
                        break;
                    }
                if (above_all) {
                    next = e;
                    break;
                }
            }
            if (!next) break;
            chain.push_back(*next);
        }
        if (chain.empty()) throw Error("precondition-violation", "empty poset carrier");
        return chain.back();
    });
    return w;
}

/// WO <= AC as an oracle-relative procedure: repeatedly asks the oracle for a
/// choice on {remainder}, removes the chosen element and records it; the
/// accumulated graph is a bijection between |x| and x.
inline RelativeProcedure wo_from_ac_procedure() {
    RelativeProcedure p;
    p.name = "wo_from_ac";
    p.source = ProblemKind::WO;
    p.target = ProblemKind::AC;
    CodeTransformer t;
    t.name = "wo_from_ac.transform";
    t.form = CodeTransformer::Form::HostProcedure;
    t.needs_oracle = true;
    t.host = [](const Code& c, const CodeOracle* oracle, const Fuel&) {
        if (!oracle) throw Error("missing-oracle", "wo_from_ac needs an oracle");
        SetValue x = decode(c);
        SetValue remainder = x;
        std::vector<SetValue> graph;
        std::uint64_t index = 0;
        while (!remainder.empty()) {
            Code query = encode_canonical(singleton(remainder));
            std::optional<Code> reply = oracle->fn(query);
            if (!reply)
                throw Error("oracle-undefined",
                            oracle->name + " has no value for " + code_to_text(query));
            SetValue f = decode(*reply);
            auto pairs = as_function(f);
            if (!pairs) throw Error("oracle-undefined", "oracle reply is not a choice function");
            auto pick = apply_function(*pairs, remainder);
            if (!pick || !remainder.contains(*pick))
                throw Error("oracle-undefined", "oracle reply does not choose from the remainder");
            graph.push_back(kpair(vn(index), *pick));
            remainder = set_erase(remainder, *pick);
            ++index;
        }
        return encode_canonical(SetValue(std::move(graph)));
    };
    p.transform = t;
    return p;
}

/// Reflexivity witness: both transformers are the machine copy program.
inline GwWitness identity_witness(ProblemKind p) {
    GwWitness w;
    w.name = std::string("identity_") + problem_name(p);
    w.source = p;
    w.target = p;
    w.pre = vm_transformer(w.name + ".pre(copy)", copy_program());
    w.post = vm_transformer(w.name + ".post(copy)", copy_program());
    return w;
}

/// Negative control: the solution path returns its input unchanged.
inline GwWitness sabotage(GwWitness w) {
    w.name = w.name + ".sabotaged";
    w.post = CodeTransformer{w.name + ".post(identity)", CodeTransformer::Form::HostProcedure,
                             [](const Code& c, const CodeOracle*, const Fuel&) { return c; },
                             Program{}, false};
    return w;
}

inline std::vector<std::string> bundled_witness_names() {
    return {"wo_from_ac", "zl_from_wo", "acp_from_ac", "ac_from_acp", "ac_from_zl"};
}

inline std::optional<GwWitness> bundled_gw_witness(std::string_view name) {
    if (name == "zl_from_wo") return zl_from_wo_witness();
    if (name == "acp_from_ac") return acp_from_ac_witness();
    if (name == "ac_from_acp") return ac_from_acp_witness();
    if (name == "ac_from_zl") return ac_from_zl_witness();
    return std::nullopt;
}

inline std::optional<RelativeProcedure> bundled_relative_procedure(std::string_view name) {
    if (name == "wo_from_ac") return wo_from_ac_procedure();
    return std::nullopt;
}

// --- Suite verification -------------------------------------------------------

struct SuiteOptions {
    std::vector<std::uint64_t> seeds{0, 1, 2, 3};
    Fuel fuel;
    unsigned jobs = 1;
};

struct InstanceResult {
    SetValue instance;
    bool pass = false;
    std::uint64_t oracle_calls = 0;
    std::string detail;
};

struct SuiteReport {
    std::string witness;
    std::string canonification;
    std::vector<InstanceResult> rows;

    bool all_pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }
    std::size_t failures() const {
        std::size_t n = 0;
        for (const auto& r : rows)
            if (!r.pass) ++n;
        return n;
    }
};

namespace detail {

template <typename Fn>
void for_each_indexed(std::size_t count, unsigned jobs, Fn&& fn) {
    if (jobs <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j + 1 < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

}  // namespace detail

/// Runs a gW witness over every in-domain instance and checks the source
/// relation on the result. Failures become report rows, never exceptions.
inline SuiteReport verify_suite(const GwWitness& w, const Canonification& f,
                                const std::vector<SetValue>& instances,
                                const SuiteOptions& options = SuiteOptions{}) {
    SuiteReport report;
    report.witness = w.name;
    report.canonification = f.name;
    std::vector<const SetValue*> domain;
    for (const SetValue& x : instances)
        if (in_domain(w.source, x)) domain.push_back(&x);
    report.rows.resize(domain.size());
    detail::for_each_indexed(domain.size(), options.jobs, [&](std::size_t i) {
        const SetValue& x = *domain[i];
        InstanceResult row;
        row.instance = x;
        row.oracle_calls = 1;  // the one canonification application
        try {
            SetValue z = run_gw(w, f, x, options.seeds, options.fuel);
            row.pass = check(w.source, x, z);
            if (!row.pass) row.detail = "output " + set_to_text(z) + " fails the source relation";
        } catch (const Error& e) {
            row.pass = false;
            row.detail = e.what();
        }
        report.rows[i] = std::move(row);
    });
    return report;
}

/// Oracle-relative analogue: every seed drives both the input re-encoding and
/// the oracle's output encoding; results must agree across seeds.
inline SuiteReport verify_suite(const RelativeProcedure& proc, const Canonification& f,
                                const std::vector<SetValue>& instances,
                                const SuiteOptions& options = SuiteOptions{}) {
    SuiteReport report;
    report.witness = proc.name;
    report.canonification = f.name;
    std::vector<const SetValue*> domain;
    for (const SetValue& x : instances)
        if (in_domain(proc.source, x)) domain.push_back(&x);
    report.rows.resize(domain.size());
    detail::for_each_indexed(domain.size(), options.jobs, [&](std::size_t i) {
        const SetValue& x = *domain[i];
        InstanceResult row;
        row.instance = x;
        try {
            std::optional<SetValue> agreed;
            for (std::uint64_t seed : options.seeds) {
                std::uint64_t calls = 0;
                CodeOracle base = code_oracle(f, seed);
                CodeOracle counting{base.name, [&](const Code& q) {
                                        ++calls;
                                        return base.fn(q);
                                    }};
                Code input = seed == 0 ? encode_canonical(x) : encode_with_seed(x, seed);
                Code out = run_relative(proc.transform, counting, input, options.fuel);
                SetValue z = decode(out);
                if (!agreed)
                    agreed = z;
                else if (!(*agreed == z))
                    throw Error("mismatch-across-encodings",
                                proc.name + " output depends on the choice of codes");
                row.oracle_calls = calls;
                if (calls != x.size())
                    throw Error("oracle-call-count",
                                "expected " + std::to_string(x.size()) + " oracle calls, saw " +
                                    std::to_string(calls));
            }
            row.pass = check(proc.source, x, *agreed);
            if (!row.pass)
                row.detail = "output " + set_to_text(*agreed) + " fails the source relation";
        } catch (const Error& e) {
            row.pass = false;
            row.detail = e.what();
        }
        report.rows[i] = std::move(row);
    });
    return report;
}

inline std::string report_to_text(const SuiteReport& report) {
    std::string out = "# suite=" + report.witness + " canonification=" + report.canonification +
                      " instances=" + std::to_string(report.rows.size()) + "\n";
    for (const auto& row : report.rows) {
        out += "instance=" + set_to_text(row.instance);
        out += row.pass ? " verdict=pass" : " verdict=fail";
        out += " oracle_calls=" + std::to_string(row.oracle_calls);
        if (!row.pass && !row.detail.empty()) out += " detail=\"" + row.detail + "\"";
        out += "\n";
    }
    return out;
}

}  // namespace otm
