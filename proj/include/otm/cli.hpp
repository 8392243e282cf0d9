#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "otm/code.hpp"
#include "otm/errors.hpp"
#include "otm/hfset.hpp"
#include "otm/ordinal.hpp"
#include "otm/problems.hpp"
#include "otm/program.hpp"
#include "otm/reductions.hpp"
#include "otm/vm.hpp"

namespace otm {

// Command-line front end. Exit codes: 0 success, 1 verification or run
// failure, 2 usage or parse errors. All randomness is seed-derived; identical
// invocations produce byte-identical output.

namespace cli_detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io-error", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::vector<std::uint64_t> seed_list(std::uint64_t count) {
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 0; s < count; ++s) seeds.push_back(s);
    return seeds;
}

inline std::string seeds_text(const std::vector<std::uint64_t>& seeds) {
    std::string out;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(seeds[i]);
    }
    return out;
}

struct VerifyTotals {
    std::size_t instances = 0;
    std::size_t failures = 0;
};

inline void print_report(std::ostream& out, const SuiteReport& report, VerifyTotals& totals) {
    out << report_to_text(report);
    totals.instances += report.rows.size();
    totals.failures += report.failures();
}

}  // namespace cli_detail

inline int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ordinal machine laboratory"};
    app.require_subcommand(1);

    // asm
    auto* cmd_asm = app.add_subcommand("asm", "validate and canonicalize a program");
    std::string asm_file;
    cmd_asm->add_option("file", asm_file, "program source")->required();

    // shared machine flags
    std::uint64_t max_steps = 20000, max_jumps = 64;
    std::size_t window = 24;
    auto add_fuel = [&](CLI::App* cmd) {
        cmd->add_option("--max-steps", max_steps, "successor steps per segment");
        cmd->add_option("--max-jumps", max_jumps, "limit jumps");
        cmd->add_option("--window", window, "cycle detection window");
    };

    // run
    auto* cmd_run = app.add_subcommand("run", "run a program on an input");
    std::string run_program, run_input, run_code, run_oracle;
    bool run_trace = false, adversarial = false;
    cmd_run->add_option("--program", run_program, "program file")->required();
    cmd_run->add_option("--input", run_input, "input as a set literal");
    cmd_run->add_option("--code", run_code, "input as a raw code literal");
    cmd_run->add_option("--oracle", run_oracle, "answer miracles with this problem (ac|acp|wo|zl)");
    cmd_run->add_flag("--adversarial", adversarial, "use the adversarial canonification");
    cmd_run->add_flag("--trace", run_trace, "emit the machine trace");
    add_fuel(cmd_run);

    // reduce
    auto* cmd_reduce = app.add_subcommand("reduce", "execute a named witness on an instance");
    std::string reduce_witness, reduce_input;
    std::uint64_t seed_count = 4;
    cmd_reduce->add_option("--witness", reduce_witness, "witness name")->required();
    cmd_reduce->add_option("--input", reduce_input, "instance as a set literal")->required();
    cmd_reduce->add_option("--seeds", seed_count, "number of re-encoding seeds");
    cmd_reduce->add_flag("--adversarial", adversarial, "use the adversarial canonification");
    add_fuel(cmd_reduce);

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "verify a witness over a generated suite");
    std::string verify_witness;
    std::size_t max_rank = 2, max_carrier = 4;
    unsigned jobs = 1;
    bool canonical_only = false;
    cmd_verify->add_option("--witness", verify_witness, "witness name")->required();
    cmd_verify->add_option("--max-rank", max_rank, "element rank bound");
    cmd_verify->add_option("--max-carrier", max_carrier, "carrier size bound");
    cmd_verify->add_option("--seeds", seed_count, "number of re-encoding seeds");
    cmd_verify->add_option("--jobs", jobs, "parallel workers");
    cmd_verify->add_flag("--canonical-only", canonical_only, "skip the adversarial canonification");
    add_fuel(cmd_verify);

    // gen
    auto* cmd_gen = app.add_subcommand("gen", "emit an instance suite");
    std::string gen_problem;
    cmd_gen->add_option("--problem", gen_problem, "problem name (ac|acp|wo|zl)")->required();
    cmd_gen->add_option("--max-rank", max_rank, "element rank bound");
    cmd_gen->add_option("--max-carrier", max_carrier, "carrier size bound");

    std::vector<const char*> argv{"otmlab"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    Fuel fuel{max_steps, max_jumps, window};

    try {
        if (cmd_asm->parsed()) {
            Program p = parse_program(cli_detail::read_file(asm_file));
            out << print_program(p);
            return 0;
        }

        if (cmd_run->parsed()) {
            Program p = parse_program(cli_detail::read_file(run_program));
            if (run_input.empty() == run_code.empty()) {
                err << "usage error: exactly one of --input or --code is required\n";
                return 2;
            }
            Code input = run_code.empty() ? encode_canonical(set_from_text(run_input))
                                          : code_from_text(run_code);
            std::optional<CodeOracle> oracle;
            if (!run_oracle.empty()) {
                auto kind = problem_from_name(run_oracle);
                if (!kind) {
                    err << "usage error: unknown problem " << run_oracle << "\n";
                    return 2;
                }
                oracle = code_oracle(adversarial ? adversarial_canonification(*kind)
                                                 : canonical_canonification(*kind));
            }
            RunResult r = run(p, input, oracle ? &*oracle : nullptr, fuel);
            if (run_trace)
                for (const TraceRecord& rec : r.trace) out << trace_record_to_text(rec) << "\n";
            out << "outcome=" << outcome_name(r.outcome) << "\n";
            if (!r.detail.empty()) out << "detail=" << r.detail << "\n";
            if (r.halted()) {
                Code output = output_code(r);
                out << "output=" << code_to_text(output) << "\n";
                try {
                    out << "decoded=" << set_to_text(decode(output)) << "\n";
                } catch (const Error& e) {
                    out << "decoded=!" << e.kind() << "\n";
                }
            }
            return r.halted() ? 0 : 1;
        }

        if (cmd_reduce->parsed()) {
            SetValue x = set_from_text(reduce_input);
            std::vector<std::uint64_t> seeds = cli_detail::seed_list(seed_count);
            if (auto gw = bundled_gw_witness(reduce_witness)) {
                Canonification f = adversarial ? adversarial_canonification(gw->target)
                                               : canonical_canonification(gw->target);
                SetValue z = run_gw(*gw, f, x, seeds, fuel);
                out << "result=" << set_to_text(z) << "\n";
                return 0;
            }
            if (auto rel = bundled_relative_procedure(reduce_witness)) {
                Canonification f = adversarial ? adversarial_canonification(rel->target)
                                               : canonical_canonification(rel->target);
                std::optional<SetValue> agreed;
                std::uint64_t calls = 0;
                for (std::uint64_t seed : seeds) {
                    calls = 0;
                    CodeOracle base = code_oracle(f, seed);
                    CodeOracle counting{base.name, [&](const Code& q) {
                                            ++calls;
                                            return base.fn(q);
                                        }};
                    Code input = seed == 0 ? encode_canonical(x) : encode_with_seed(x, seed);
                    SetValue z = decode(run_relative(rel->transform, counting, input, fuel));
                    if (!agreed)
                        agreed = z;
                    else if (!(*agreed == z))
                        throw Error("mismatch-across-encodings",
                                    rel->name + " output depends on the choice of codes");
                }
                out << "result=" << set_to_text(*agreed) << "\n";
                out << "oracle_calls=" << calls << "\n";
                return 0;
            }
            err << "usage error: unknown witness " << reduce_witness << "\n";
            return 2;
        }

        if (cmd_verify->parsed()) {
            SuiteOptions options;
            options.seeds = cli_detail::seed_list(seed_count);
            options.fuel = fuel;
            options.jobs = jobs;
            out << "# seeds=" << cli_detail::seeds_text(options.seeds) << " max-rank=" << max_rank
                << " max-carrier=" << max_carrier << "\n";
            cli_detail::VerifyTotals totals;
            auto run_both = [&](auto&& witness, ProblemKind source, ProblemKind target) {
                std::vector<SetValue> instances = problem_instances(source, max_rank, max_carrier);
                cli_detail::print_report(
                    out, verify_suite(witness, canonical_canonification(target), instances, options),
                    totals);
                if (!canonical_only)
                    cli_detail::print_report(
                        out,
                        verify_suite(witness, adversarial_canonification(target), instances, options),
                        totals);
            };
            if (auto gw = bundled_gw_witness(verify_witness)) {
                run_both(*gw, gw->source, gw->target);
            } else if (auto rel = bundled_relative_procedure(verify_witness)) {
                run_both(*rel, rel->source, rel->target);
            } else {
                err << "usage error: unknown witness " << verify_witness << "\n";
                return 2;
            }
            out << "result=" << (totals.failures == 0 ? "pass" : "fail")
                << " instances=" << totals.instances << " failures=" << totals.failures << "\n";
            return totals.failures == 0 ? 0 : 1;
        }

        if (cmd_gen->parsed()) {
            auto kind = problem_from_name(gen_problem);
            if (!kind) {
                err << "usage error: unknown problem " << gen_problem << "\n";
                return 2;
            }
            for (const SetValue& x : problem_instances(*kind, max_rank, max_carrier))
                out << set_to_text(x) << "\n";
            return 0;
        }
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const AsmError& e) {
        err << "error: " << e.kind() << ": " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.kind() << ": " << e.what() << "\n";
        return 1;
    }
    err << "usage error: no subcommand\n";
    return 2;
}

}  // namespace otm
