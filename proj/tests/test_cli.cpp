#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "otm/cli.hpp"

using namespace otm;

namespace {

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

CliResult invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli_run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string program_path(const char* name) {
    return (std::filesystem::path(OTMLAB_PROGRAMS_DIR) / name).string();
}

}  // namespace

TEST_CASE("run a program on a set literal") {
    auto r = invoke({"run", "--program", program_path("copy.otm"), "--input", "{{}}"});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("outcome=halted\n") != std::string::npos);
    CHECK(r.out.find("output=[2]\n") != std::string::npos);
    CHECK(r.out.find("decoded={{}}\n") != std::string::npos);
}

TEST_CASE("run accepts raw codes and oracles") {
    auto r = invoke({"run", "--program", program_path("relay.otm"), "--code", "[2]", "--oracle",
                     "ac"});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("outcome=halted\n") != std::string::npos);

    auto missing = invoke({"run", "--program", program_path("miracle_once.otm"), "--code", "[]"});
    CHECK(missing.exit_code == 1);
    CHECK(missing.out.find("outcome=missing-oracle\n") != std::string::npos);
}

TEST_CASE("trace changes no verdict") {
    std::vector<std::string> base{"run", "--program", program_path("copy.otm"), "--input",
                                  "{{},{{}}}"};
    auto plain = invoke(base);
    auto traced = invoke([&] {
        auto v = base;
        v.push_back("--trace");
        return v;
    }());
    CHECK(plain.exit_code == traced.exit_code);
    CHECK(traced.out.find("event=step") != std::string::npos);
    // the trace is a prefix-extension: the summary lines agree
    CHECK(traced.out.find(plain.out) != std::string::npos);
}

TEST_CASE("reduce runs witnesses") {
    // three-element chain poset literal, built programmatically for sanity
    std::vector<SetValue> elems{set_from_text("{}"), set_from_text("{{}}"),
                                set_from_text("{{{}}}")};
    std::vector<SetValue> rel;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i; j < 3; ++j) rel.push_back(kpair(elems[i], elems[j]));
    SetValue poset = kpair(SetValue(elems), SetValue(std::move(rel)));

    auto r = invoke({"reduce", "--witness", "zl_from_wo", "--input", set_to_text(poset)});
    CHECK(r.exit_code == 0);
    CHECK(r.out == "result=" + set_to_text(elems[2]) + "\n");

    auto rel_run = invoke({"reduce", "--witness", "wo_from_ac", "--input", "{{},{{}}}"});
    CHECK(rel_run.exit_code == 0);
    CHECK(rel_run.out.find("result=") != std::string::npos);
    CHECK(rel_run.out.find("oracle_calls=2\n") != std::string::npos);

    auto unknown = invoke({"reduce", "--witness", "nope", "--input", "{}"});
    CHECK(unknown.exit_code == 2);
}

TEST_CASE("verify witnesses end to end") {
    auto r = invoke({"verify", "--witness", "acp_from_ac", "--max-rank", "2", "--seeds", "3"});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("# seeds=0,1,2") != std::string::npos);
    CHECK(r.out.find("verdict=fail") == std::string::npos);
    CHECK(r.out.find("result=pass") != std::string::npos);
}

TEST_CASE("verify is byte-identical across invocations and job counts") {
    std::vector<std::string> args{"verify", "--witness", "acp_from_ac", "--seeds", "3"};
    auto a = invoke(args);
    auto b = invoke(args);
    CHECK(a.out == b.out);
    auto c = invoke({"verify", "--witness", "acp_from_ac", "--seeds", "3", "--jobs", "3"});
    CHECK(a.out == c.out);
}

TEST_CASE("gen emits deterministic suites") {
    auto a = invoke({"gen", "--problem", "acp"});
    auto b = invoke({"gen", "--problem", "acp"});
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("{{{}}}") != std::string::npos);

    auto bad = invoke({"gen", "--problem", "xyz"});
    CHECK(bad.exit_code == 2);
}

TEST_CASE("asm canonicalizes and reports syntax errors") {
    auto ok = invoke({"asm", program_path("flipflop.otm")});
    CHECK(ok.exit_code == 0);
    CHECK(ok.out == "#halt 9\n0 0 0 0 -> 1 0 0 S S S 1\n1 1 0 0 -> 0 0 0 S S S 0\n");

    auto missing = invoke({"asm", "/nonexistent/file.otm"});
    CHECK(missing.exit_code == 1);

    auto usage = invoke({"asm"});
    CHECK(usage.exit_code == 2);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(invoke({}).exit_code == 2);
    CHECK(invoke({"run"}).exit_code == 2);
    CHECK(invoke({"run", "--program", program_path("copy.otm")}).exit_code == 2);
    CHECK(invoke({"verify", "--witness", "nope"}).exit_code == 2);
    // malformed set literal
    CHECK(invoke({"reduce", "--witness", "zl_from_wo", "--input", "{"}).exit_code == 2);
}
