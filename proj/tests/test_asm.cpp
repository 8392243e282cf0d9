#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "otm/program.hpp"

using namespace otm;

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::filesystem::path> corpus() {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(OTMLAB_PROGRAMS_DIR))
        if (entry.path().extension() == ".otm") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    REQUIRE(!files.empty());
    return files;
}

}  // namespace

TEST_CASE("flip-flop source parses") {
    Program p = parse_program("#halt 9\n0 0 0 0 -> 1 0 0 S S S 1\n1 1 0 0 -> 0 0 0 S S S 0\n");
    CHECK(p.halt_state == 9);
    CHECK(p.rules.size() == 2);
    CHECK(p.miracle_rules.empty());
    CHECK(p.states() == std::set<unsigned>{0, 1, 9});
}

TEST_CASE("duplicate rules are rejected") {
    const char* text =
        "#halt 1\n"
        "0 0 0 0 -> 1 0 0 S S S 1\n"
        "0 0 0 0 -> 0 0 0 S S S 1\n";
    CHECK_THROWS_WITH(parse_program(text), Catch::Matchers::ContainsSubstring("second rule"));

    const char* overlap =
        "#halt 1\n"
        "0 * -> MIRACLE 1\n"
        "0 0 0 0 -> 1 0 0 S S S 1\n";
    CHECK_THROWS_WITH(parse_program(overlap), Catch::Matchers::ContainsSubstring("miracle"));
}

TEST_CASE("minimal miracle program") {
    Program p = parse_program("0 * -> MIRACLE 1\n#halt 1\n");
    CHECK(p.rules.empty());
    CHECK(p.miracle_rules.at(0) == 1);
    CHECK(p.halt_state == 1);
}

TEST_CASE("semantic errors") {
    CHECK_THROWS_WITH(parse_program("0 0 0 0 -> 0 0 0 S S S 0\n"),
                      Catch::Matchers::ContainsSubstring("#halt"));
    CHECK_THROWS_WITH(parse_program("#halt 0\n0 0 0 0 -> 0 0 0 S S S 0\n"),
                      Catch::Matchers::ContainsSubstring("halt state"));
    CHECK_THROWS_WITH(parse_program("#halt 1\n0 0 0 0 -> 0 0 0 S S S 7\n"),
                      Catch::Matchers::ContainsSubstring("undeclared state"));
    CHECK_THROWS_WITH(parse_program("#halt 1\n#halt 2\n"),
                      Catch::Matchers::ContainsSubstring("twice"));
}

TEST_CASE("empty program prints as its halt directive") {
    Program p = parse_program("#halt 0\n");
    CHECK(print_program(p) == "#halt 0\n");
}

TEST_CASE("parse of print is the identity") {
    for (const auto& file : corpus()) {
        Program p = parse_program(read_file(file));
        CHECK(parse_program(print_program(p)) == p);
    }
}

TEST_CASE("print of parse is idempotent on the corpus") {
    for (const auto& file : corpus()) {
        std::string canonical = print_program(parse_program(read_file(file)));
        CHECK(print_program(parse_program(canonical)) == canonical);
    }
}

TEST_CASE("errors carry positions") {
    auto line_of = [](const char* text) -> std::size_t {
        try {
            parse_program(text);
        } catch (const AsmError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("#halt 1\nxyzzy\n") == 2);
    CHECK(line_of("#halt 1\n0 0 0 0 -> 0 0 0 S S Q 1\n") == 2);
    CHECK(line_of("garbage") == 1);
}

TEST_CASE("fuzz inputs never crash") {
    std::mt19937_64 rng(314159);
    const char alphabet[] = " \t\n;#->01239LRSMIRACLEhalt*xyz";
    int parsed = 0, failed = 0;
    for (int i = 0; i < 2000; ++i) {
        std::string text;
        std::size_t len = rng() % 120;
        for (std::size_t k = 0; k < len; ++k) {
            if (rng() % 8 == 0)
                text += static_cast<char>(rng() % 256);
            else
                text += alphabet[rng() % (sizeof(alphabet) - 1)];
        }
        try {
            parse_program(text);
            ++parsed;
        } catch (const AsmError& e) {
            CHECK(e.line() >= 1);
            ++failed;
        }
    }
    CHECK(parsed + failed == 2000);
}
