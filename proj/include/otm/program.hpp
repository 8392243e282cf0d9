#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "otm/errors.hpp"

namespace otm {

// Transition tables for the machine. Rule lines read
//   q s0 s1 s2 -> w0 w1 w2 m0 m1 m2 q'
// with q, q' naturals, s/w bits and m in {L,R,S}; a miracle line reads
//   q * -> MIRACLE q'
// and matches every read triple for q. Directives: `#halt q`. Comments run
// from ';' to end of line. Encoding is ASCII.

enum class Move : char { Left = 'L', Right = 'R', Stay = 'S' };

using Bits3 = std::array<bool, 3>;
using Moves3 = std::array<Move, 3>;

struct StepRule {
    Bits3 write{};
    Moves3 move{Move::Stay, Move::Stay, Move::Stay};
    unsigned next = 0;

    friend bool operator==(const StepRule&, const StepRule&) = default;
};

struct Program {
    unsigned halt_state = 0;
    std::map<std::pair<unsigned, Bits3>, StepRule> rules;
    std::map<unsigned, unsigned> miracle_rules;  // state -> next state

    friend bool operator==(const Program&, const Program&) = default;

    std::set<unsigned> states() const {
        std::set<unsigned> s{0u, halt_state};
        for (const auto& [key, rule] : rules) {
            s.insert(key.first);
            s.insert(rule.next);
        }
        for (const auto& [state, next] : miracle_rules) {
            s.insert(state);
            s.insert(next);
        }
        return s;
    }
};

/// Assembler failure with a 1-based line/column position.
class AsmError : public Error {
public:
    AsmError(std::string kind, std::size_t line, std::size_t col, const std::string& message)
        : Error(std::move(kind),
                "line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + message),
          line_(line),
          col_(col) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t line_;
    std::size_t col_;
};

namespace detail {

struct AsmToken {
    std::string text;
    std::size_t col = 0;
};

inline std::vector<AsmToken> asm_tokens(std::string_view line) {
    std::vector<AsmToken> out;
    std::size_t i = 0;
    while (i < line.size()) {
        char ch = line[i];
        if (ch == ';') break;
        if (ch == ' ' || ch == '\t' || ch == '\r') {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' &&
               line[i] != ';')
            ++i;
        out.push_back(AsmToken{std::string(line.substr(start, i - start)), start + 1});
    }
    return out;
}

inline unsigned asm_state(const AsmToken& tok, std::size_t line, const char* what) {
    if (tok.text.empty() || tok.text.size() > 9) throw AsmError("syntax-error", line, tok.col, std::string("bad ") + what);
    unsigned value = 0;
    for (char ch : tok.text) {
        if (ch < '0' || ch > '9')
            throw AsmError("syntax-error", line, tok.col, std::string(what) + " must be a natural number");
        value = value * 10 + static_cast<unsigned>(ch - '0');
    }
    if (tok.text.size() > 1 && tok.text[0] == '0')
        throw AsmError("syntax-error", line, tok.col, std::string(what) + " has leading zeros");
    return value;
}

inline bool asm_bit(const AsmToken& tok, std::size_t line) {
    if (tok.text == "0") return false;
    if (tok.text == "1") return true;
    throw AsmError("syntax-error", line, tok.col, "expected a bit (0 or 1)");
}

inline Move asm_move(const AsmToken& tok, std::size_t line) {
    if (tok.text == "L") return Move::Left;
    if (tok.text == "R") return Move::Right;
    if (tok.text == "S") return Move::Stay;
    throw AsmError("syntax-error", line, tok.col, "expected a move (L, R or S)");
}

}  // namespace detail

inline Program parse_program(std::string_view text) {
    Program prog;
    std::optional<unsigned> halt;
    std::optional<std::size_t> halt_line;
    struct PendingStep {
        unsigned state;
        Bits3 read;
        StepRule rule;
        std::size_t line;
    };
    struct PendingMiracle {
        unsigned state;
        unsigned next;
        std::size_t line;
    };
    std::vector<PendingStep> steps;
    std::vector<PendingMiracle> miracles;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string_view line =
            text.substr(start, end == std::string_view::npos ? text.size() - start : end - start);
        ++line_no;
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;

        auto tokens = detail::asm_tokens(line);
        if (tokens.empty()) continue;

        if (tokens[0].text == "#halt") {
            if (tokens.size() != 2)
                throw AsmError("syntax-error", line_no, tokens[0].col, "#halt takes one state");
            if (halt)
                throw AsmError("duplicate-halt", line_no, tokens[0].col, "halt state declared twice");
            halt = detail::asm_state(tokens[1], line_no, "halt state");
            halt_line = line_no;
            continue;
        }
        if (tokens[0].text.starts_with("#"))
            throw AsmError("syntax-error", line_no, tokens[0].col, "unknown directive");

        if (tokens.size() == 5 && tokens[1].text == "*") {
            if (tokens[2].text != "->" || tokens[3].text != "MIRACLE")
                throw AsmError("syntax-error", line_no, tokens[2].col, "malformed miracle line");
            unsigned state = detail::asm_state(tokens[0], line_no, "state");
            unsigned next = detail::asm_state(tokens[4], line_no, "next state");
            miracles.push_back({state, next, line_no});
            continue;
        }

        if (tokens.size() != 12)
            throw AsmError("syntax-error", line_no, tokens[0].col,
                           "expected `q s0 s1 s2 -> w0 w1 w2 m0 m1 m2 q'`");
        if (tokens[4].text != "->")
            throw AsmError("syntax-error", line_no, tokens[4].col, "expected '->'");
        PendingStep ps;
        ps.state = detail::asm_state(tokens[0], line_no, "state");
        for (int i = 0; i < 3; ++i) ps.read[static_cast<std::size_t>(i)] = detail::asm_bit(tokens[1 + static_cast<std::size_t>(i)], line_no);
        for (int i = 0; i < 3; ++i) ps.rule.write[static_cast<std::size_t>(i)] = detail::asm_bit(tokens[5 + static_cast<std::size_t>(i)], line_no);
        for (int i = 0; i < 3; ++i) ps.rule.move[static_cast<std::size_t>(i)] = detail::asm_move(tokens[8 + static_cast<std::size_t>(i)], line_no);
        ps.rule.next = detail::asm_state(tokens[11], line_no, "next state");
        ps.line = line_no;
        steps.push_back(ps);
    }

    if (!halt) throw AsmError("undeclared-halt", line_no ? line_no : 1, 1, "missing #halt directive");
    prog.halt_state = *halt;

    for (const auto& pm : miracles) {
        if (prog.miracle_rules.count(pm.state))
            throw AsmError("duplicate-rule", pm.line, 1,
                           "second miracle rule for state " + std::to_string(pm.state));
        prog.miracle_rules[pm.state] = pm.next;
    }
    for (const auto& ps : steps) {
        if (prog.miracle_rules.count(ps.state))
            throw AsmError("duplicate-rule", ps.line, 1,
                           "state " + std::to_string(ps.state) + " already has a miracle rule");
        auto key = std::make_pair(ps.state, ps.read);
        if (prog.rules.count(key))
            throw AsmError("duplicate-rule", ps.line, 1,
                           "second rule for state " + std::to_string(ps.state) + " on these symbols");
        prog.rules[key] = ps.rule;
    }

    // Semantic checks: the halt state may not act; referenced states must exist.
    std::set<unsigned> acting;
    for (const auto& [key, rule] : prog.rules) acting.insert(key.first);
    for (const auto& [state, next] : prog.miracle_rules) acting.insert(state);
    if (acting.count(prog.halt_state))
        throw AsmError("rule-out-of-halt-state", halt_line.value_or(1), 1,
                       "halt state " + std::to_string(prog.halt_state) + " has outgoing rules");
    auto declared = [&](unsigned q) { return q == 0 || q == prog.halt_state || acting.count(q); };
    for (const auto& [key, rule] : prog.rules)
        if (!declared(rule.next))
            throw AsmError("undeclared-state", 1, 1,
                           "rule references undeclared state " + std::to_string(rule.next));
    for (const auto& [state, next] : prog.miracle_rules)
        if (!declared(next))
            throw AsmError("undeclared-state", 1, 1,
                           "miracle rule references undeclared state " + std::to_string(next));
    return prog;
}

inline std::string print_program(const Program& p) {
    std::ostringstream out;
    out << "#halt " << p.halt_state << "\n";
    std::set<unsigned> states;
    for (const auto& [key, rule] : p.rules) states.insert(key.first);
    for (const auto& [state, next] : p.miracle_rules) states.insert(state);
    for (unsigned q : states) {
        auto mi = p.miracle_rules.find(q);
        if (mi != p.miracle_rules.end()) {
            out << q << " * -> MIRACLE " << mi->second << "\n";
            continue;
        }
        for (const auto& [key, rule] : p.rules) {
            if (key.first != q) continue;
            out << q;
            for (bool b : key.second) out << ' ' << (b ? '1' : '0');
            out << " ->";
            for (bool b : rule.write) out << ' ' << (b ? '1' : '0');
            for (Move m : rule.move) out << ' ' << static_cast<char>(m);
            out << ' ' << rule.next << "\n";
        }
    }
    return out.str();
}

}  // namespace otm
