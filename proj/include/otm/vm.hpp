#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "otm/code.hpp"
#include "otm/errors.hpp"
#include "otm/ordinal.hpp"
#include "otm/program.hpp"

namespace otm {

// The machine has three tapes (scratch, output, miracle), each with its own
// head. Cells are indexed by ordinals. At successor times it steps like an
// ordinary Turing machine; a head moving left from a limit cell (or from 0)
// is reset to cell 0. Limit configurations take the inferior limit of state,
// head positions and cell contents; they are reached only through the
// certified detectors below.

inline constexpr std::array<const char*, 3> kTapeNames{"scratch", "output", "miracle"};

/// Tape content: a finite set of 1-cells plus at most one interval [lo, hi)
/// of 1-cells (with finitely many holes), as produced by right-march jumps.
class Tape {
public:
    Tape() = default;
    explicit Tape(std::vector<Ordinal> ones) {
        for (Ordinal& p : ones) ones_.insert(std::move(p));
    }

    bool read(const Ordinal& p) const {
        if (has_interval_ && compare(lo_, p) <= 0 && compare(p, hi_) < 0)
            return !holes_.count(p);
        return ones_.count(p) > 0;
    }

    void write(const Ordinal& p, bool bit) {
        if (has_interval_ && compare(lo_, p) <= 0 && compare(p, hi_) < 0) {
            if (bit)
                holes_.erase(p);
            else
                holes_.insert(p);
        } else {
            if (bit)
                ones_.insert(p);
            else
                ones_.erase(p);
        }
        normalize();
    }

    bool finite_support() const noexcept { return !has_interval_; }
    const std::set<Ordinal>& ones() const noexcept { return ones_; }
    bool has_interval() const noexcept { return has_interval_; }
    const Ordinal& interval_lo() const noexcept { return lo_; }
    const Ordinal& interval_hi() const noexcept { return hi_; }
    const std::set<Ordinal>& holes() const noexcept { return holes_; }

    /// True when no cell at or beyond `bound` holds a 1.
    bool clear_from(const Ordinal& bound) const {
        if (has_interval_ && compare(bound, hi_) < 0) return false;
        for (const Ordinal& p : ones_)
            if (compare(p, bound) >= 0) return false;
        return true;
    }

    bool equal_below(const Tape& other, const Ordinal& bound) const {
        // Interval structure never changes between two snapshots of the same
        // segment; a mismatch just declines the comparison.
        if (has_interval_ != other.has_interval_) return false;
        if (has_interval_ && (!(lo_ == other.lo_) || !(hi_ == other.hi_))) return false;
        if (has_interval_) {
            auto below = [&](const std::set<Ordinal>& s) {
                std::set<Ordinal> r;
                for (const Ordinal& p : s)
                    if (compare(p, bound) < 0) r.insert(p);
                return r;
            };
            if (below(holes_) != below(other.holes_)) return false;
        }
        std::set<Ordinal> a, b;
        for (const Ordinal& p : ones_)
            if (compare(p, bound) < 0) a.insert(p);
        for (const Ordinal& p : other.ones_)
            if (compare(p, bound) < 0) b.insert(p);
        return a == b;
    }

    /// Add the interval [lo, hi); requires the tape to be clear from lo upward
    /// and to have at most a contiguous existing interval ending at lo.
    void add_interval(const Ordinal& lo, const Ordinal& hi) {
        if (!has_interval_) {
            has_interval_ = true;
            lo_ = lo;
            hi_ = hi;
        } else {
            if (!(hi_ == lo))
                throw Error("unsupported-range", "tape cannot hold two disjoint intervals");
            hi_ = hi;
        }
        normalize();
    }

    friend bool operator==(const Tape& a, const Tape& b) {
        return a.ones_ == b.ones_ && a.has_interval_ == b.has_interval_ &&
               (!a.has_interval_ || (a.lo_ == b.lo_ && a.hi_ == b.hi_ && a.holes_ == b.holes_));
    }

private:
    void normalize() {
        if (!has_interval_) return;
        // Sweep stray cells that landed logically inside the interval.
        for (auto it = ones_.begin(); it != ones_.end();) {
            if (compare(lo_, *it) <= 0 && compare(*it, hi_) < 0) {
                holes_.erase(*it);
                it = ones_.erase(it);
            } else {
                ++it;
            }
        }
        for (auto it = holes_.begin(); it != holes_.end();) {
            if (compare(*it, lo_) < 0 || compare(hi_, *it) <= 0)
                it = holes_.erase(it);
            else
                ++it;
        }
        // Canonical form: no hole at the interval start, no 1-cell just below it.
        bool changed = true;
        while (changed) {
            changed = false;
            while (holes_.count(lo_)) {
                holes_.erase(lo_);
                lo_ = lo_ + Ordinal::finite(1);
                changed = true;
            }
            while (lo_.is_successor() && ones_.count(pred(lo_))) {
                lo_ = pred(lo_);
                ones_.erase(lo_);
                changed = true;
            }
        }
    }

    std::set<Ordinal> ones_;   // 1-cells outside the interval
    bool has_interval_ = false;
    Ordinal lo_, hi_;          // 1-cells on [lo_, hi_) minus holes_
    std::set<Ordinal> holes_;
};

struct Configuration {
    Ordinal time;
    unsigned state = 0;
    std::array<Ordinal, 3> heads;
    std::array<Tape, 3> tapes;

    friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// Equality of everything except the timestamp.
inline bool core_equal(const Configuration& a, const Configuration& b) {
    return a.state == b.state && a.heads == b.heads && a.tapes == b.tapes;
}

inline Bits3 read_symbols(const Configuration& cfg) {
    Bits3 r{};
    for (std::size_t i = 0; i < 3; ++i) r[i] = cfg.tapes[i].read(cfg.heads[i]);
    return r;
}

inline Ordinal move_head(const Ordinal& pos, Move m) {
    switch (m) {
        case Move::Right: return pos + Ordinal::finite(1);
        case Move::Stay: return pos;
        case Move::Left:
            // Reset to cell 0 from a limit cell; 0 itself has no predecessor.
            if (pos.is_successor()) return pred(pos);
            return Ordinal();
    }
    return pos;
}

/// One successor step. Requires a step rule for the current state and reads.
inline Configuration step(const Configuration& cfg, const Program& prog) {
    Bits3 reads = read_symbols(cfg);
    auto it = prog.rules.find({cfg.state, reads});
    if (it == prog.rules.end())
        throw Error("missing-rule", "state " + std::to_string(cfg.state) + " on " +
                                        std::to_string(reads[0]) + std::to_string(reads[1]) +
                                        std::to_string(reads[2]));
    const StepRule& rule = it->second;
    Configuration next = cfg;
    for (std::size_t i = 0; i < 3; ++i) next.tapes[i].write(cfg.heads[i], rule.write[i]);
    for (std::size_t i = 0; i < 3; ++i) next.heads[i] = move_head(cfg.heads[i], rule.move[i]);
    next.state = rule.next;
    next.time = cfg.time + Ordinal::finite(1);
    return next;
}

// --- Limit detection --------------------------------------------------------

struct SegmentEntry {
    Configuration cfg;
    Moves3 moves{Move::Stay, Move::Stay, Move::Stay};  // moves of the step producing cfg
    bool via_miracle = false;
};

using SegmentHistory = std::deque<SegmentEntry>;

struct LimitEvidence {
    std::size_t t1 = 0, t2 = 0;  // indices into the history; period = t2 - t1
    bool exact_repeat = false;   // exact configuration repetition
    std::array<std::uint64_t, 3> strides{};  // 0 for stationary heads
};

namespace detail {

inline std::optional<std::uint64_t> finite_difference(const Ordinal& from, const Ordinal& to) {
    if (compare(from, to) > 0) return std::nullopt;
    Ordinal d = left_subtract(from, to);
    if (!d.is_finite()) return std::nullopt;
    return d.finite_value();
}

}  // namespace detail

/// Scans the recorded segment for a certified tail pattern: either an exact
/// configuration repetition, or a lockstep right-march where each head is
/// stationary or advances by a fixed stride per period writing a uniform
/// all-0 or all-1 block behind it.
inline std::optional<LimitEvidence> detect_limit_pattern(const SegmentHistory& hist) {
    if (hist.size() < 2) return std::nullopt;
    const std::size_t t2 = hist.size() - 1;
    const Configuration& c2 = hist[t2].cfg;
    for (std::size_t p = 1; p <= t2; ++p) {
        const std::size_t t1 = t2 - p;
        const Configuration& c1 = hist[t1].cfg;
        if (c1.state != c2.state) continue;

        if (core_equal(c1, c2)) {
            LimitEvidence ev;
            ev.t1 = t1;
            ev.t2 = t2;
            ev.exact_repeat = true;
            return ev;
        }

        LimitEvidence ev;
        ev.t1 = t1;
        ev.t2 = t2;
        bool ok = true;
        bool any_march = false;
        for (std::size_t i = 0; i < 3 && ok; ++i) {
            auto d = detail::finite_difference(c1.heads[i], c2.heads[i]);
            if (!d) {
                ok = false;
                break;
            }
            ev.strides[i] = *d;
            if (*d == 0) {
                if (!(c1.tapes[i] == c2.tapes[i])) ok = false;
                continue;
            }
            any_march = true;
            // Marching head: only R/S moves during the period, nothing ahead of
            // it at either end, and a uniform freshly written block.
            for (std::size_t t = t1 + 1; t <= t2 && ok; ++t) {
                if (hist[t].via_miracle && i == 2) ok = false;
                Move m = hist[t].moves[i];
                if (m == Move::Left) ok = false;
            }
            if (!ok) break;
            if (!c1.tapes[i].clear_from(c1.heads[i])) ok = false;
            if (ok && !c2.tapes[i].clear_from(c2.heads[i])) ok = false;
            if (ok && !c1.tapes[i].equal_below(c2.tapes[i], c1.heads[i])) ok = false;
            if (ok) {
                // The block written in [h1, h2) must be uniformly 0 or 1.
                bool first_bit = c2.tapes[i].read(c1.heads[i]);
                Ordinal q = c1.heads[i];
                for (std::uint64_t r = 0; r < ev.strides[i] && ok; ++r) {
                    if (c2.tapes[i].read(q) != first_bit) ok = false;
                    q = q + Ordinal::finite(1);
                }
                if (ok && first_bit && c1.tapes[i].has_interval() &&
                    !(c1.tapes[i].interval_hi() == c1.heads[i]))
                    ok = false;  // would need a second disjoint interval
            }
        }
        if (ok && any_march) return ev;
    }
    return std::nullopt;
}

/// Configuration at the least limit time past the certified tail: state and
/// stationary components take the minimum over the period, marching heads
/// their supremum, cells the inferior limit of their values.
inline Configuration limit_jump(const SegmentHistory& hist, const LimitEvidence& ev) {
    const Configuration& c1 = hist[ev.t1].cfg;
    const Configuration& c2 = hist[ev.t2].cfg;
    Configuration out;
    out.time = limit_floor(c2.time) + Ordinal::omega();

    out.state = c1.state;
    for (std::size_t t = ev.t1; t < ev.t2; ++t) out.state = std::min(out.state, hist[t].cfg.state);

    for (std::size_t i = 0; i < 3; ++i) {
        bool marching = !ev.exact_repeat && ev.strides[i] > 0;
        if (marching) {
            out.heads[i] = c1.heads[i] + Ordinal::omega();
            Tape limit = c1.tapes[i];
            if (c2.tapes[i].read(c1.heads[i]))  // uniform all-1 block
                limit.add_interval(c1.heads[i], out.heads[i]);
            out.tapes[i] = limit;
        } else {
            Ordinal h = c1.heads[i];
            for (std::size_t t = ev.t1; t < ev.t2; ++t)
                if (compare(hist[t].cfg.heads[i], h) < 0) h = hist[t].cfg.heads[i];
            out.heads[i] = h;
            // A cell holds 1 at the limit iff it holds 1 throughout the period.
            Tape limit = c1.tapes[i];
            for (std::size_t t = ev.t1; t < ev.t2; ++t) {
                const Tape& tp = hist[t].cfg.tapes[i];
                std::vector<Ordinal> zeros;
                for (const Ordinal& q : limit.ones())
                    if (!tp.read(q)) zeros.push_back(q);
                if (limit.has_interval())
                    for (const Ordinal& q : tp.holes())
                        if (limit.read(q)) zeros.push_back(q);
                for (const Ordinal& q : zeros) limit.write(q, false);
            }
            out.tapes[i] = limit;
        }
    }
    return out;
}

// --- Running ----------------------------------------------------------------

/// Deterministic code-to-code oracle; nullopt where undefined.
struct CodeOracle {
    std::string name;
    std::function<std::optional<Code>(const Code&)> fn;
};

struct Fuel {
    std::uint64_t max_steps_per_segment = 20000;
    std::uint64_t max_limit_jumps = 64;
    std::size_t detection_window = 24;
};

enum class Outcome {
    Halted,
    FuelExhausted,
    UndetectedLimitPattern,
    MiracleUndefined,
    MissingRule,
    MissingOracle,
};

inline const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Halted: return "halted";
        case Outcome::FuelExhausted: return "fuel-exhausted";
        case Outcome::UndetectedLimitPattern: return "undetected-limit-pattern";
        case Outcome::MiracleUndefined: return "miracle-undefined";
        case Outcome::MissingRule: return "missing-rule";
        case Outcome::MissingOracle: return "missing-oracle";
    }
    return "?";
}

enum class TraceEventKind { Step, LimitJump, MiracleCall, Halt };

struct TraceRecord {
    TraceEventKind event = TraceEventKind::Step;
    Ordinal time;
    unsigned state = 0;
    std::array<Ordinal, 3> heads;
    std::string delta;
};

struct RunResult {
    Outcome outcome = Outcome::Halted;
    Configuration final_config;
    std::vector<TraceRecord> trace;
    std::string detail;

    bool halted() const noexcept { return outcome == Outcome::Halted; }
};

namespace detail {

inline std::string tape_delta(const Configuration& before, const Configuration& after) {
    std::string out;
    auto append = [&](const std::string& part) {
        if (!out.empty()) out += ';';
        out += part;
    };
    for (std::size_t i = 0; i < 3; ++i) {
        const Tape& a = before.tapes[i];
        const Tape& b = after.tapes[i];
        if (!a.has_interval() && b.has_interval()) {
            append(std::string(kTapeNames[i]) + ":[" + ord_to_text(b.interval_lo()) + "," +
                   ord_to_text(b.interval_hi()) + ")=1");
        } else if (a.has_interval() && b.has_interval() && !(a.interval_hi() == b.interval_hi())) {
            append(std::string(kTapeNames[i]) + ":[" + ord_to_text(a.interval_hi()) + "," +
                   ord_to_text(b.interval_hi()) + ")=1");
        }
        std::set<Ordinal> candidates;
        for (const Ordinal& q : a.ones()) candidates.insert(q);
        for (const Ordinal& q : b.ones()) candidates.insert(q);
        for (const Ordinal& q : a.holes()) candidates.insert(q);
        for (const Ordinal& q : b.holes()) candidates.insert(q);
        for (const Ordinal& q : candidates) {
            bool va = a.read(q);
            bool vb = b.read(q);
            if (va != vb)
                append(std::string(kTapeNames[i]) + ":" + ord_to_text(q) + "=" + (vb ? "1" : "0"));
        }
    }
    return out.empty() ? "-" : out;
}

inline TraceRecord trace_for(TraceEventKind kind, const Configuration& cfg, std::string delta) {
    TraceRecord rec;
    rec.event = kind;
    rec.time = cfg.time;
    rec.state = cfg.state;
    rec.heads = cfg.heads;
    rec.delta = std::move(delta);
    return rec;
}

}  // namespace detail

inline std::string trace_record_to_text(const TraceRecord& rec) {
    const char* name = "step";
    switch (rec.event) {
        case TraceEventKind::Step: name = "step"; break;
        case TraceEventKind::LimitJump: name = "limit-jump"; break;
        case TraceEventKind::MiracleCall: name = "miracle-call"; break;
        case TraceEventKind::Halt: name = "halt"; break;
    }
    std::string out = "event=";
    out += name;
    out += " time=" + ord_to_text(rec.time);
    out += " state=" + std::to_string(rec.state);
    out += " heads=" + ord_to_text(rec.heads[0]) + "," + ord_to_text(rec.heads[1]) + "," +
           ord_to_text(rec.heads[2]);
    out += " delta=" + rec.delta;
    return out;
}

inline Configuration initial_configuration(const Code& input) {
    Configuration cfg;
    cfg.tapes[0] = Tape(input.elements());
    return cfg;
}

/// Runs a program on an input code. The input is written as 1-bits on the
/// scratch tape; on a miracle rule the whole miracle-tape content is replaced
/// by the oracle's answer and the miracle head returns to cell 0.
inline RunResult run(const Program& prog, const Code& input, const CodeOracle* oracle,
                     const Fuel& fuel = Fuel{}) {
    RunResult result;
    Configuration cfg = initial_configuration(input);
    SegmentHistory hist;
    hist.push_back(SegmentEntry{cfg, {Move::Stay, Move::Stay, Move::Stay}, false});
    std::uint64_t jumps = 0;
    std::uint64_t segment_steps = 0;

    auto finish = [&](Outcome outcome, std::string detail) {
        result.outcome = outcome;
        result.final_config = cfg;
        result.detail = std::move(detail);
        return result;
    };

    while (true) {
        if (cfg.state == prog.halt_state) {
            // Only an initially halted machine reaches this; a step into the
            // halt state is recorded below as the halt event itself.
            result.trace.push_back(detail::trace_for(TraceEventKind::Halt, cfg, "-"));
            return finish(Outcome::Halted, "");
        }

        auto mi = prog.miracle_rules.find(cfg.state);
        Configuration next;
        bool via_miracle = false;
        Moves3 moves{Move::Stay, Move::Stay, Move::Stay};
        if (mi != prog.miracle_rules.end()) {
            if (!oracle) return finish(Outcome::MissingOracle, "miracle rule without an oracle");
            if (!cfg.tapes[2].finite_support())
                return finish(Outcome::MiracleUndefined, "miracle tape content is infinite");
            Code query(std::vector<Ordinal>(cfg.tapes[2].ones().begin(), cfg.tapes[2].ones().end()));
            std::optional<Code> reply = oracle->fn(query);
            if (!reply)
                return finish(Outcome::MiracleUndefined,
                              "oracle " + oracle->name + " has no value for " + code_to_text(query));
            next = cfg;
            next.tapes[2] = Tape(reply->elements());
            next.heads[2] = Ordinal();
            next.state = mi->second;
            next.time = cfg.time + Ordinal::finite(1);
            via_miracle = true;
        } else {
            Bits3 reads = read_symbols(cfg);
            auto it = prog.rules.find({cfg.state, reads});
            if (it == prog.rules.end())
                return finish(Outcome::MissingRule,
                              "no rule for state " + std::to_string(cfg.state) + " reading " +
                                  std::to_string(reads[0]) + std::to_string(reads[1]) +
                                  std::to_string(reads[2]));
            next = step(cfg, prog);
            moves = it->second.move;
        }

        const bool halts = next.state == prog.halt_state;
        TraceEventKind kind = halts ? TraceEventKind::Halt
                              : via_miracle ? TraceEventKind::MiracleCall
                                            : TraceEventKind::Step;
        result.trace.push_back(detail::trace_for(kind, next, detail::tape_delta(cfg, next)));
        cfg = next;
        if (halts) return finish(Outcome::Halted, "");
        hist.push_back(SegmentEntry{cfg, moves, via_miracle});
        while (hist.size() > fuel.detection_window + 1) hist.pop_front();
        ++segment_steps;

        if (auto ev = detect_limit_pattern(hist)) {
            if (jumps == fuel.max_limit_jumps)
                return finish(Outcome::FuelExhausted, "limit-jump budget exhausted");
            Configuration jumped = limit_jump(hist, *ev);
            result.trace.push_back(detail::trace_for(TraceEventKind::LimitJump, jumped,
                                                     detail::tape_delta(cfg, jumped)));
            cfg = jumped;
            hist.clear();
            hist.push_back(SegmentEntry{cfg, {Move::Stay, Move::Stay, Move::Stay}, false});
            ++jumps;
            segment_steps = 0;
            continue;
        }
        if (segment_steps >= fuel.max_steps_per_segment)
            return finish(Outcome::UndetectedLimitPattern,
                          "successor budget spent without halt or certified pattern");
    }
}

/// Output of a halted run: the 1-cells of the output tape.
inline Code output_code(const RunResult& result) {
    if (!result.halted()) throw Error(outcome_name(result.outcome), result.detail);
    const Tape& out = result.final_config.tapes[1];
    if (!out.finite_support())
        throw Error("unsupported-range", "output tape does not have finite support");
    return Code(std::vector<Ordinal>(out.ones().begin(), out.ones().end()));
}

}  // namespace otm
