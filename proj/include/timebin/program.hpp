// Copyright 2026 The timebin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Line-oriented circuit text format:
//
//   MODES bins=<int> [spatial=<int>] [alpha=<float>]
//   PHOTON bin=<int> pol=<H|V> [spatial=<int>] [internal=<0|1>]
//   ROT bin=<int> theta=<float>
//   COUPLE bin_a=<int> bin_b=<int> theta=<float> [phi=<float>]
//   HWP bin=<int> angle=<float>          angle in degrees
//   PHASE bin=<int> pol=<H|V> phi=<float>
//   SHIFT delta=<int>
//   HERALD bin=<int> pol=<H|V> n=<int>
//   READ bin=<int> pol=<H|V>
//   MEASURE-ALL
//
// All other angles are radians. '#' starts a comment.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "timebin/elements.hpp"
#include "timebin/errors.hpp"
#include "timebin/fock_state.hpp"

namespace timebin {

struct SourceLocation {
    int line = 0;
    int column = 0;
};

class ParseError : public std::invalid_argument {
   public:
    ParseError(SourceLocation loc, std::string token, const std::string& message)
        : std::invalid_argument(fmt::format("line {}, column {}: {} (at '{}')", loc.line, loc.column, message, token)),
          location_(loc),
          token_(std::move(token)) {}

    [[nodiscard]] SourceLocation location() const { return location_; }
    [[nodiscard]] const std::string& token() const { return token_; }

   private:
    SourceLocation location_;
    std::string token_;
};

/// A failure while executing a statement; carries the statement's location.
class RunError : public DomainError {
   public:
    RunError(SourceLocation loc, const std::string& message)
        : DomainError(fmt::format("line {}: {}", loc.line, message)), location_(loc) {}

    [[nodiscard]] SourceLocation location() const { return location_; }

   private:
    SourceLocation location_;
};

namespace stmt {

struct Photon {
    std::uint32_t bin = 0;
    Polarization pol = kV;
    std::uint32_t spatial = 0;
    std::uint32_t internal = 0;
    friend bool operator==(const Photon&, const Photon&) = default;
};
struct Rot {
    std::uint32_t bin = 0;
    double theta = 0;
    friend bool operator==(const Rot&, const Rot&) = default;
};
struct Couple {
    std::uint32_t bin_a = 0;
    std::uint32_t bin_b = 0;
    double theta = 0;
    double phi = 0;
    friend bool operator==(const Couple&, const Couple&) = default;
};
struct Hwp {
    std::uint32_t bin = 0;
    double angle_deg = 0;
    friend bool operator==(const Hwp&, const Hwp&) = default;
};
struct Phase {
    std::uint32_t bin = 0;
    Polarization pol = kV;
    double phi = 0;
    friend bool operator==(const Phase&, const Phase&) = default;
};
struct Shift {
    int delta = 0;
    friend bool operator==(const Shift&, const Shift&) = default;
};
struct Herald {
    std::uint32_t bin = 0;
    Polarization pol = kV;
    int n = 0;
    friend bool operator==(const Herald&, const Herald&) = default;
};
struct Read {
    std::uint32_t bin = 0;
    Polarization pol = kV;
    friend bool operator==(const Read&, const Read&) = default;
};
struct MeasureAll {
    friend bool operator==(const MeasureAll&, const MeasureAll&) = default;
};

}  // namespace stmt

using StatementKind = std::variant<stmt::Photon, stmt::Rot, stmt::Couple, stmt::Hwp, stmt::Phase, stmt::Shift,
                                   stmt::Herald, stmt::Read, stmt::MeasureAll>;

struct Statement {
    StatementKind kind;
    SourceLocation location;

    /// Locations are not part of a statement's identity.
    friend bool operator==(const Statement& a, const Statement& b) { return a.kind == b.kind; }
};

struct ModesDecl {
    std::uint32_t bins = 0;
    std::uint32_t spatial = 1;
    std::optional<double> alpha;
    friend bool operator==(const ModesDecl&, const ModesDecl&) = default;
};

struct Program {
    ModesDecl modes;
    std::vector<Statement> statements;
    friend bool operator==(const Program&, const Program&) = default;
};

// ---------------------------------------------------------------------------
// Formatting

inline std::string format_number(double x) { return fmt::format("{:.17g}", x); }

inline std::string format(const StatementKind& s) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            auto pol = [](Polarization p) { return polarization_letter(p); };
            if constexpr (std::is_same_v<T, stmt::Photon>) {
                std::string out = fmt::format("PHOTON bin={} pol={}", v.bin, pol(v.pol));
                if (v.spatial != 0) out += fmt::format(" spatial={}", v.spatial);
                if (v.internal != 0) out += fmt::format(" internal={}", v.internal);
                return out;
            } else if constexpr (std::is_same_v<T, stmt::Rot>) {
                return fmt::format("ROT bin={} theta={}", v.bin, format_number(v.theta));
            } else if constexpr (std::is_same_v<T, stmt::Couple>) {
                std::string out =
                    fmt::format("COUPLE bin_a={} bin_b={} theta={}", v.bin_a, v.bin_b, format_number(v.theta));
                if (v.phi != 0) out += " phi=" + format_number(v.phi);
                return out;
            } else if constexpr (std::is_same_v<T, stmt::Hwp>) {
                return fmt::format("HWP bin={} angle={}", v.bin, format_number(v.angle_deg));
            } else if constexpr (std::is_same_v<T, stmt::Phase>) {
                return fmt::format("PHASE bin={} pol={} phi={}", v.bin, pol(v.pol), format_number(v.phi));
            } else if constexpr (std::is_same_v<T, stmt::Shift>) {
                return fmt::format("SHIFT delta={}", v.delta);
            } else if constexpr (std::is_same_v<T, stmt::Herald>) {
                return fmt::format("HERALD bin={} pol={} n={}", v.bin, pol(v.pol), v.n);
            } else if constexpr (std::is_same_v<T, stmt::Read>) {
                return fmt::format("READ bin={} pol={}", v.bin, pol(v.pol));
            } else {
                return "MEASURE-ALL";
            }
        },
        s);
}

/// Canonical text; parse(format(p)) == p.
inline std::string format(const Program& p) {
    std::string out = fmt::format("MODES bins={}", p.modes.bins);
    if (p.modes.spatial != 1) out += fmt::format(" spatial={}", p.modes.spatial);
    if (p.modes.alpha) out += " alpha=" + format_number(*p.modes.alpha);
    out += '\n';
    for (const auto& s : p.statements) out += format(s.kind) + '\n';
    return out;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t program_hash(const Program& p) { return fnv1a(format(p)); }

/// Statement equivalent of one element.
inline StatementKind statement_from_element(const ElementOp& op) {
    return std::visit(
        [](const auto& e) -> StatementKind {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, PolRotation>) {
                return stmt::Rot{e.time_bin, e.theta};
            } else if constexpr (std::is_same_v<T, PolCoupling>) {
                return stmt::Couple{e.bin_a, e.bin_b, e.theta, e.phi};
            } else if constexpr (std::is_same_v<T, PhaseShift>) {
                return stmt::Phase{e.time_bin, e.polarization, e.phi};
            } else if constexpr (std::is_same_v<T, Displacement>) {
                return stmt::Shift{e.delta};
            } else {
                return stmt::Read{e.time_bin, e.polarization};
            }
        },
        op);
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

struct Token {
    std::string_view text;
    int column = 0;
};

inline std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size()) break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
        i = j;
    }
    return out;
}

/// Keyword arguments of one statement, consumed by name.
class Arguments {
   public:
    Arguments(int line, std::string_view keyword, std::span<const Token> tokens) : line_(line), keyword_(keyword) {
        for (const auto& t : tokens) {
            const auto eq = t.text.find('=');
            if (eq == std::string_view::npos || eq == 0) {
                throw ParseError({line_, t.column}, std::string(t.text), "expected key=value");
            }
            std::string key(t.text.substr(0, eq));
            if (args_.contains(key)) throw ParseError({line_, t.column}, std::string(t.text), "duplicate argument");
            args_.emplace(key, Arg{t.text.substr(eq + 1), t.column + static_cast<int>(eq) + 1, t});
        }
    }

    template <typename T>
    T integer(const std::string& key, std::optional<T> fallback = std::nullopt) {
        auto a = take(key, fallback.has_value());
        if (!a) return *fallback;
        T v{};
        auto [ptr, ec] = std::from_chars(a->value.data(), a->value.data() + a->value.size(), v);
        if (ec != std::errc{} || ptr != a->value.data() + a->value.size() || a->value.empty()) {
            throw ParseError({line_, a->column}, std::string(a->value), "malformed integer for '" + key + "'");
        }
        return v;
    }

    double real(const std::string& key, std::optional<double> fallback = std::nullopt) {
        auto a = take(key, fallback.has_value());
        if (!a) return *fallback;
        return parse_real(*a, key);
    }

    std::optional<double> optional_real(const std::string& key) {
        auto a = take(key, true);
        if (!a) return std::nullopt;
        return parse_real(*a, key);
    }

    Polarization polarization(const std::string& key) {
        auto a = take(key, false);
        if (a->value.size() == 1) {
            if (auto p = polarization_from_letter(a->value[0])) return *p;
        }
        throw ParseError({line_, a->column}, std::string(a->value), "polarization must be H or V");
    }

    [[nodiscard]] int column_of(const std::string& key) const {
        auto it = seen_.find(key);
        return it == seen_.end() ? 1 : it->second.column;
    }
    [[nodiscard]] std::string value_of(const std::string& key) const {
        auto it = seen_.find(key);
        return it == seen_.end() ? std::string() : std::string(it->second.value);
    }

    /// Anything not consumed is an unknown argument.
    void finish() const {
        if (args_.empty()) return;
        const auto& [key, a] = *args_.begin();
        throw ParseError({line_, a.token.column}, std::string(a.token.text),
                         "unknown argument '" + key + "' for " + std::string(keyword_));
    }

   private:
    struct Arg {
        std::string_view value;
        int column = 0;
        Token token;
    };

    std::optional<Arg> take(const std::string& key, bool optional) {
        auto it = args_.find(key);
        if (it == args_.end()) {
            if (optional) return std::nullopt;
            throw ParseError({line_, 1}, std::string(keyword_), "missing argument '" + key + "'");
        }
        Arg a = it->second;
        seen_.emplace(key, a);
        args_.erase(it);
        return a;
    }

    double parse_real(const Arg& a, const std::string& key) const {
        double v = 0;
        auto [ptr, ec] = std::from_chars(a.value.data(), a.value.data() + a.value.size(), v);
        if (ec != std::errc{} || ptr != a.value.data() + a.value.size() || a.value.empty() || !std::isfinite(v)) {
            throw ParseError({line_, a.column}, std::string(a.value), "malformed number for '" + key + "'");
        }
        return v;
    }

    int line_;
    std::string_view keyword_;
    std::map<std::string, Arg> args_;
    std::map<std::string, Arg> seen_;
};

/// Allowed bin range once every displacement is accounted for: processing
/// bins can travel below 1 by the sum of negative shifts and beyond the last
/// bin by the sum of positive shifts.
struct BinRange {
    std::uint32_t lo = 1;
    std::uint32_t hi = 0;
};

inline BinRange bin_range(const Program& p) {
    long long neg = 0;
    long long pos = 0;
    for (const auto& s : p.statements) {
        if (const auto* sh = std::get_if<stmt::Shift>(&s.kind)) (sh->delta < 0 ? neg : pos) += sh->delta;
    }
    return {static_cast<std::uint32_t>(std::clamp(1 + neg, 0LL, 1LL)), static_cast<std::uint32_t>(p.modes.bins + pos)};
}

}  // namespace detail

inline Program parse(std::string_view source) {
    Program prog;
    bool have_modes = false;
    bool measured_all = false;
    bool past_photons = false;
    // Positions of bin arguments, checked against the final range.
    struct BinRef {
        std::uint32_t bin;
        SourceLocation loc;
        std::string token;
    };
    std::vector<BinRef> refs;

    int line_no = 0;
    std::size_t start = 0;
    while (start <= source.size()) {
        std::size_t end = source.find('\n', start);
        if (end == std::string_view::npos) end = source.size();
        std::string_view line = source.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto tokens = detail::tokenize(line);
        if (tokens.empty()) {
            if (end == source.size()) break;
            continue;
        }
        const detail::Token& kw = tokens.front();
        const SourceLocation loc{line_no, kw.column};
        const std::string keyword(kw.text);
        detail::Arguments args(line_no, kw.text, std::span<const detail::Token>(tokens).subspan(1));
        auto bin_arg = [&](const std::string& key) {
            auto b = args.integer<std::uint32_t>(key);
            refs.push_back({b, {line_no, args.column_of(key)}, args.value_of(key)});
            return b;
        };

        if (!have_modes) {
            if (keyword != "MODES") throw ParseError(loc, keyword, "program must start with MODES");
            prog.modes.bins = args.integer<std::uint32_t>("bins");
            if (prog.modes.bins == 0) {
                throw ParseError({line_no, args.column_of("bins")}, args.value_of("bins"), "bins must be at least 1");
            }
            prog.modes.spatial = args.integer<std::uint32_t>("spatial", 1u);
            if (prog.modes.spatial == 0) {
                throw ParseError({line_no, args.column_of("spatial")}, args.value_of("spatial"),
                                 "spatial must be at least 1");
            }
            prog.modes.alpha = args.optional_real("alpha");
            if (prog.modes.alpha && !(*prog.modes.alpha >= 0 && *prog.modes.alpha <= 1)) {
                throw ParseError({line_no, args.column_of("alpha")}, args.value_of("alpha"), "alpha must lie in [0, 1]");
            }
            args.finish();
            have_modes = true;
            continue;
        }
        if (measured_all) throw ParseError(loc, keyword, "MEASURE-ALL must be the last statement");

        StatementKind kind;
        if (keyword == "MODES") {
            throw ParseError(loc, keyword, "MODES may appear only once");
        } else if (keyword == "PHOTON") {
            if (past_photons) throw ParseError(loc, keyword, "PHOTON statements must precede all operations");
            stmt::Photon p;
            p.bin = args.integer<std::uint32_t>("bin");
            if (p.bin < 1 || p.bin > prog.modes.bins) {
                throw ParseError({line_no, args.column_of("bin")}, args.value_of("bin"), "bin out of range");
            }
            p.pol = args.polarization("pol");
            p.spatial = args.integer<std::uint32_t>("spatial", 0u);
            if (p.spatial >= prog.modes.spatial) {
                throw ParseError({line_no, args.column_of("spatial")}, args.value_of("spatial"),
                                 "spatial mode out of range");
            }
            p.internal = args.integer<std::uint32_t>("internal", 0u);
            if (p.internal > 1) {
                throw ParseError({line_no, args.column_of("internal")}, args.value_of("internal"),
                                 "internal must be 0 or 1");
            }
            if (p.internal == 1 && !prog.modes.alpha) {
                throw ParseError({line_no, args.column_of("internal")}, args.value_of("internal"),
                                 "internal=1 needs alpha in MODES");
            }
            kind = p;
        } else {
            past_photons = true;
            if (keyword == "ROT") {
                stmt::Rot r;
                r.bin = bin_arg("bin");
                r.theta = args.real("theta");
                kind = r;
            } else if (keyword == "COUPLE") {
                stmt::Couple c;
                c.bin_a = bin_arg("bin_a");
                c.bin_b = bin_arg("bin_b");
                c.theta = args.real("theta");
                c.phi = args.real("phi", 0.0);
                kind = c;
            } else if (keyword == "HWP") {
                stmt::Hwp h;
                h.bin = bin_arg("bin");
                h.angle_deg = args.real("angle");
                kind = h;
            } else if (keyword == "PHASE") {
                stmt::Phase ph;
                ph.bin = bin_arg("bin");
                ph.pol = args.polarization("pol");
                ph.phi = args.real("phi");
                kind = ph;
            } else if (keyword == "SHIFT") {
                stmt::Shift sh;
                sh.delta = args.integer<int>("delta");
                if (sh.delta == 0) {
                    throw ParseError({line_no, args.column_of("delta")}, args.value_of("delta"), "delta must be nonzero");
                }
                kind = sh;
            } else if (keyword == "HERALD") {
                stmt::Herald h;
                h.bin = bin_arg("bin");
                h.pol = args.polarization("pol");
                h.n = args.integer<int>("n");
                if (h.n < 0) throw ParseError({line_no, args.column_of("n")}, args.value_of("n"), "n must be >= 0");
                kind = h;
            } else if (keyword == "READ") {
                stmt::Read r;
                r.bin = bin_arg("bin");
                r.pol = args.polarization("pol");
                kind = r;
            } else if (keyword == "MEASURE-ALL") {
                kind = stmt::MeasureAll{};
                measured_all = true;
            } else {
                throw ParseError(loc, keyword, "unknown keyword");
            }
        }
        args.finish();
        prog.statements.push_back({kind, loc});
        if (end == source.size()) break;
    }
    if (!have_modes) throw ParseError({line_no == 0 ? 1 : line_no, 1}, "", "missing MODES header");

    const auto range = detail::bin_range(prog);
    for (const auto& r : refs) {
        if (r.bin < range.lo || r.bin > range.hi) {
            throw ParseError(r.loc, r.token,
                             fmt::format("bin out of range [{}, {}]", range.lo, range.hi));
        }
    }
    return prog;
}

// ---------------------------------------------------------------------------
// Execution

struct RunResult {
    /// Detector modes of the distribution keys, e.g. "1H".
    std::vector<std::string> modes;
    /// Photon-count tuples over `modes`, conditioned on every herald.
    Distribution distribution;
    /// Product of the herald probabilities; 1 without heralds.
    double success_probability = 1.0;
    /// Squared norm after each non-PHOTON statement.
    std::vector<double> norm_trace;
    std::uint64_t program_hash = 0;
};

namespace detail {

inline FockState initial_state(const Program& p) {
    bool labelled = false;
    for (const auto& s : p.statements) {
        if (const auto* ph = std::get_if<stmt::Photon>(&s.kind)) labelled = labelled || ph->internal == 1;
    }
    ModeRegistry reg = ModeRegistry::grid(1, p.modes.bins, p.modes.spatial, labelled ? 2 : 1);
    const double alpha = p.modes.alpha.value_or(1.0);
    std::vector<PhotonWavefunction> photons;
    for (const auto& s : p.statements) {
        const auto* ph = std::get_if<stmt::Photon>(&s.kind);
        if (!ph) continue;
        ModeIndex m{ph->spatial, ph->bin, ph->pol, 0};
        PhotonWavefunction w;
        if (ph->internal == 1) {
            w.components.emplace_back(m, Complex{alpha});
            ModeIndex m1 = m;
            m1.internal = 1;
            w.components.emplace_back(m1, Complex{std::sqrt(1 - alpha * alpha)});
        } else {
            w.components.emplace_back(m, Complex{1.0});
        }
        photons.push_back(std::move(w));
    }
    if (photons.empty()) return FockState(reg);
    return product_state(reg, photons);
}

}  // namespace detail

inline RunResult run(const Program& program) {
    RunResult result;
    result.program_hash = program_hash(program);
    FockState state = detail::initial_state(program);
    std::vector<ModeIndex> reads;
    std::optional<ModeIndex> read_processing;
    bool measure_all = false;
    bool failed = false;

    auto touches_read = [&](std::uint32_t bin, std::optional<Polarization> pol) {
        for (const auto& r : reads) {
            if (r.time_bin == bin && (!pol || r.polarization == *pol)) return true;
        }
        return false;
    };

    for (const auto& s : program.statements) {
        if (std::holds_alternative<stmt::Photon>(s.kind)) continue;
        try {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    auto guard = [&](std::uint32_t bin, std::optional<Polarization> pol) {
                        if (touches_read(bin, pol)) {
                            throw RunError(s.location, fmt::format("bin {} has already been read", bin));
                        }
                    };
                    if (failed && !std::is_same_v<T, stmt::Read> && !std::is_same_v<T, stmt::MeasureAll>) return;
                    if constexpr (std::is_same_v<T, stmt::Rot>) {
                        guard(v.bin, std::nullopt);
                        state = pol_rotation(state, v.bin, v.theta);
                    } else if constexpr (std::is_same_v<T, stmt::Couple>) {
                        guard(v.bin_a, kH);
                        guard(v.bin_b, kV);
                        state = pol_coupling(state, v.bin_a, v.bin_b, v.theta, v.phi);
                    } else if constexpr (std::is_same_v<T, stmt::Hwp>) {
                        guard(v.bin, std::nullopt);
                        state = waveplate(state, v.bin, v.angle_deg * std::numbers::pi / 180.0);
                    } else if constexpr (std::is_same_v<T, stmt::Phase>) {
                        guard(v.bin, v.pol);
                        state = phase_shift(state, v.bin, v.pol, v.phi);
                    } else if constexpr (std::is_same_v<T, stmt::Shift>) {
                        if (read_processing) {
                            throw RunError(s.location, "SHIFT would move the already-read mode " +
                                                           to_string(*read_processing));
                        }
                        state = displacement(state, v.delta);
                    } else if constexpr (std::is_same_v<T, stmt::Herald>) {
                        guard(v.bin, v.pol);
                        if (static_cast<unsigned>(v.n) > state.photon_count()) {
                            failed = true;
                            result.success_probability = 0;
                            return;
                        }
                        const std::array<DetectionEvent, 1> ev{DetectionEvent{bin_mode(v.bin, v.pol), v.n}};
                        Projection p = herald(state, ev);
                        result.success_probability *= p.probability;
                        state = p.state;
                        failed = !p.success();
                    } else if constexpr (std::is_same_v<T, stmt::Read>) {
                        ModeIndex m = bin_mode(v.bin, v.pol);
                        if (!state.registry().contains(m)) throw RegistryError("mode " + to_string(m) + " is not in the registry");
                        if (touches_read(v.bin, v.pol)) throw RunError(s.location, "mode " + to_string(m) + " read twice");
                        reads.push_back(m);
                        if (v.pol == kH) read_processing = m;
                    } else {
                        measure_all = true;
                    }
                },
                s.kind);
        } catch (const RunError&) {
            throw;
        } catch (const std::exception& e) {
            throw RunError(s.location, e.what());
        }
        result.norm_trace.push_back(failed ? 0.0 : state.norm_squared());
    }

    std::vector<ModeIndex> measured = reads;
    if (measure_all) {
        for (const auto& m : state.registry().detector_modes()) {
            bool detected = false;
            for (auto pos : state.registry().positions_of(m)) detected = detected || state.is_detected(pos);
            if (!detected && std::find(measured.begin(), measured.end(), m) == measured.end()) measured.push_back(m);
        }
    }
    for (const auto& m : measured) result.modes.push_back(to_string(m));
    if (!failed && !measured.empty()) result.distribution = measure_distribution(state, measured);
    return result;
}

}  // namespace timebin
