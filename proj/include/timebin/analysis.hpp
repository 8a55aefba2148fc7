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

// Truth tables in product measurement bases, classical fidelities, the
// process-fidelity bounds derived from two complementary fidelities, and the
// partial-distinguishability model with its grid fit.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "timebin/errors.hpp"
#include "timebin/gates.hpp"

namespace timebin {

enum class Basis : std::uint8_t { HV, AD, RL };

inline std::string_view to_string(Basis b) {
    switch (b) {
        case Basis::HV: return "HV";
        case Basis::AD: return "AD";
        case Basis::RL: return "RL";
    }
    return "?";
}

inline Basis parse_basis(std::string_view s) {
    if (s == "HV") return Basis::HV;
    if (s == "AD") return Basis::AD;
    if (s == "RL") return Basis::RL;
    throw DomainError("unknown basis '" + std::string(s) + "' (expected HV, AD or RL)");
}

/// Index 0 is the first letter of the basis name: H, A or R.
inline PolarizationQubit basis_state(Basis b, int index) {
    const std::string_view name = to_string(b);
    return PolarizationQubit::from_label(name[static_cast<std::size_t>(index)]);
}

/// Control basis, target basis; written "HV,AD".
struct BasisPair {
    Basis control = Basis::HV;
    Basis target = Basis::HV;

    friend bool operator==(const BasisPair&, const BasisPair&) = default;

    static BasisPair parse(std::string_view s) {
        const auto comma = s.find(',');
        if (comma == std::string_view::npos) throw DomainError("basis pair '" + std::string(s) + "' needs a comma");
        return {parse_basis(s.substr(0, comma)), parse_basis(s.substr(comma + 1))};
    }

    [[nodiscard]] std::string str() const {
        return std::string(to_string(control)) + "," + std::string(to_string(target));
    }

    /// Label of logical index 2c + t, e.g. "HA".
    [[nodiscard]] std::string label(int index) const {
        std::string out;
        out += to_string(control)[static_cast<std::size_t>(index / 2)];
        out += to_string(target)[static_cast<std::size_t>(index % 2)];
        return out;
    }
};

// ---------------------------------------------------------------------------
// Gates as functions on polarization inputs

/// Output of one gate use, conditioned on success. Each branch is a pure
/// two-qubit component; together they form a mixture whose weights are the
/// squared branch norms.
struct GateRun {
    std::vector<LogicalAmplitudes> branches;
    double success_probability = 0;
};

using TwoQubitGate = std::function<GateRun(const PolarizationQubit&, const PolarizationQubit&)>;

inline TwoQubitGate ideal_cphase_gate() {
    return [](const PolarizationQubit& c, const PolarizationQubit& t) {
        return GateRun{{apply_cphase(product_amplitudes(c, t))}, 1.0};
    };
}

inline TwoQubitGate identity_gate() {
    return [](const PolarizationQubit& c, const PolarizationQubit& t) {
        return GateRun{{product_amplitudes(c, t)}, 1.0};
    };
}

/// Overlap alpha between the target photon's wavepacket and the control's.
struct DistinguishabilityModel {
    double alpha = 1.0;
};

inline void validate(const DistinguishabilityModel& m) {
    if (!(m.alpha >= 0.0 && m.alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
}

/// Encoded two-photon input with the control photon in internal label 0 and
/// the target photon in alpha (label 0) + sqrt(1 - alpha^2) (label 1).
inline FockState with_distinguishability(const DistinguishabilityModel& model, const PolarizationQubit& control,
                                         const PolarizationQubit& target, const InterferometerPhases& phases = {}) {
    validate(model);
    if (model.alpha == 1.0) return encode_time_bin(control, target, phases);
    const std::array<Complex, 2> labels{Complex{model.alpha}, Complex{std::sqrt(1.0 - model.alpha * model.alpha)}};
    return encode_time_bin(control, target, phases, labels);
}

/// The waveplate CPhase with post-selection, including encoding and
/// decoding.
inline TwoQubitGate postselected_cphase_gate(DistinguishabilityModel model = {},
                                             double waveplate_angle = kCPhaseWaveplateAngle,
                                             InterferometerPhases phases = {}) {
    validate(model);
    return [=](const PolarizationQubit& c, const PolarizationQubit& t) {
        GateOutcome g = postselected_cphase(with_distinguishability(model, c, t, phases), waveplate_angle);
        GateRun run;
        run.success_probability = g.success_probability;
        if (g.success()) run.branches = decode_time_bin(g.state, phases).branches;
        return run;
    };
}

inline TwoQubitGate klm_cphase_gate() {
    return [](const PolarizationQubit& c, const PolarizationQubit& t) {
        GateOutcome g = klm_cphase_heralded(c, t);
        GateRun run;
        run.success_probability = g.success_probability;
        if (g.amplitudes) run.branches.push_back(*g.amplitudes);
        return run;
    };
}

/// Gates addressable by name: cphase-postselected, cphase-klm, cphase-ideal,
/// identity.
inline TwoQubitGate gate_by_name(std::string_view name, double alpha = 1.0) {
    if (name == "cphase-postselected") return postselected_cphase_gate({alpha});
    if (name == "cphase-klm") return klm_cphase_gate();
    if (name == "cphase-ideal") return ideal_cphase_gate();
    if (name == "identity") return identity_gate();
    throw DomainError("unknown gate '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Truth tables

/// probabilities[i][o] = P(output o | input i), both indexed 2c + t in their
/// basis pairs.
struct TruthTable {
    BasisPair basis_in;
    BasisPair basis_out;
    std::array<std::array<double, 4>, 4> probabilities{};

    [[nodiscard]] double operator()(int in, int out) const {
        return probabilities[static_cast<std::size_t>(in)][static_cast<std::size_t>(out)];
    }
};

inline TruthTable truth_table(const TwoQubitGate& gate, const BasisPair& in, const BasisPair& out) {
    TruthTable table{in, out, {}};
    std::array<LogicalAmplitudes, 4> projectors;
    for (int o = 0; o < 4; ++o) {
        projectors[static_cast<std::size_t>(o)] =
            product_amplitudes(basis_state(out.control, o / 2), basis_state(out.target, o % 2));
    }
    for (int i = 0; i < 4; ++i) {
        GateRun run = gate(basis_state(in.control, i / 2), basis_state(in.target, i % 2));
        double total = 0;
        std::array<double, 4> row{};
        for (const auto& b : run.branches) {
            for (std::size_t o = 0; o < 4; ++o) {
                Complex ip{};
                for (std::size_t k = 0; k < 4; ++k) ip += std::conj(projectors[o][k]) * b[k];
                row[o] += std::norm(ip);
            }
            for (const auto& a : b) total += std::norm(a);
        }
        if (run.success_probability <= 0 || total <= 0) {
            throw DomainError("gate never succeeds for input " + in.label(i));
        }
        for (std::size_t o = 0; o < 4; ++o) table.probabilities[static_cast<std::size_t>(i)][o] = row[o] / total;
    }
    return table;
}

/// Entries of the ideal table above this count as correct transitions.
inline constexpr double kSupportThreshold = 1e-9;

/// Mean probability mass on the correct transitions of `ideal`, one quarter
/// per input row. Each row of the ideal table may have one or two correct
/// outputs; anything broader is not a usable basis combination.
inline double classical_fidelity(const TruthTable& table, const TruthTable& ideal) {
    if (!(table.basis_in == ideal.basis_in) || !(table.basis_out == ideal.basis_out)) {
        throw DomainError("table and reference use different bases");
    }
    double f = 0;
    for (int i = 0; i < 4; ++i) {
        int support = 0;
        for (int o = 0; o < 4; ++o) {
            if (ideal(i, o) > kSupportThreshold) {
                ++support;
                f += table(i, o);
            }
        }
        if (support == 0 || support > 2) {
            throw DomainError("basis combination " + table.basis_in.str() + " -> " + table.basis_out.str() +
                              " does not single out the correct outputs");
        }
    }
    return f / 4.0;
}

/// Against the post-selected gate simulated with indistinguishable photons.
inline double classical_fidelity(const TruthTable& table) {
    return classical_fidelity(table, truth_table(postselected_cphase_gate(), table.basis_in, table.basis_out));
}

struct ProcessBounds {
    double lower = 0;
    double upper = 0;
};

/// [max(0, f_ha + f_ah - 1), min(f_ha, f_ah)]. Inputs within 1e-12 of [0, 1]
/// are clamped first, so simulated fidelities of exactly 1 are accepted.
inline ProcessBounds process_bounds(double f_ha, double f_ah) {
    constexpr double kSlack = 1e-12;
    auto check = [](double f) {
        if (!(f >= -kSlack && f <= 1 + kSlack)) throw DomainError("fidelities must lie in [0, 1]");
        return std::clamp(f, 0.0, 1.0);
    };
    f_ha = check(f_ha);
    f_ah = check(f_ah);
    return {std::max(0.0, f_ha + f_ah - 1.0), std::min(f_ha, f_ah)};
}

/// Strictly above 2/3 in all three.
inline bool nonclassicality_check(double f_ha, double f_ah, double f_aa) {
    constexpr double kClassicalLimit = 2.0 / 3.0;
    return f_ha > kClassicalLimit && f_ah > kClassicalLimit && f_aa > kClassicalLimit;
}

// ---------------------------------------------------------------------------
// Standard configurations and reports

struct TableConfig {
    std::string_view name;
    BasisPair basis_in;
    BasisPair basis_out;
};

/// HA: control in H/V, target in A/D. AH swaps the roles. AA: both inputs in
/// A/D, both outputs read in R/L.
inline constexpr std::array<TableConfig, 3> kStandardConfigs{{
    {"HA", {Basis::HV, Basis::AD}, {Basis::HV, Basis::AD}},
    {"AH", {Basis::AD, Basis::HV}, {Basis::AD, Basis::HV}},
    {"AA", {Basis::AD, Basis::AD}, {Basis::RL, Basis::RL}},
}};

struct FidelityReport {
    double f_ha = 0;
    double f_ah = 0;
    double f_aa = 0;
    double process_lower = 0;
    double process_upper = 0;
    bool nonclassical = false;
};

inline FidelityReport make_report(double f_ha, double f_ah, double f_aa) {
    auto b = process_bounds(f_ha, f_ah);
    return {f_ha, f_ah, f_aa, b.lower, b.upper, nonclassicality_check(f_ha, f_ah, f_aa)};
}

inline std::vector<TruthTable> standard_tables(const TwoQubitGate& gate) {
    std::vector<TruthTable> out;
    for (const auto& c : kStandardConfigs) out.push_back(truth_table(gate, c.basis_in, c.basis_out));
    return out;
}

/// Tables must be in the standard order HA, AH, AA.
inline FidelityReport report_from_tables(std::span<const TruthTable> tables) {
    if (tables.size() != kStandardConfigs.size()) throw DomainError("expected HA, AH and AA tables");
    std::array<double, 3> f{};
    for (std::size_t k = 0; k < 3; ++k) {
        if (!(tables[k].basis_in == kStandardConfigs[k].basis_in) ||
            !(tables[k].basis_out == kStandardConfigs[k].basis_out)) {
            throw DomainError("table " + std::to_string(k) + " is not in the " +
                              std::string(kStandardConfigs[k].name) + " configuration");
        }
        f[k] = classical_fidelity(tables[k]);
    }
    return make_report(f[0], f[1], f[2]);
}

/// Simulated report for the post-selected gate at the given overlap.
inline FidelityReport simulate_report(double alpha) {
    auto tables = standard_tables(postselected_cphase_gate({alpha}));
    return report_from_tables(tables);
}

// ---------------------------------------------------------------------------
// Fitting alpha

/// Sum of absolute entry differences; bases must match.
inline double l1_distance(const TruthTable& a, const TruthTable& b) {
    if (!(a.basis_in == b.basis_in) || !(a.basis_out == b.basis_out)) {
        throw DomainError("L1 distance between tables in different bases");
    }
    double d = 0;
    for (int i = 0; i < 4; ++i) {
        for (int o = 0; o < 4; ++o) d += std::abs(a(i, o) - b(i, o));
    }
    return d;
}

/// alpha_k = k / steps for k = 0..steps, with simulated tables cached per
/// (k, basis combination).
class AlphaGrid {
   public:
    explicit AlphaGrid(int steps = 1000) : steps_(steps) {
        if (steps <= 0) throw DomainError("alpha grid needs at least one step");
    }

    [[nodiscard]] int steps() const { return steps_; }
    [[nodiscard]] double alpha(int k) const { return static_cast<double>(k) / static_cast<double>(steps_); }

    const TruthTable& table(int k, const BasisPair& in, const BasisPair& out) {
        Key key{k, in.str() + "/" + out.str()};
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            it = cache_.emplace(key, truth_table(postselected_cphase_gate({alpha(k)}), in, out)).first;
        }
        return it->second;
    }

   private:
    using Key = std::pair<int, std::string>;
    int steps_;
    std::map<Key, TruthTable> cache_;
};

struct AlphaFit {
    double alpha = 0;
    double l1_distance = 0;
};

/// Grid search for the overlap minimizing the summed L1 distance to the
/// measured tables. Equal distances resolve to the larger alpha.
inline AlphaFit fit_alpha(std::span<const TruthTable> measured, AlphaGrid& grid) {
    if (measured.empty()) throw DomainError("no tables to fit");
    AlphaFit best{-1.0, 0.0};
    for (int k = 0; k <= grid.steps(); ++k) {
        double d = 0;
        for (const auto& m : measured) d += l1_distance(grid.table(k, m.basis_in, m.basis_out), m);
        if (best.alpha < 0 || d <= best.l1_distance) best = {grid.alpha(k), d};
    }
    return best;
}

inline AlphaFit fit_alpha(std::span<const TruthTable> measured) {
    AlphaGrid grid;
    return fit_alpha(measured, grid);
}

}  // namespace timebin
