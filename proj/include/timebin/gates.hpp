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

// Two-qubit gate constructions on time-bin qubits: the waveplate CPhase with
// post-selection, the ancilla-heralded CPhase built from two nonlinear sign
// stages, and type-I / type-II fusion.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "timebin/elements.hpp"
#include "timebin/errors.hpp"
#include "timebin/fock_state.hpp"
#include "timebin/linear_optics.hpp"

namespace timebin {

/// alpha |H> + beta |V>.
struct PolarizationQubit {
    Complex alpha{1.0, 0.0};
    Complex beta{0.0, 0.0};

    [[nodiscard]] double norm_squared() const { return std::norm(alpha) + std::norm(beta); }

    /// One of H, V, D, A, R, L, with D = (H+V)/sqrt2, A = (H-V)/sqrt2,
    /// R = (H+iV)/sqrt2, L = (H-iV)/sqrt2.
    static PolarizationQubit from_label(char label) {
        const double r = std::numbers::sqrt2 / 2;
        switch (label) {
            case 'H': return {Complex{1}, Complex{0}};
            case 'V': return {Complex{0}, Complex{1}};
            case 'D': return {Complex{r}, Complex{r}};
            case 'A': return {Complex{r}, Complex{-r}};
            case 'R': return {Complex{r}, Complex{0, r}};
            case 'L': return {Complex{r}, Complex{0, -r}};
            default: throw DomainError(std::string("unknown polarization label '") + label + "'");
        }
    }
};

namespace detail {

inline void require_normalized(const PolarizationQubit& q) {
    if (std::abs(q.norm_squared() - 1.0) > kNormTolerance) throw DomainError("qubit is not normalized");
}

}  // namespace detail

/// Phases picked up in the long arm of the unbalanced interferometer: the
/// *1 phases while encoding, the *2 phases while decoding.
struct InterferometerPhases {
    double theta_c1 = 0;
    double theta_t1 = 0;
    double theta_c2 = 0;
    double theta_t2 = 0;
};

/// Waveplate angle whose coupling amplitude is exactly 1/sqrt3 (about 27.37
/// degrees; commonly quoted as 27.4).
inline const double kCPhaseWaveplateAngle = std::acos(1.0 / std::sqrt(3.0)) / 2.0;

inline double degrees_to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

/// Two-qubit amplitudes ordered |00>, |01>, |10>, |11> (control, target).
using LogicalAmplitudes = std::array<Complex, 4>;

/// The two modes carrying a qubit's |0> and |1>.
struct QubitModes {
    ModeIndex zero;
    ModeIndex one;
};

/// Result of a probabilistic gate. `state` is renormalized on success;
/// `amplitudes` is present when the state is a pure two-qubit state.
struct GateOutcome {
    FockState state;
    double success_probability = 0;
    std::optional<LogicalAmplitudes> amplitudes;

    [[nodiscard]] bool success() const { return success_probability > 0; }
};

/// Reads the state as two qubits. Returns nothing if any term has photons
/// outside the four modes or with a nonzero internal label.
inline std::optional<LogicalAmplitudes> logical_amplitudes(const FockState& state, const QubitModes& control,
                                                           const QubitModes& target) {
    const auto& reg = state.registry();
    const std::array<std::size_t, 4> pos{reg.index_of(control.zero), reg.index_of(control.one),
                                         reg.index_of(target.zero), reg.index_of(target.one)};
    LogicalAmplitudes out{};
    for (const auto& [occ, amp] : state.amplitudes()) {
        unsigned elsewhere = 0;
        for (std::size_t i = 0; i < occ.size(); ++i) {
            if (std::find(pos.begin(), pos.end(), i) == pos.end()) elsewhere += occ[i];
        }
        if (elsewhere != 0) return std::nullopt;
        if (occ[pos[0]] + occ[pos[1]] != 1 || occ[pos[2]] + occ[pos[3]] != 1) return std::nullopt;
        const int c = occ[pos[1]];
        const int t = occ[pos[3]];
        out[static_cast<std::size_t>(2 * c + t)] += amp;
    }
    return out;
}

/// Squared overlap of two normalized-or-not amplitude vectors.
inline double overlap_fidelity(const LogicalAmplitudes& a, const LogicalAmplitudes& b) {
    Complex ip{};
    double na = 0;
    double nb = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        ip += std::conj(a[i]) * b[i];
        na += std::norm(a[i]);
        nb += std::norm(b[i]);
    }
    if (na <= 0 || nb <= 0) return 0;
    return std::norm(ip) / (na * nb);
}

inline LogicalAmplitudes product_amplitudes(const PolarizationQubit& c, const PolarizationQubit& t) {
    return {c.alpha * t.alpha, c.alpha * t.beta, c.beta * t.alpha, c.beta * t.beta};
}

inline LogicalAmplitudes apply_cphase(LogicalAmplitudes a) {
    a[3] = -a[3];
    return a;
}

// ---------------------------------------------------------------------------
// Post-selected CPhase in the polarization-to-time experiment

/// Control occupies bins 1, 2 in H; target occupies bins 2, 3 in V.
namespace experiment {
inline const ModeIndex kControlEarly = bin_mode(1, kH);
inline const ModeIndex kControlLate = bin_mode(2, kH);
inline const ModeIndex kTargetEarly = bin_mode(2, kV);
inline const ModeIndex kTargetLate = bin_mode(3, kV);
/// Control H/V and target H/V as qubit modes.
inline const QubitModes kControl{kControlEarly, kControlLate};
inline const QubitModes kTarget{kTargetLate, kTargetEarly};
}  // namespace experiment

inline ModeRegistry experiment_registry(std::uint32_t internal_labels = 1) {
    return ModeRegistry::grid(1, 3, 1, internal_labels);
}

/// Polarization-to-time conversion of both photons:
///   control  alpha_C |1H> + e^{i theta_C1} beta_C |2H>
///   target   e^{i theta_T1} alpha_T |3V> + beta_T |2V>
/// `target_internal` gives the target photon's amplitude on each internal
/// label; the control photon is always label 0.
inline FockState encode_time_bin(const PolarizationQubit& control, const PolarizationQubit& target,
                                 const InterferometerPhases& phases, std::span<const Complex> target_internal) {
    detail::require_normalized(control);
    detail::require_normalized(target);
    if (target_internal.empty()) throw DomainError("target photon needs at least one internal label");
    const auto labels = static_cast<std::uint32_t>(target_internal.size());
    ModeRegistry reg = experiment_registry(labels);
    std::vector<PhotonWavefunction> photons(2);
    photons[0].components = {{experiment::kControlEarly, control.alpha},
                             {experiment::kControlLate, std::polar(1.0, phases.theta_c1) * control.beta}};
    for (std::uint32_t l = 0; l < labels; ++l) {
        const Complex w = target_internal[l];
        photons[1].components.emplace_back(bin_mode(3, kV, l), std::polar(1.0, phases.theta_t1) * target.alpha * w);
        photons[1].components.emplace_back(bin_mode(2, kV, l), target.beta * w);
    }
    return product_state(reg, photons);
}

inline FockState encode_time_bin(const PolarizationQubit& control, const PolarizationQubit& target,
                                 const InterferometerPhases& phases = {}) {
    const Complex one{1.0, 0.0};
    return encode_time_bin(control, target, phases, std::span<const Complex>(&one, 1));
}

/// Waveplate on every bin of the main mode, then post-selection of one photon
/// in {1H, 2H} and one in {2V, 3V}.
inline GateOutcome postselected_cphase(const FockState& state, double waveplate_angle) {
    std::set<std::uint32_t> bins;
    for (const auto& m : state.registry().modes()) {
        if (m.spatial == 0) bins.insert(m.time_bin);
    }
    FockState evolved = state;
    for (auto b : bins) evolved = waveplate(evolved, b, waveplate_angle);
    const std::array<ModeGroup, 2> groups{
        ModeGroup{{experiment::kControlEarly, experiment::kControlLate}, 1},
        ModeGroup{{experiment::kTargetEarly, experiment::kTargetLate}, 1},
    };
    Projection p = project(evolved, groups);
    GateOutcome out{p.state, p.probability, std::nullopt};
    if (p.success()) out.amplitudes = logical_amplitudes(p.state, experiment::kControl, experiment::kTarget);
    return out;
}

/// Decoded two-qubit state, split by the internal labels of the two detected
/// photons. Branches are mutually orthogonal; their squared norms add up to
/// the state's squared norm. A single branch means a pure state.
struct TwoQubitEnsemble {
    std::vector<LogicalAmplitudes> branches;

    [[nodiscard]] double norm_squared() const {
        double s = 0;
        for (const auto& b : branches) {
            for (const auto& a : b) s += std::norm(a);
        }
        return s;
    }
};

/// Time-to-polarization conversion back through the same interferometer. The
/// early component of each photon takes the long arm (theta_C2, theta_T2).
/// Amplitudes are reported against the original H/V labels:
///   control  e^{i theta_C2} alpha_C |H> + e^{i theta_C1} beta_C |V>
///   target   e^{i theta_T1} alpha_T |H> + e^{i theta_T2} beta_T |V>
inline TwoQubitEnsemble decode_time_bin(const FockState& state, const InterferometerPhases& phases) {
    const auto& reg = state.registry();
    struct Slot {
        int qubit;  // 0 control, 1 target
        int bit;
        Complex phase;
    };
    std::vector<std::optional<Slot>> slot(reg.size());
    for (std::size_t i = 0; i < reg.size(); ++i) {
        ModeIndex d = reg[i].detector_mode();
        if (d == experiment::kControlEarly) slot[i] = Slot{0, 0, std::polar(1.0, phases.theta_c2)};
        if (d == experiment::kControlLate) slot[i] = Slot{0, 1, Complex{1.0}};
        if (d == experiment::kTargetLate) slot[i] = Slot{1, 0, Complex{1.0}};
        if (d == experiment::kTargetEarly) slot[i] = Slot{1, 1, std::polar(1.0, phases.theta_t2)};
    }
    std::map<std::pair<std::uint32_t, std::uint32_t>, LogicalAmplitudes> by_labels;
    for (const auto& [occ, amp] : state.amplitudes()) {
        std::array<int, 2> bit{-1, -1};
        std::array<std::uint32_t, 2> label{0, 0};
        Complex a = amp;
        for (std::size_t i = 0; i < occ.size(); ++i) {
            if (occ[i] == 0) continue;
            if (!slot[i] || occ[i] != 1 || bit[static_cast<std::size_t>(slot[i]->qubit)] != -1) {
                throw EncodingError("photon outside the expected decoding bins");
            }
            const auto q = static_cast<std::size_t>(slot[i]->qubit);
            bit[q] = slot[i]->bit;
            label[q] = reg[i].internal;
            a *= slot[i]->phase;
        }
        if (bit[0] < 0 || bit[1] < 0) throw EncodingError("decoding needs one control and one target photon");
        by_labels[{label[0], label[1]}][static_cast<std::size_t>(2 * bit[0] + bit[1])] += a;
    }
    TwoQubitEnsemble out;
    for (const auto& [labels, amps] : by_labels) out.branches.push_back(amps);
    return out;
}

// ---------------------------------------------------------------------------
// Heralded CPhase with two nonlinear sign stages

namespace klm {
/// Control |0>,|1> in bins 1,2; target in bins 3,4. Each nonlinear sign
/// stage has one ancilla photon and one empty ancilla bin.
inline constexpr QubitBins kControl{1, 2};
inline constexpr QubitBins kTarget{3, 4};
inline constexpr std::uint32_t kPhotonA = 5;
inline constexpr std::uint32_t kVacuumA = 6;
inline constexpr std::uint32_t kPhotonB = 7;
inline constexpr std::uint32_t kVacuumB = 8;
inline constexpr std::uint32_t kBins = 8;
}  // namespace klm

/// Nonlinear sign unitary on (signal, photon ancilla, empty ancilla). With
/// one ancilla photon in and one detected in the same mode, it maps
/// c0|0> + c1|1> + c2|2> to (c0|0> + c1|1> - c2|2>)/2.
inline Eigen::Matrix3cd nonlinear_sign_matrix() {
    const double s2 = std::numbers::sqrt2;
    const double a = std::pow(2.0, -0.25);
    const double b = std::sqrt(3.0 / s2 - 2.0);
    Eigen::Matrix3cd u;
    u << 1 - s2, a, b,
         a, 0.5, 0.5 - 1 / s2,
         b, 0.5 - 1 / s2, s2 - 0.5;
    return u;
}

inline std::vector<ElementOp> nonlinear_sign_sequence(std::uint32_t signal, std::uint32_t photon,
                                                      std::uint32_t vacuum) {
    const std::array<std::uint32_t, 3> bins{signal, photon, vacuum};
    return mesh_sequence(decompose(nonlinear_sign_matrix()), bins);
}

/// Balanced coupler on the |1> bins, a sign stage on each output, and the
/// inverse coupler.
inline std::vector<ElementOp> klm_cphase_sequence() {
    std::vector<ElementOp> seq = register_coupling_sequence(klm::kControl.late, klm::kTarget.late, std::numbers::pi / 4);
    for (const auto& part : {nonlinear_sign_sequence(klm::kControl.late, klm::kPhotonA, klm::kVacuumA),
                             nonlinear_sign_sequence(klm::kTarget.late, klm::kPhotonB, klm::kVacuumB),
                             register_coupling_sequence(klm::kControl.late, klm::kTarget.late, -std::numbers::pi / 4)}) {
        seq.insert(seq.end(), part.begin(), part.end());
    }
    return seq;
}

/// Detector pattern that heralds success: one photon back in each photon
/// ancilla bin, none in the empty ancilla bins.
inline std::vector<DetectionEvent> klm_herald_events() {
    return {
        {bin_mode(klm::kPhotonA, kV), 1},
        {bin_mode(klm::kVacuumA, kV), 0},
        {bin_mode(klm::kPhotonB, kV), 1},
        {bin_mode(klm::kVacuumB, kV), 0},
    };
}

inline std::vector<ModeIndex> klm_ancilla_modes() {
    return {bin_mode(klm::kPhotonA, kV), bin_mode(klm::kVacuumA, kV), bin_mode(klm::kPhotonB, kV),
            bin_mode(klm::kVacuumB, kV)};
}

inline ModeRegistry klm_registry() { return ModeRegistry::grid(1, klm::kBins); }

/// Logical qubits use alpha for |0> (early bin) and beta for |1> (late bin).
inline FockState klm_input_state(const PolarizationQubit& control, const PolarizationQubit& target) {
    detail::require_normalized(control);
    detail::require_normalized(target);
    std::vector<PhotonWavefunction> photons{
        {{{bin_mode(klm::kControl.early, kV), control.alpha}, {bin_mode(klm::kControl.late, kV), control.beta}}},
        {{{bin_mode(klm::kTarget.early, kV), target.alpha}, {bin_mode(klm::kTarget.late, kV), target.beta}}},
        {{{bin_mode(klm::kPhotonA, kV), Complex{1.0}}}},
        {{{bin_mode(klm::kPhotonB, kV), Complex{1.0}}}},
    };
    return product_state(klm_registry(), photons);
}

inline const QubitModes kKlmControlModes{bin_mode(klm::kControl.early, kV), bin_mode(klm::kControl.late, kV)};
inline const QubitModes kKlmTargetModes{bin_mode(klm::kTarget.early, kV), bin_mode(klm::kTarget.late, kV)};

inline GateOutcome klm_cphase_heralded(const PolarizationQubit& control, const PolarizationQubit& target) {
    const auto seq = klm_cphase_sequence();
    FockState evolved = apply_sequence(klm_input_state(control, target), seq);
    const auto events = klm_herald_events();
    Projection p = herald(evolved, events);
    GateOutcome out{p.state, p.probability, std::nullopt};
    if (p.success()) {
        out.amplitudes = logical_amplitudes(p.state, kKlmControlModes, kKlmTargetModes);
        if (!out.amplitudes) throw EncodingError("heralded state left the logical subspace");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fusion

/// One detector outcome of a fusion measurement.
struct FusionBranch {
    std::vector<unsigned> pattern;
    double probability = 0;
    FockState state;
    bool success = false;
};

struct FusionOutcome {
    std::vector<ModeIndex> detectors;
    std::vector<FusionBranch> branches;
    double success_probability = 0;

    [[nodiscard]] double total_probability() const {
        double s = 0;
        for (const auto& b : branches) s += b.probability;
        return s;
    }

    [[nodiscard]] const FusionBranch* find(const std::vector<unsigned>& pattern) const {
        for (const auto& b : branches) {
            if (b.pattern == pattern) return &b;
        }
        return nullptr;
    }
};

/// Exchange of the |1> bins of the two qubits (a full coupler), then a
/// balanced coupler on qubit b's bins so they are read in the diagonal basis.
inline std::vector<ElementOp> fusion_type1_sequence(QubitBins a, QubitBins b) {
    auto seq = register_coupling_sequence(a.late, b.late, std::numbers::pi / 2);
    auto diag = register_coupling_sequence(b.early, b.late, std::numbers::pi / 4);
    seq.insert(seq.end(), diag.begin(), diag.end());
    return seq;
}

/// As type-I, with both qubits read in the diagonal basis.
inline std::vector<ElementOp> fusion_type2_sequence(QubitBins a, QubitBins b) {
    auto seq = fusion_type1_sequence(a, b);
    auto diag = register_coupling_sequence(a.early, a.late, std::numbers::pi / 4);
    seq.insert(seq.end(), diag.begin(), diag.end());
    return seq;
}

namespace detail {

template <typename IsSuccess>
FusionOutcome run_fusion(const FockState& evolved, std::vector<ModeIndex> detectors, IsSuccess is_success) {
    FusionOutcome out;
    out.detectors = detectors;
    Distribution dist = measure_distribution(evolved, detectors);
    for (const auto& [pattern, p] : dist.entries()) {
        std::vector<DetectionEvent> events;
        for (std::size_t i = 0; i < detectors.size(); ++i) {
            events.push_back({detectors[i], static_cast<int>(pattern[i])});
        }
        Projection proj = herald(evolved, events);
        const bool ok = is_success(pattern);
        out.branches.push_back({pattern, proj.probability, proj.state, ok});
        if (ok) out.success_probability += proj.probability;
    }
    return out;
}

}  // namespace detail

/// Type-I fusion: succeeds when exactly one photon reaches qubit b's two
/// detector bins. The fused qubit remains in qubit a's bins.
inline FusionOutcome fusion_type1(const FockState& state, QubitBins a, QubitBins b) {
    const auto seq = fusion_type1_sequence(a, b);
    FockState evolved = apply_sequence(state, seq);
    return detail::run_fusion(evolved, {bin_mode(b.early, kV), bin_mode(b.late, kV)},
                              [](const std::vector<unsigned>& p) { return p[0] + p[1] == 1; });
}

/// Type-II fusion: succeeds when exactly one photon reaches each qubit's pair
/// of detector bins.
inline FusionOutcome fusion_type2(const FockState& state, QubitBins a, QubitBins b) {
    const auto seq = fusion_type2_sequence(a, b);
    FockState evolved = apply_sequence(state, seq);
    return detail::run_fusion(
        evolved, {bin_mode(a.early, kV), bin_mode(a.late, kV), bin_mode(b.early, kV), bin_mode(b.late, kV)},
        [](const std::vector<unsigned>& p) { return p[0] + p[1] == 1 && p[2] + p[3] == 1; });
}

/// Product of Bell pairs (|00> + |11>)/sqrt2 over the given qubit pairs, all
/// in register polarization.
inline FockState bell_pairs(const ModeRegistry& registry, std::span<const std::pair<QubitBins, QubitBins>> pairs) {
    std::vector<WeightedPlacements> terms{{Complex{1.0}, {}}};
    for (const auto& [x, y] : pairs) {
        std::vector<WeightedPlacements> next;
        for (const auto& t : terms) {
            for (int bit = 0; bit < 2; ++bit) {
                WeightedPlacements w = t;
                w.placements.push_back({bin_mode(bit ? x.late : x.early, kV), 1});
                w.placements.push_back({bin_mode(bit ? y.late : y.early, kV), 1});
                next.push_back(std::move(w));
            }
        }
        terms = std::move(next);
    }
    return superposition(registry, terms);
}

namespace fusion_demo {
/// Two Bell pairs (p, a) and (b, q); a and b are fused.
inline constexpr QubitBins kP{1, 2};
inline constexpr QubitBins kA{3, 4};
inline constexpr QubitBins kB{5, 6};
inline constexpr QubitBins kQ{7, 8};
}  // namespace fusion_demo

inline FockState fusion_demo_input() {
    const std::array<std::pair<QubitBins, QubitBins>, 2> pairs{
        std::pair{fusion_demo::kP, fusion_demo::kA}, std::pair{fusion_demo::kB, fusion_demo::kQ}};
    return bell_pairs(ModeRegistry::grid(1, 8), pairs);
}

}  // namespace timebin
