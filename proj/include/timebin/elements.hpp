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

// Primitive operations on a string of time bins sharing one spatial mode.
//
// Qubits live in the register polarization. To manipulate a bin it is rotated
// into the processing polarization, where it can be displaced relative to the
// register bins, phase shifted, and coupled to a register bin. Everything is
// rotated back to the register polarization afterwards.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "timebin/errors.hpp"
#include "timebin/fock_state.hpp"
#include "timebin/linear_optics.hpp"
#include "timebin/mode.hpp"

namespace timebin {

struct PolRotation {
    std::uint32_t time_bin = 0;
    double theta = 0;
};

/// Coupler between (bin_a, processing) as first mode and (bin_b, register)
/// as second mode.
struct PolCoupling {
    std::uint32_t bin_a = 0;
    std::uint32_t bin_b = 0;
    double theta = 0;
    double phi = 0;
};

struct PhaseShift {
    std::uint32_t time_bin = 0;
    Polarization polarization = Polarization::Register;
    double phi = 0;
};

/// Moves every processing-polarization bin of the main mode by `delta` bins.
struct Displacement {
    int delta = 0;
};

struct ReadOut {
    std::uint32_t time_bin = 0;
    Polarization polarization = Polarization::Register;
};

using ElementOp = std::variant<PolRotation, PolCoupling, PhaseShift, Displacement, ReadOut>;

namespace detail {

/// Every internal sub-mode of (main mode, bin, polarization) in the registry.
inline std::vector<ModeIndex> sub_modes(const FockState& state, std::uint32_t bin, Polarization p) {
    std::vector<ModeIndex> out;
    for (auto pos : state.registry().positions_of(bin_mode(bin, p))) out.push_back(state.registry()[pos]);
    if (out.empty()) throw RegistryError("time bin " + std::to_string(bin) + " is not in the registry");
    return out;
}

inline FockState apply_on_labels(const FockState& state, std::uint32_t bin_first, Polarization pol_first,
                                 std::uint32_t bin_second, Polarization pol_second,
                                 const std::array<Complex, 4>& m) {
    auto firsts = sub_modes(state, bin_first, pol_first);
    auto seconds = sub_modes(state, bin_second, pol_second);
    FockState out = state;
    for (const auto& f : firsts) {
        ModeIndex s = bin_mode(bin_second, pol_second, f.internal);
        if (!state.registry().contains(s)) throw RegistryError("mode " + to_string(s) + " is not in the registry");
        out = apply_two_mode(out, TwoModeUnitary{m, f, s});
    }
    if (seconds.size() != firsts.size()) throw RegistryError("internal labels differ between coupled bins");
    return out;
}

}  // namespace detail

/// Coupler of angle theta between the register (first) and processing
/// (second) polarizations of one bin. theta = pi/2 moves a register photon
/// into the processing polarization.
inline FockState pol_rotation(const FockState& state, std::uint32_t bin, double theta) {
    auto u = TwoModeUnitary::coupler({}, {}, theta);
    return detail::apply_on_labels(state, bin, Polarization::Register, bin, Polarization::Processing, u.m);
}

/// Relabels (bin t, processing) -> (bin t + delta, processing) on the main
/// spatial mode for every internal label. Register modes are untouched.
inline FockState displacement(const FockState& state, int delta) {
    if (delta == 0) throw DomainError("displacement by zero bins");
    const auto& reg = state.registry();
    std::vector<bool> occupied(reg.size(), false);
    for (const auto& [occ, amp] : state.amplitudes()) {
        for (std::size_t i = 0; i < occ.size(); ++i) occupied[i] = occupied[i] || occ[i] > 0;
    }
    std::vector<std::pair<ModeIndex, ModeIndex>> moves;
    std::set<std::uint32_t> new_bins;
    for (std::size_t i = 0; i < reg.size(); ++i) {
        const ModeIndex& m = reg[i];
        if (m.spatial != 0 || m.polarization != Polarization::Processing) continue;
        const long long target = static_cast<long long>(m.time_bin) + delta;
        ModeIndex to = m;
        to.time_bin = static_cast<std::uint32_t>(std::max(0LL, target));
        // An empty mode with nowhere to go needs no bookkeeping.
        if (target < 0 || !reg.contains(to)) {
            if (!occupied[i]) continue;
            if (target < 0) throw DomainError("displacement moves an occupied bin before bin 0");
            new_bins.insert(to.time_bin);
        }
        moves.emplace_back(m, to);
    }
    std::vector<ModeIndex> new_modes;
    const std::uint32_t labels = std::max<std::uint32_t>(1, reg.internal_labels());
    for (auto b : new_bins) {
        for (auto p : {Polarization::Register, Polarization::Processing}) {
            for (std::uint32_t l = 0; l < labels; ++l) new_modes.push_back(bin_mode(b, p, l));
        }
    }
    return remap_modes(state, new_modes, moves);
}

inline FockState phase_shift(const FockState& state, std::uint32_t bin, Polarization pol, double phi) {
    FockState out = state;
    for (const auto& m : detail::sub_modes(state, bin, pol)) out = apply_phase(out, m, phi);
    return out;
}

inline FockState pol_coupling(const FockState& state, std::uint32_t bin_a, std::uint32_t bin_b, double theta,
                              double phi = 0.0) {
    auto u = TwoModeUnitary::coupler({}, {}, theta, phi);
    return detail::apply_on_labels(state, bin_a, Polarization::Processing, bin_b, Polarization::Register, u.m);
}

/// Half-wave plate between the H (processing) and V (register) modes of a
/// bin; `angle` in radians.
inline FockState waveplate(const FockState& state, std::uint32_t bin, double angle) {
    auto u = TwoModeUnitary::half_wave_plate({}, {}, angle);
    return detail::apply_on_labels(state, bin, Polarization::Processing, bin, Polarization::Register, u.m);
}

inline Distribution read_out(const FockState& state, std::uint32_t bin, Polarization pol) {
    ModeIndex m = bin_mode(bin, pol);
    return measure_distribution(state, std::span<const ModeIndex>(&m, 1));
}

/// Applies one element. ReadOut leaves the state unchanged; use read_out for
/// its distribution.
inline FockState apply_element(const FockState& state, const ElementOp& op) {
    return std::visit(
        [&](const auto& e) -> FockState {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, PolRotation>) {
                return pol_rotation(state, e.time_bin, e.theta);
            } else if constexpr (std::is_same_v<T, PolCoupling>) {
                return pol_coupling(state, e.bin_a, e.bin_b, e.theta, e.phi);
            } else if constexpr (std::is_same_v<T, PhaseShift>) {
                return phase_shift(state, e.time_bin, e.polarization, e.phi);
            } else if constexpr (std::is_same_v<T, Displacement>) {
                return displacement(state, e.delta);
            } else {
                (void)read_out(state, e.time_bin, e.polarization);
                return state;
            }
        },
        op);
}

inline FockState apply_sequence(const FockState& state, std::span<const ElementOp> ops) {
    FockState out = state;
    for (const auto& op : ops) out = apply_element(out, op);
    return out;
}

// ---------------------------------------------------------------------------
// Composite sequences

/// Elements realizing a coupler between two register bins, with `first_bin`
/// as the coupler's first mode. Its photon is rotated into the processing
/// polarization, displaced onto `second_bin`, coupled, and brought back.
inline std::vector<ElementOp> register_coupling_sequence(std::uint32_t first_bin, std::uint32_t second_bin,
                                                         double theta, double phi = 0.0) {
    if (first_bin == second_bin) throw DomainError("register coupling needs two distinct bins");
    const int delta = static_cast<int>(second_bin) - static_cast<int>(first_bin);
    return {
        PolRotation{first_bin, std::numbers::pi / 2},
        Displacement{delta},
        PolCoupling{second_bin, second_bin, theta, phi},
        Displacement{-delta},
        PolRotation{first_bin, -std::numbers::pi / 2},
    };
}

/// Elements realizing a mesh whose mode k is the register polarization of
/// bins[k].
inline std::vector<ElementOp> mesh_sequence(const Mesh& mesh, std::span<const std::uint32_t> bins) {
    if (bins.size() != static_cast<std::size_t>(mesh.modes)) throw DomainError("mesh size does not match bin list");
    std::vector<ElementOp> out;
    for (const auto& c : mesh.couplers) {
        auto seq = register_coupling_sequence(bins[static_cast<std::size_t>(c.first)],
                                              bins[static_cast<std::size_t>(c.second)], c.theta, c.phi);
        out.insert(out.end(), seq.begin(), seq.end());
    }
    for (std::size_t k = 0; k < bins.size(); ++k) {
        if (mesh.output_phases[k] != 0.0) out.push_back(PhaseShift{bins[k], Polarization::Register, mesh.output_phases[k]});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Single-qubit gates

/// A qubit is one photon across two register bins: |0> early, |1> late.
struct QubitBins {
    std::uint32_t early = 1;
    std::uint32_t late = 2;
};

/// diag(1, e^{i phi2}) * [[cos t, sin t], [-sin t, cos t]] * diag(1, e^{i phi1})
/// on the (|0>, |1>) basis.
struct SingleQubitGate {
    double theta = 0;
    double phi1 = 0;
    double phi2 = 0;

    [[nodiscard]] Eigen::Matrix2cd matrix() const {
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        Eigen::Matrix2cd m;
        m << c, s * std::polar(1.0, phi1), -s * std::polar(1.0, phi2), c * std::polar(1.0, phi1 + phi2);
        return m;
    }
};

/// Rotate the late bin into processing, bring it onto the early bin, then
/// phase, couple and phase before undoing the displacement and rotation.
inline std::vector<ElementOp> single_qubit_sequence(const SingleQubitGate& gate, QubitBins qubit) {
    if (qubit.early == qubit.late) throw DomainError("qubit bins must differ");
    const int delta = static_cast<int>(qubit.early) - static_cast<int>(qubit.late);
    return {
        PolRotation{qubit.late, std::numbers::pi / 2},
        Displacement{delta},
        PhaseShift{qubit.early, Polarization::Processing, gate.phi1},
        PolCoupling{qubit.early, qubit.early, gate.theta, 0.0},
        PhaseShift{qubit.early, Polarization::Processing, gate.phi2},
        Displacement{-delta},
        PolRotation{qubit.late, -std::numbers::pi / 2},
    };
}

inline FockState single_qubit_apply(const FockState& state, const SingleQubitGate& gate, QubitBins qubit) {
    const auto& reg = state.registry();
    auto early = reg.positions_of(bin_mode(qubit.early, Polarization::Register));
    auto late = reg.positions_of(bin_mode(qubit.late, Polarization::Register));
    if (early.empty() || late.empty()) throw RegistryError("qubit bins are not in the registry");
    for (const auto& [occ, amp] : state.amplitudes()) {
        unsigned n = detail::count_in(occ, early) + detail::count_in(occ, late);
        if (n != 1) throw EncodingError("qubit bins do not hold exactly one photon");
        for (std::size_t i = 0; i < occ.size(); ++i) {
            const ModeIndex& m = reg[i];
            if (occ[i] > 0 && m.spatial == 0 && m.polarization == Polarization::Processing) {
                throw EncodingError("photon found in the processing polarization at bin " + std::to_string(m.time_bin));
            }
        }
    }
    auto seq = single_qubit_sequence(gate, qubit);
    return apply_sequence(state, seq);
}

/// Finds (theta, phi1, phi2) reproducing `target` up to global phase.
/// The reconstructed (0,0) entry is real and non-negative; when the target is
/// diagonal, phi1 = 0 and the relative phase goes to phi2.
inline SingleQubitGate su2_decompose(const Eigen::Matrix2cd& target) {
    const double err = (target * target.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
    if (err > 1e-10) throw ValidationError("target is not unitary");
    const double theta = std::atan2(std::abs(target(0, 1)), std::abs(target(0, 0)));
    constexpr double kDegenerate = 1e-12;
    SingleQubitGate g;
    g.theta = theta;
    if (std::abs(target(0, 1)) < kDegenerate) {
        // Diagonal: remove the phase of (0,0).
        g.theta = 0;
        g.phi1 = 0;
        g.phi2 = std::arg(target(1, 1) / target(0, 0));
        return g;
    }
    // Global phase that makes (0,0) real non-negative; if (0,0) vanishes use
    // (0,1) instead, which fixes phi1 = 0.
    Complex ref = std::abs(target(0, 0)) >= kDegenerate ? target(0, 0) : target(0, 1);
    Complex g_phase = std::conj(ref) / std::abs(ref);
    Eigen::Matrix2cd t = target * g_phase;
    g.phi1 = std::abs(target(0, 0)) >= kDegenerate ? std::arg(t(0, 1)) : 0.0;
    g.phi2 = std::arg(-t(1, 0));
    return g;
}

/// Max-entry distance between two 2x2 matrices after removing the best
/// global phase.
inline double distance_up_to_phase(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Complex overlap = (b.adjoint() * a).trace();
    Complex phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex{1.0};
    return (a - b * phase).cwiseAbs().maxCoeff();
}

}  // namespace timebin
