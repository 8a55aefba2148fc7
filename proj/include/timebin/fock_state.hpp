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

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "timebin/errors.hpp"
#include "timebin/mode.hpp"

namespace timebin {

using Complex = std::complex<double>;

/// Amplitudes below this modulus are dropped after every operation.
inline constexpr double kPruneThreshold = 1e-14;
inline constexpr double kUnitarityTolerance = 1e-12;
inline constexpr double kNormTolerance = 1e-12;

/// Photon number per registry position.
using Occupation = std::vector<std::uint8_t>;

struct OccupationHash {
    std::size_t operator()(const Occupation& o) const noexcept {
        return std::hash<std::string_view>{}(
            std::string_view(reinterpret_cast<const char*>(o.data()), o.size()));
    }
};

using AmplitudeMap = std::unordered_map<Occupation, Complex, OccupationHash>;

namespace detail {

inline double factorial(unsigned n) {
    static const auto table = [] {
        std::array<double, 32> t{};
        t[0] = 1;
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<double>(i);
        return t;
    }();
    if (n >= table.size()) throw DomainError("photon number too large");
    return table[n];
}

inline double binomial(unsigned n, unsigned k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

inline Complex ipow(Complex base, unsigned e) {
    Complex r{1.0, 0.0};
    for (unsigned i = 0; i < e; ++i) r *= base;
    return r;
}

inline void prune(AmplitudeMap& amps) {
    std::erase_if(amps, [](const auto& kv) { return std::abs(kv.second) < kPruneThreshold; });
}

}  // namespace detail

/// Sparse superposition over occupation vectors of a mode registry.
///
/// Values are immutable once built; every operation returns a new state.
/// The squared norm is 1 for freshly prepared states and may drop below 1
/// only for explicitly unnormalized projections.
class FockState {
   public:
    /// Vacuum over the given registry.
    explicit FockState(ModeRegistry registry)
        : registry_(std::move(registry)), detected_(registry_.size(), false) {
        amplitudes_.emplace(Occupation(registry_.size(), 0), Complex{1.0, 0.0});
    }

    /// Raw constructor; every occupation vector must have registry length and
    /// sum to photon_count.
    FockState(ModeRegistry registry, unsigned photon_count, AmplitudeMap amplitudes, std::vector<bool> detected = {})
        : registry_(std::move(registry)),
          photon_count_(photon_count),
          amplitudes_(std::move(amplitudes)),
          detected_(std::move(detected)) {
        if (detected_.empty()) detected_.assign(registry_.size(), false);
        if (detected_.size() != registry_.size()) throw DomainError("detected flags do not match registry size");
        for (const auto& [occ, amp] : amplitudes_) {
            if (occ.size() != registry_.size()) throw DomainError("occupation length does not match registry size");
            unsigned total = 0;
            for (auto n : occ) total += n;
            if (total != photon_count_) throw DomainError("occupation does not sum to the photon count");
        }
        detail::prune(amplitudes_);
    }

    [[nodiscard]] const ModeRegistry& registry() const { return registry_; }
    [[nodiscard]] unsigned photon_count() const { return photon_count_; }
    [[nodiscard]] const AmplitudeMap& amplitudes() const { return amplitudes_; }
    [[nodiscard]] std::size_t term_count() const { return amplitudes_.size(); }
    [[nodiscard]] bool is_detected(std::size_t position) const { return detected_[position]; }
    [[nodiscard]] const std::vector<bool>& detected() const { return detected_; }

    [[nodiscard]] Complex amplitude(const Occupation& occ) const {
        auto it = amplitudes_.find(occ);
        return it == amplitudes_.end() ? Complex{} : it->second;
    }

    [[nodiscard]] double norm_squared() const {
        double s = 0;
        for (const auto& [occ, amp] : amplitudes_) s += std::norm(amp);
        return s;
    }

    /// Occupation vector with the given photons placed.
    [[nodiscard]] Occupation occupation(std::span<const std::pair<ModeIndex, unsigned>> placements) const {
        Occupation occ(registry_.size(), 0);
        for (const auto& [mode, n] : placements) occ[registry_.index_of(mode)] += static_cast<std::uint8_t>(n);
        return occ;
    }

    [[nodiscard]] FockState normalized() const {
        double n = norm_squared();
        if (n <= 0) throw DomainError("cannot normalize a zero state");
        AmplitudeMap out = amplitudes_;
        double scale = 1.0 / std::sqrt(n);
        for (auto& [occ, amp] : out) amp *= scale;
        return FockState(registry_, photon_count_, std::move(out), detected_);
    }

    [[nodiscard]] FockState scaled(Complex factor) const {
        AmplitudeMap out = amplitudes_;
        for (auto& [occ, amp] : out) amp *= factor;
        return FockState(registry_, photon_count_, std::move(out), detected_);
    }

    /// Same state over a registry that extends this one (existing positions
    /// unchanged, new modes empty).
    [[nodiscard]] FockState extended_to(const ModeRegistry& larger) const {
        if (larger.size() < registry_.size()) throw RegistryError("registry does not extend the state's registry");
        for (std::size_t i = 0; i < registry_.size(); ++i) {
            if (!(larger[i] == registry_[i])) throw RegistryError("registry does not extend the state's registry");
        }
        AmplitudeMap out;
        for (const auto& [occ, amp] : amplitudes_) {
            Occupation o = occ;
            o.resize(larger.size(), 0);
            out.emplace(std::move(o), amp);
        }
        auto det = detected_;
        det.resize(larger.size(), false);
        return FockState(larger, photon_count_, std::move(out), std::move(det));
    }

    /// Inner product <this|other>; both states must share a registry.
    [[nodiscard]] Complex inner(const FockState& other) const {
        if (!(registry_ == other.registry_)) throw RegistryError("inner product of states over different registries");
        Complex s{};
        for (const auto& [occ, amp] : amplitudes_) s += std::conj(amp) * other.amplitude(occ);
        return s;
    }

   private:
    ModeRegistry registry_;
    unsigned photon_count_ = 0;
    AmplitudeMap amplitudes_;
    std::vector<bool> detected_;
};

/// Squared overlap of the normalized versions of two pure states.
inline double fidelity(const FockState& a, const FockState& b) {
    double na = a.norm_squared();
    double nb = b.norm_squared();
    if (na <= 0 || nb <= 0) return 0;
    return std::norm(a.inner(b)) / (na * nb);
}

// ---------------------------------------------------------------------------
// Preparation

struct Placement {
    ModeIndex mode;
    int count = 1;
};

/// Single-term state with the given photons placed; amplitude 1.
inline FockState new_state(const ModeRegistry& registry, std::span<const Placement> placements) {
    Occupation occ(registry.size(), 0);
    unsigned total = 0;
    for (const auto& p : placements) {
        if (p.count < 0) throw DomainError("negative photon count for mode " + to_string(p.mode));
        std::size_t i = registry.index_of(p.mode);
        occ[i] = static_cast<std::uint8_t>(occ[i] + p.count);
        total += static_cast<unsigned>(p.count);
    }
    AmplitudeMap amps;
    amps.emplace(std::move(occ), Complex{1.0, 0.0});
    return FockState(registry, total, std::move(amps));
}

inline FockState new_state(const ModeRegistry& registry, std::initializer_list<Placement> placements) {
    return new_state(registry, std::span<const Placement>(placements.begin(), placements.size()));
}

/// Single-photon wavefunction: the photon's creation operator as a linear
/// combination of mode creation operators.
struct PhotonWavefunction {
    std::vector<std::pair<ModeIndex, Complex>> components;
};

/// Product of creation operators applied to vacuum, normalized.
inline FockState product_state(const ModeRegistry& registry, std::span<const PhotonWavefunction> photons) {
    AmplitudeMap terms;
    terms.emplace(Occupation(registry.size(), 0), Complex{1.0, 0.0});
    for (const auto& photon : photons) {
        AmplitudeMap next;
        for (const auto& [occ, amp] : terms) {
            for (const auto& [mode, c] : photon.components) {
                std::size_t i = registry.index_of(mode);
                Occupation o = occ;
                o[i] += 1;
                next[o] += amp * c * std::sqrt(static_cast<double>(o[i]));
            }
        }
        detail::prune(next);
        terms = std::move(next);
    }
    FockState s(registry, static_cast<unsigned>(photons.size()), std::move(terms));
    if (s.norm_squared() <= 0) throw DomainError("photon wavefunctions produce a zero state");
    return s.normalized();
}

/// Normalized superposition of placement patterns with the given weights.
struct WeightedPlacements {
    Complex weight;
    std::vector<Placement> placements;
};

inline FockState superposition(const ModeRegistry& registry, std::span<const WeightedPlacements> terms) {
    AmplitudeMap amps;
    std::optional<unsigned> count;
    for (const auto& t : terms) {
        FockState single = new_state(registry, std::span<const Placement>(t.placements));
        if (count && *count != single.photon_count()) throw DomainError("superposed terms differ in photon number");
        count = single.photon_count();
        for (const auto& [occ, amp] : single.amplitudes()) amps[occ] += t.weight * amp;
    }
    if (!count) throw DomainError("empty superposition");
    FockState s(registry, *count, std::move(amps));
    if (s.norm_squared() <= 0) throw DomainError("superposition cancels to zero");
    return s.normalized();
}

// ---------------------------------------------------------------------------
// Evolution

/// 2x2 unitary acting on a pair of modes. Entry (r, c) is the amplitude for a
/// photon entering column mode c to leave in row mode r; row/column 0 is
/// `first`.
struct TwoModeUnitary {
    std::array<Complex, 4> m{Complex{1}, Complex{0}, Complex{0}, Complex{1}};
    ModeIndex first;
    ModeIndex second;

    [[nodiscard]] Complex operator()(int r, int c) const { return m[static_cast<std::size_t>(2 * r + c)]; }

    /// [[cos t, -e^{-i p} sin t], [e^{i p} sin t, cos t]]; the single coupler
    /// convention used throughout the library.
    static TwoModeUnitary coupler(ModeIndex first, ModeIndex second, double theta, double phi = 0.0) {
        double c = std::cos(theta);
        double s = std::sin(theta);
        return {{Complex{c}, -std::polar(s, -phi), std::polar(s, phi), Complex{c}}, first, second};
    }

    /// Half-wave plate at the given angle (radians):
    /// [[cos 2a, sin 2a], [sin 2a, -cos 2a]] with `first` = H, `second` = V.
    static TwoModeUnitary half_wave_plate(ModeIndex h, ModeIndex v, double angle) {
        double c = std::cos(2 * angle);
        double s = std::sin(2 * angle);
        return {{Complex{c}, Complex{s}, Complex{s}, Complex{-c}}, h, v};
    }

    [[nodiscard]] double unitarity_error() const {
        double err = 0;
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) {
                Complex s = (*this)(r, 0) * std::conj((*this)(c, 0)) + (*this)(r, 1) * std::conj((*this)(c, 1));
                err = std::max(err, std::abs(s - Complex{r == c ? 1.0 : 0.0}));
            }
        }
        return err;
    }
};

namespace detail {

inline void require_live(const FockState& s, std::size_t position) {
    if (s.is_detected(position)) {
        throw RegistryError("mode " + to_string(s.registry()[position]) + " has already been read out");
    }
}

}  // namespace detail

/// Bosonic two-mode transformation. Each creation operator maps linearly
/// under u; occupation-basis elements follow from the binomial expansion.
inline FockState apply_two_mode(const FockState& state, const TwoModeUnitary& u) {
    if (u.unitarity_error() > kUnitarityTolerance) throw ValidationError("two-mode matrix is not unitary");
    const auto& reg = state.registry();
    std::size_t ia = reg.index_of(u.first);
    std::size_t ib = reg.index_of(u.second);
    if (ia == ib) throw DomainError("two-mode operation needs two distinct modes");
    detail::require_live(state, ia);
    detail::require_live(state, ib);

    AmplitudeMap out;
    std::vector<Complex> coef;
    for (const auto& [occ, amp] : state.amplitudes()) {
        unsigned na = occ[ia];
        unsigned nb = occ[ib];
        unsigned n = na + nb;
        if (n == 0) {
            out[occ] += amp;
            continue;
        }
        coef.assign(n + 1, Complex{});
        // (u00 a' + u10 b')^na (u01 a' + u11 b')^nb, indexed by the power of a'.
        for (unsigned k = 0; k <= na; ++k) {
            Complex left = detail::binomial(na, k) * detail::ipow(u(0, 0), k) * detail::ipow(u(1, 0), na - k);
            for (unsigned l = 0; l <= nb; ++l) {
                Complex right = detail::binomial(nb, l) * detail::ipow(u(0, 1), l) * detail::ipow(u(1, 1), nb - l);
                coef[k + l] += left * right;
            }
        }
        double in_norm = std::sqrt(detail::factorial(na) * detail::factorial(nb));
        Occupation o = occ;
        for (unsigned m = 0; m <= n; ++m) {
            if (coef[m] == Complex{}) continue;
            o[ia] = static_cast<std::uint8_t>(m);
            o[ib] = static_cast<std::uint8_t>(n - m);
            out[o] += amp * coef[m] * std::sqrt(detail::factorial(m) * detail::factorial(n - m)) / in_norm;
        }
    }
    return FockState(reg, state.photon_count(), std::move(out), state.detected());
}

/// Multiplies each term by e^{i phi n}, n the occupation of `mode`.
inline FockState apply_phase(const FockState& state, const ModeIndex& mode, double phi) {
    std::size_t i = state.registry().index_of(mode);
    detail::require_live(state, i);
    AmplitudeMap out;
    for (const auto& [occ, amp] : state.amplitudes()) out.emplace(occ, amp * std::polar(1.0, phi * occ[i]));
    return FockState(state.registry(), state.photon_count(), std::move(out), state.detected());
}

/// Moves the content of each listed source position to its target position,
/// growing the registry by `new_modes` first. Positions that are not a target
/// of any move, but are a source, end up empty.
inline FockState remap_modes(const FockState& state, std::span<const ModeIndex> new_modes,
                             std::span<const std::pair<ModeIndex, ModeIndex>> moves) {
    ModeRegistry reg = state.registry();
    for (const auto& m : new_modes) reg.add(m);
    FockState grown = state.extended_to(reg);
    std::vector<std::pair<std::size_t, std::size_t>> pos;
    for (const auto& [from, to] : moves) pos.emplace_back(reg.index_of(from), reg.index_of(to));

    AmplitudeMap out;
    for (const auto& [occ, amp] : grown.amplitudes()) {
        Occupation o = occ;
        for (const auto& [from, to] : pos) o[from] = 0;
        for (const auto& [from, to] : pos) o[to] = occ[from];
        out[o] += amp;
    }
    std::vector<bool> det = grown.detected();
    for (const auto& [from, to] : pos) det[from] = false;
    for (const auto& [from, to] : pos) det[to] = grown.is_detected(from);
    return FockState(reg, state.photon_count(), std::move(out), std::move(det));
}

// ---------------------------------------------------------------------------
// Measurement

/// Outcome distribution keyed by photon-count tuples. Missing keys have
/// probability zero.
class Distribution {
   public:
    using Key = std::vector<unsigned>;

    void add(const Key& key, double p) { probabilities_[key] += p; }

    [[nodiscard]] double probability(const Key& key) const {
        auto it = probabilities_.find(key);
        return it == probabilities_.end() ? 0.0 : it->second;
    }

    [[nodiscard]] double total() const {
        double s = 0;
        for (const auto& [k, p] : probabilities_) s += p;
        return s;
    }

    [[nodiscard]] const std::map<Key, double>& entries() const { return probabilities_; }
    [[nodiscard]] bool empty() const { return probabilities_.empty(); }

   private:
    std::map<Key, double> probabilities_;
};

namespace detail {

/// Label-blind photon count in each listed detector mode.
inline std::vector<std::vector<std::size_t>> detector_positions(const ModeRegistry& reg,
                                                                 std::span<const ModeIndex> modes) {
    std::vector<std::vector<std::size_t>> out;
    out.reserve(modes.size());
    for (const auto& m : modes) {
        auto pos = reg.positions_of(m);
        if (pos.empty()) throw RegistryError("mode " + to_string(m.detector_mode()) + " is not in the registry");
        out.push_back(std::move(pos));
    }
    return out;
}

inline unsigned count_in(const Occupation& occ, const std::vector<std::size_t>& positions) {
    unsigned n = 0;
    for (auto p : positions) n += occ[p];
    return n;
}

}  // namespace detail

/// Full photon-count distribution over the listed modes. Internal labels are
/// summed incoherently; probabilities add up to the state's squared norm.
inline Distribution measure_distribution(const FockState& state, std::span<const ModeIndex> modes) {
    auto groups = detail::detector_positions(state.registry(), modes);
    Distribution d;
    Distribution::Key key(groups.size());
    for (const auto& [occ, amp] : state.amplitudes()) {
        for (std::size_t g = 0; g < groups.size(); ++g) key[g] = detail::count_in(occ, groups[g]);
        d.add(key, std::norm(amp));
    }
    return d;
}

inline Distribution measure_distribution(const FockState& state, std::initializer_list<ModeIndex> modes) {
    return measure_distribution(state, std::span<const ModeIndex>(modes.begin(), modes.size()));
}

/// A constraint "exactly `count` photons in the union of `modes`".
struct ModeGroup {
    std::vector<ModeIndex> modes;
    unsigned count = 0;
};

/// Result of a projection; `state` is renormalized when probability > 0.
struct Projection {
    FockState state;
    double probability = 0;

    [[nodiscard]] bool success() const { return probability > 0; }
};

/// Post-selection onto the subspace satisfying every group constraint.
/// Non-destructive: projected modes stay live.
inline Projection project(const FockState& state, std::span<const ModeGroup> groups) {
    std::vector<std::vector<std::size_t>> positions;
    for (const auto& g : groups) {
        std::vector<std::size_t> merged;
        for (const auto& pos : detail::detector_positions(state.registry(), g.modes)) {
            merged.insert(merged.end(), pos.begin(), pos.end());
        }
        positions.push_back(std::move(merged));
    }
    AmplitudeMap kept;
    double p = 0;
    for (const auto& [occ, amp] : state.amplitudes()) {
        bool ok = true;
        for (std::size_t g = 0; g < groups.size() && ok; ++g) ok = detail::count_in(occ, positions[g]) == groups[g].count;
        if (ok) {
            kept.emplace(occ, amp);
            p += std::norm(amp);
        }
    }
    FockState projected(state.registry(), state.photon_count(), std::move(kept), state.detected());
    if (p <= 0) return {std::move(projected), 0.0};
    return {projected.normalized(), p};
}

/// Photon-number detection on one detector mode. The internal label of
/// `mode` is ignored.
struct DetectionEvent {
    ModeIndex mode;
    int count = 0;
};

/// Projects onto the observed counts and retires the detected modes.
///
/// When every surviving term agrees on the internal-label configuration of
/// the detected photons, those photons are removed and photon_count drops by
/// the number detected. Otherwise the detected occupations are kept as a
/// frozen record so that the remaining modes carry the correct mixture.
/// An impossible event returns probability 0 rather than throwing.
inline Projection herald(const FockState& state, std::span<const DetectionEvent> events) {
    const auto& reg = state.registry();
    std::vector<ModeGroup> groups;
    std::vector<std::size_t> positions;
    for (const auto& e : events) {
        if (e.count < 0) throw DomainError("negative detection count");
        if (static_cast<unsigned>(e.count) > state.photon_count()) {
            throw DomainError("detection count exceeds the photon number of the state");
        }
        for (auto p : reg.positions_of(e.mode)) {
            detail::require_live(state, p);
            positions.push_back(p);
        }
        groups.push_back({{e.mode}, static_cast<unsigned>(e.count)});
    }
    Projection proj = project(state, groups);

    std::vector<bool> det = state.detected();
    for (auto p : positions) det[p] = true;

    bool pure = true;
    const Occupation* reference = nullptr;
    for (const auto& [occ, amp] : proj.state.amplitudes()) {
        if (!reference) {
            reference = &occ;
            continue;
        }
        for (auto p : positions) pure = pure && occ[p] == (*reference)[p];
    }
    if (!proj.success() || !pure) {
        return {FockState(reg, proj.state.photon_count(), proj.state.amplitudes(), std::move(det)), proj.probability};
    }
    unsigned removed = 0;
    for (const auto& e : events) removed += static_cast<unsigned>(e.count);
    AmplitudeMap out;
    for (const auto& [occ, amp] : proj.state.amplitudes()) {
        Occupation o = occ;
        for (auto p : positions) o[p] = 0;
        out.emplace(std::move(o), amp);
    }
    return {FockState(reg, state.photon_count() - removed, std::move(out), std::move(det)), proj.probability};
}

inline Projection herald(const FockState& state, std::initializer_list<DetectionEvent> events) {
    return herald(state, std::span<const DetectionEvent>(events.begin(), events.size()));
}

}  // namespace timebin
