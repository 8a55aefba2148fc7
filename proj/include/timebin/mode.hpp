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

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "timebin/errors.hpp"

namespace timebin {

/// Register polarization stores qubits between operations (V); processing
/// polarization is where a time bin is manipulated (H).
enum class Polarization : std::uint8_t { Register = 0, Processing = 1 };

inline constexpr Polarization kV = Polarization::Register;
inline constexpr Polarization kH = Polarization::Processing;

inline char polarization_letter(Polarization p) { return p == Polarization::Register ? 'V' : 'H'; }

inline std::optional<Polarization> polarization_from_letter(char c) {
    if (c == 'H') return Polarization::Processing;
    if (c == 'V') return Polarization::Register;
    return std::nullopt;
}

inline Polarization other(Polarization p) {
    return p == Polarization::Register ? Polarization::Processing : Polarization::Register;
}

/// Address of one optical mode. Ordering is lexicographic over
/// (spatial, time_bin, polarization, internal).
struct ModeIndex {
    std::uint32_t spatial = 0;
    std::uint32_t time_bin = 0;
    Polarization polarization = Polarization::Register;
    /// Wavepacket label; anything other than 0 only appears when a
    /// distinguishability model is active.
    std::uint32_t internal = 0;

    friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;

    /// The same mode with the internal label erased. Detectors only see this.
    [[nodiscard]] ModeIndex detector_mode() const { return {spatial, time_bin, polarization, 0}; }
};

/// Shorthand for a mode of the main spatial mode.
inline ModeIndex bin_mode(std::uint32_t time_bin, Polarization p, std::uint32_t internal = 0) {
    return {0, time_bin, p, internal};
}

/// Compact label such as "2H", "s1:3V" or "2H#1".
inline std::string to_string(const ModeIndex& m) {
    std::string out;
    if (m.spatial != 0) out += "s" + std::to_string(m.spatial) + ":";
    out += std::to_string(m.time_bin);
    out += polarization_letter(m.polarization);
    if (m.internal != 0) out += "#" + std::to_string(m.internal);
    return out;
}

/// Ordered list of modes. Positions are stable: modes are only ever appended.
class ModeRegistry {
   public:
    ModeRegistry() = default;

    /// Every (spatial, bin, polarization, internal) combination for bins in
    /// [first_bin, last_bin].
    static ModeRegistry grid(std::uint32_t first_bin, std::uint32_t last_bin, std::uint32_t spatial_modes = 1,
                             std::uint32_t internal_labels = 1) {
        ModeRegistry r;
        for (std::uint32_t s = 0; s < spatial_modes; ++s) {
            for (std::uint32_t b = first_bin; b <= last_bin; ++b) {
                for (auto p : {Polarization::Register, Polarization::Processing}) {
                    for (std::uint32_t i = 0; i < internal_labels; ++i) r.add({s, b, p, i});
                }
            }
        }
        return r;
    }

    [[nodiscard]] std::size_t size() const { return modes_.size(); }
    [[nodiscard]] const ModeIndex& operator[](std::size_t i) const { return modes_[i]; }
    [[nodiscard]] std::span<const ModeIndex> modes() const { return modes_; }

    [[nodiscard]] std::optional<std::size_t> find(const ModeIndex& m) const {
        auto it = index_.find(m);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    [[nodiscard]] bool contains(const ModeIndex& m) const { return index_.contains(m); }

    [[nodiscard]] std::size_t index_of(const ModeIndex& m) const {
        auto it = index_.find(m);
        if (it == index_.end()) throw RegistryError("mode " + to_string(m) + " is not in the registry");
        return it->second;
    }

    /// Appends a mode unless present; returns its position either way.
    std::size_t add(const ModeIndex& m) {
        auto [it, inserted] = index_.emplace(m, modes_.size());
        if (inserted) modes_.push_back(m);
        return it->second;
    }

    /// Number of internal labels in use (largest label + 1).
    [[nodiscard]] std::uint32_t internal_labels() const {
        std::uint32_t n = 0;
        for (const auto& m : modes_) n = std::max(n, m.internal + 1);
        return n;
    }

    /// Positions of every internal sub-mode of a detector mode, in label order.
    [[nodiscard]] std::vector<std::size_t> positions_of(const ModeIndex& m) const {
        std::vector<std::size_t> out;
        ModeIndex key = m.detector_mode();
        for (auto it = index_.lower_bound(key); it != index_.end(); ++it) {
            const ModeIndex& k = it->first;
            if (k.spatial != key.spatial || k.time_bin != key.time_bin || k.polarization != key.polarization) break;
            out.push_back(it->second);
        }
        return out;
    }

    /// Distinct detector modes (internal label erased) in registry order.
    [[nodiscard]] std::vector<ModeIndex> detector_modes() const {
        std::vector<ModeIndex> out;
        for (const auto& m : modes_) {
            ModeIndex d = m.detector_mode();
            if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
        }
        return out;
    }

    friend bool operator==(const ModeRegistry& a, const ModeRegistry& b) { return a.modes_ == b.modes_; }

   private:
    std::vector<ModeIndex> modes_;
    std::map<ModeIndex, std::size_t> index_;
};

}  // namespace timebin
