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

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "timebin/errors.hpp"
#include "timebin/fock_state.hpp"

namespace timebin {

/// Permanent via Glynn's formula with Gray-code ordering, O(n 2^n).
inline Complex permanent(const Eigen::MatrixXcd& a) {
    if (a.rows() != a.cols()) throw DomainError("permanent of a non-square matrix");
    const auto n = static_cast<int>(a.rows());
    if (n == 0) return Complex{1.0, 0.0};

    // Row sums with all signs +1.
    Eigen::VectorXcd sums = a.colwise().sum().transpose();
    std::vector<int> sign(static_cast<std::size_t>(n), 1);
    Complex total{};
    int parity = 1;
    const std::uint64_t steps = std::uint64_t{1} << (n - 1);
    for (std::uint64_t k = 0; k < steps; ++k) {
        Complex prod{1.0, 0.0};
        for (int j = 0; j < n; ++j) prod *= sums(j);
        total += static_cast<double>(parity) * prod;
        if (k + 1 == steps) break;
        // Flip the sign of the row selected by the Gray code (never row 0).
        int row = 1 + std::countr_zero(k + 1);
        sign[static_cast<std::size_t>(row)] = -sign[static_cast<std::size_t>(row)];
        sums += 2.0 * static_cast<double>(sign[static_cast<std::size_t>(row)]) * a.row(row).transpose();
        parity = -parity;
    }
    return total / static_cast<double>(steps);
}

/// Transition amplitude <output| U |input> for a passive network whose
/// single-photon matrix is `mode_unitary` (entry (r, c): mode c -> mode r).
inline Complex amplitude_by_permanent(std::span<const unsigned> input, std::span<const unsigned> output,
                                      const Eigen::MatrixXcd& mode_unitary) {
    const auto m = static_cast<std::size_t>(mode_unitary.rows());
    if (input.size() != m || output.size() != m || mode_unitary.cols() != mode_unitary.rows()) {
        throw DomainError("occupation length does not match the unitary dimension");
    }
    std::vector<int> rows;
    std::vector<int> cols;
    double norm = 1;
    for (std::size_t i = 0; i < m; ++i) {
        for (unsigned k = 0; k < output[i]; ++k) rows.push_back(static_cast<int>(i));
        for (unsigned k = 0; k < input[i]; ++k) cols.push_back(static_cast<int>(i));
        norm *= detail::factorial(input[i]) * detail::factorial(output[i]);
    }
    if (rows.size() != cols.size()) throw DomainError("input and output photon numbers differ");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXcd sub(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            sub(r, c) = mode_unitary(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
        }
    }
    return permanent(sub) / std::sqrt(norm);
}

}  // namespace timebin
