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

// Dense single-photon mode matrices, and the factorization of an N-mode
// unitary into a mesh of two-mode couplers followed by output phases.

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "timebin/errors.hpp"
#include "timebin/fock_state.hpp"

namespace timebin {

/// Identity over the registry with `u` embedded on its two modes.
inline Eigen::MatrixXcd embed(const TwoModeUnitary& u, const ModeRegistry& registry) {
    const auto n = static_cast<Eigen::Index>(registry.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n);
    const auto a = static_cast<Eigen::Index>(registry.index_of(u.first));
    const auto b = static_cast<Eigen::Index>(registry.index_of(u.second));
    m(a, a) = u(0, 0);
    m(a, b) = u(0, 1);
    m(b, a) = u(1, 0);
    m(b, b) = u(1, 1);
    return m;
}

inline Eigen::MatrixXcd phase_matrix(const ModeIndex& mode, double phi, const ModeRegistry& registry) {
    const auto n = static_cast<Eigen::Index>(registry.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n);
    const auto a = static_cast<Eigen::Index>(registry.index_of(mode));
    m(a, a) = std::polar(1.0, phi);
    return m;
}

inline double unitarity_error(const Eigen::MatrixXcd& u) {
    if (u.rows() != u.cols()) return INFINITY;
    return (u * u.adjoint() - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

/// One coupler of a mesh, acting on positions (first, second) with the
/// library-wide coupler convention.
struct MeshCoupler {
    Eigen::Index first = 0;
    Eigen::Index second = 0;
    double theta = 0;
    double phi = 0;
};

/// Couplers applied in order, then a phase on every mode.
struct Mesh {
    Eigen::Index modes = 0;
    std::vector<MeshCoupler> couplers;
    std::vector<double> output_phases;
};

inline Eigen::Matrix2cd coupler_matrix(double theta, double phi) {
    Eigen::Matrix2cd m;
    m << std::cos(theta), -std::polar(std::sin(theta), -phi), std::polar(std::sin(theta), phi), std::cos(theta);
    return m;
}

inline Eigen::MatrixXcd compose(const Mesh& mesh) {
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(mesh.modes, mesh.modes);
    for (const auto& c : mesh.couplers) {
        Eigen::MatrixXcd step = Eigen::MatrixXcd::Identity(mesh.modes, mesh.modes);
        Eigen::Matrix2cd b = coupler_matrix(c.theta, c.phi);
        step(c.first, c.first) = b(0, 0);
        step(c.first, c.second) = b(0, 1);
        step(c.second, c.first) = b(1, 0);
        step(c.second, c.second) = b(1, 1);
        u = step * u;
    }
    for (Eigen::Index i = 0; i < mesh.modes; ++i) {
        u.row(i) *= std::polar(1.0, mesh.output_phases[static_cast<std::size_t>(i)]);
    }
    return u;
}

/// Factorizes `target` as D * B_K ... B_1 by nulling the strictly lower
/// triangle row by row from the bottom with couplers on adjacent columns.
inline Mesh decompose(const Eigen::MatrixXcd& target) {
    if (unitarity_error(target) > 1e-10) throw ValidationError("mesh target is not unitary");
    const Eigen::Index n = target.rows();
    Eigen::MatrixXcd u = target;
    Mesh mesh;
    mesh.modes = n;
    for (Eigen::Index r = n - 1; r >= 1; --r) {
        for (Eigen::Index c = 0; c < r; ++c) {
            const Complex x = u(r, c);
            const Complex y = u(r, c + 1);
            if (std::abs(x) == 0) continue;
            double theta = std::atan2(std::abs(x), std::abs(y));
            double phi = std::abs(y) == 0 ? std::arg(x) : std::arg(x) - std::arg(y);
            // Right-multiply by the inverse coupler on columns (c, c+1).
            Eigen::Matrix2cd inv = coupler_matrix(theta, phi).adjoint();
            Eigen::MatrixXcd cols(n, 2);
            cols.col(0) = u.col(c);
            cols.col(1) = u.col(c + 1);
            cols = cols * inv;
            u.col(c) = cols.col(0);
            u.col(c + 1) = cols.col(1);
            mesh.couplers.push_back({c, c + 1, theta, phi});
        }
    }
    // u is now diagonal; the couplers were collected in application order.
    for (Eigen::Index i = 0; i < n; ++i) mesh.output_phases.push_back(std::arg(u(i, i)));
    return mesh;
}

}  // namespace timebin
