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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gate_oracles.hpp"
#include "timebin/analysis.hpp"

namespace timebin {
namespace {

using oracle::first_quantized_gate;

TruthTable table_with_diagonal(const BasisPair& in, const BasisPair& out, const std::array<int, 4>& correct,
                               double p) {
    TruthTable t{in, out, {}};
    for (int i = 0; i < 4; ++i) {
        for (int o = 0; o < 4; ++o) {
            t.probabilities[static_cast<std::size_t>(i)][static_cast<std::size_t>(o)] =
                o == correct[static_cast<std::size_t>(i)] ? p : (1 - p) / 3;
        }
    }
    return t;
}

const BasisPair kHA{Basis::HV, Basis::AD};

TEST(Basis, ParseAndLabels) {
    auto p = BasisPair::parse("HV,AD");
    EXPECT_EQ(p.control, Basis::HV);
    EXPECT_EQ(p.target, Basis::AD);
    EXPECT_EQ(p.str(), "HV,AD");
    EXPECT_EQ(p.label(3), "VD");
    EXPECT_THROW(BasisPair::parse("HV"), DomainError);
    EXPECT_THROW(BasisPair::parse("HV,XY"), DomainError);
    EXPECT_NEAR(std::abs(basis_state(Basis::RL, 0).beta - Complex(0, std::sqrt(0.5))), 0.0, 1e-15);
}

TEST(TruthTable, IdealCPhaseIsPermutation) {
    auto t = truth_table(ideal_cphase_gate(), kHA, kHA);
    // Rows HA, HD, VA, VD map to HA, HD, VD, VA.
    const std::array<int, 4> expected{0, 1, 3, 2};
    for (int i = 0; i < 4; ++i) {
        for (int o = 0; o < 4; ++o) {
            EXPECT_NEAR(t(i, o), o == expected[static_cast<std::size_t>(i)] ? 1.0 : 0.0, 1e-15);
        }
    }
}

TEST(TruthTable, IdentityGateMatchedBases) {
    for (auto b : {Basis::HV, Basis::AD, Basis::RL}) {
        BasisPair p{b, b};
        auto t = truth_table(identity_gate(), p, p);
        for (int i = 0; i < 4; ++i) {
            for (int o = 0; o < 4; ++o) EXPECT_NEAR(t(i, o), i == o ? 1.0 : 0.0, 1e-15);
        }
    }
}

TEST(TruthTable, RowsSumToOne) {
    auto t = truth_table(postselected_cphase_gate({0.7}), kHA, kHA);
    for (int i = 0; i < 4; ++i) {
        double s = 0;
        for (int o = 0; o < 4; ++o) s += t(i, o);
        EXPECT_NEAR(s, 1.0, 1e-10);
    }
}

TEST(TruthTable, FailingGateIsAnError) {
    TwoQubitGate never = [](const PolarizationQubit&, const PolarizationQubit&) { return GateRun{}; };
    EXPECT_THROW(truth_table(never, kHA, kHA), DomainError);
}

TEST(TruthTable, MatchesFirstQuantizedOracle) {
    for (double alpha : {0.0, 0.3, 0.91, 1.0}) {
        TwoQubitGate oracle = [alpha](const PolarizationQubit& c, const PolarizationQubit& t) {
            return first_quantized_gate(alpha, c, t);
        };
        for (const auto& cfg : kStandardConfigs) {
            auto got = truth_table(postselected_cphase_gate({alpha}), cfg.basis_in, cfg.basis_out);
            auto want = truth_table(oracle, cfg.basis_in, cfg.basis_out);
            EXPECT_LT(l1_distance(got, want), 1e-12) << cfg.name << " alpha=" << alpha;
        }
        // The swap branch adds success probability once labels differ.
        auto c = PolarizationQubit::from_label('D');
        auto t = PolarizationQubit::from_label('R');
        EXPECT_NEAR(postselected_cphase_gate({alpha})(c, t).success_probability,
                    first_quantized_gate(alpha, c, t).success_probability, 1e-12);
    }
}

TEST(ClassicalFidelity, IdealAndUniform) {
    for (const auto& cfg : kStandardConfigs) {
        auto ideal = truth_table(ideal_cphase_gate(), cfg.basis_in, cfg.basis_out);
        EXPECT_NEAR(classical_fidelity(ideal), 1.0, 1e-12) << cfg.name;
    }
    TruthTable uniform{kHA, kHA, {}};
    for (auto& row : uniform.probabilities) row.fill(0.25);
    EXPECT_NEAR(classical_fidelity(uniform), 0.25, 1e-15);
}

TEST(ClassicalFidelity, ReportedHaValue) {
    // A table with 0.84 on each correct transition.
    auto t = table_with_diagonal(kHA, kHA, {0, 1, 3, 2}, 0.84);
    EXPECT_NEAR(classical_fidelity(t), 0.84, 1e-12);
}

TEST(ClassicalFidelity, PermutationInvariance) {
    // Relabeling the four inputs together with their correct outputs leaves F
    // unchanged.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto ideal = truth_table(ideal_cphase_gate(), kHA, kHA);
    TruthTable t{kHA, kHA, {}};
    for (auto& row : t.probabilities) {
        double s = 0;
        for (auto& x : row) s += (x = u(rng));
        for (auto& x : row) x /= s;
    }
    std::array<int, 4> perm{2, 0, 3, 1};
    TruthTable tp = t;
    TruthTable ip = ideal;
    for (int i = 0; i < 4; ++i) {
        for (int o = 0; o < 4; ++o) {
            tp.probabilities[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])][static_cast<std::size_t>(o)] = t(i, o);
            ip.probabilities[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])][static_cast<std::size_t>(o)] = ideal(i, o);
        }
    }
    EXPECT_NEAR(classical_fidelity(tp, ip), classical_fidelity(t, ideal), 1e-15);
}

TEST(ClassicalFidelity, WrongBasisCombination) {
    BasisPair hv{Basis::HV, Basis::HV};
    BasisPair rl{Basis::RL, Basis::RL};
    auto t = truth_table(ideal_cphase_gate(), hv, rl);
    EXPECT_THROW(classical_fidelity(t), DomainError);
    auto other = truth_table(ideal_cphase_gate(), hv, hv);
    EXPECT_THROW(classical_fidelity(t, other), DomainError);
}

TEST(ProcessBounds, Examples) {
    auto b = process_bounds(0.84, 0.84);
    // 0.84 + 0.84 - 1 is 0.68 up to rounding of the decimal inputs.
    EXPECT_NEAR(b.lower, 0.68, 1e-15);
    EXPECT_EQ(b.upper, 0.84);
    auto one = process_bounds(1, 1);
    EXPECT_EQ(one.lower, 1.0);
    EXPECT_EQ(one.upper, 1.0);
    auto clamp = process_bounds(0.5, 0.4);
    EXPECT_EQ(clamp.lower, 0.0);
    EXPECT_EQ(clamp.upper, 0.4);
    EXPECT_THROW(process_bounds(1.1, 0.5), DomainError);
    EXPECT_THROW(process_bounds(0.5, -0.1), DomainError);
}

TEST(ProcessBounds, LowerNeverExceedsUpper) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        auto b = process_bounds(u(rng), u(rng));
        EXPECT_LE(b.lower, b.upper);
        EXPECT_GE(b.lower, 0.0);
        EXPECT_LE(b.upper, 1.0);
    }
}

TEST(Nonclassicality, StrictComparison) {
    EXPECT_TRUE(nonclassicality_check(0.84, 0.84, 0.85));
    EXPECT_FALSE(nonclassicality_check(2.0 / 3.0, 0.9, 0.9));
    EXPECT_TRUE(nonclassicality_check(1, 1, 1));
    EXPECT_TRUE(nonclassicality_check(std::nextafter(2.0 / 3.0, 1.0), 0.9, 0.9));
}

TEST(Distinguishability, AlphaOneMatchesModelFree) {
    auto c = PolarizationQubit::from_label('D');
    auto t = PolarizationQubit::from_label('L');
    auto a = with_distinguishability({1.0}, c, t);
    auto b = encode_time_bin(c, t);
    EXPECT_NEAR(fidelity(a, b), 1.0, 1e-15);
    auto r = simulate_report(1.0);
    EXPECT_NEAR(r.f_ha, 1.0, 1e-10);
    EXPECT_NEAR(r.f_ah, 1.0, 1e-10);
    EXPECT_NEAR(r.f_aa, 1.0, 1e-10);
}

TEST(Distinguishability, AlphaZeroRemovesInterference) {
    // Control H in bin 2 and target V in bin 2: balanced waveplate coupling.
    auto s = with_distinguishability({0.0}, PolarizationQubit::from_label('V'), PolarizationQubit::from_label('V'));
    s = waveplate(s, 2, std::numbers::pi / 8);
    auto d = measure_distribution(s, {bin_mode(2, kH), bin_mode(2, kV)});
    EXPECT_NEAR(d.probability({1, 1}), 0.5, 1e-15);

    auto same = with_distinguishability({1.0}, PolarizationQubit::from_label('V'), PolarizationQubit::from_label('V'));
    same = waveplate(same, 2, std::numbers::pi / 8);
    EXPECT_NEAR(measure_distribution(same, {bin_mode(2, kH), bin_mode(2, kV)}).probability({1, 1}), 0.0, 1e-15);
}

TEST(Distinguishability, RejectsOutOfRange) {
    auto q = PolarizationQubit::from_label('H');
    EXPECT_THROW(with_distinguishability({1.5}, q, q), DomainError);
    EXPECT_THROW(with_distinguishability({-0.1}, q, q), DomainError);
}

TEST(Distinguishability, FidelitiesMonotoneInAlpha) {
    double prev_ha = -1;
    double prev_ah = -1;
    double prev_aa = -1;
    for (int k = 0; k <= 100; ++k) {
        auto r = simulate_report(k / 100.0);
        EXPECT_GE(r.f_ha, prev_ha - 1e-12);
        EXPECT_GE(r.f_ah, prev_ah - 1e-12);
        EXPECT_GE(r.f_aa, prev_aa - 1e-12);
        prev_ha = r.f_ha;
        prev_ah = r.f_ah;
        prev_aa = r.f_aa;
    }
}

TEST(Distinguishability, ReportAtFittedOverlapIsNonclassical) {
    auto r = simulate_report(0.91);
    EXPECT_TRUE(r.nonclassical);
    EXPECT_GT(r.f_ha, 2.0 / 3.0);
    EXPECT_LE(r.process_lower, r.process_upper);
}

TEST(FitAlpha, RoundTripAndIdeal) {
    AlphaGrid grid;
    auto sim = [&](double a) { return standard_tables(postselected_cphase_gate({a})); };
    auto t91 = sim(0.91);
    auto f = fit_alpha(t91, grid);
    EXPECT_EQ(f.alpha, 0.91);
    EXPECT_EQ(f.l1_distance, 0.0);
    auto ideal = sim(1.0);
    EXPECT_EQ(fit_alpha(ideal, grid).alpha, 1.0);
    EXPECT_THROW(fit_alpha(std::span<const TruthTable>{}, grid), DomainError);
}

TEST(FitAlpha, EveryGridPointRoundTrips) {
    AlphaGrid grid;
    for (int k = 0; k <= grid.steps(); ++k) {
        std::vector<TruthTable> tables;
        for (const auto& cfg : kStandardConfigs) tables.push_back(grid.table(k, cfg.basis_in, cfg.basis_out));
        auto f = fit_alpha(tables, grid);
        ASSERT_EQ(f.alpha, grid.alpha(k)) << "k=" << k;
    }
}

TEST(FitAlpha, SubsetOfTables) {
    AlphaGrid grid;
    auto tables = standard_tables(postselected_cphase_gate({0.5}));
    std::vector<TruthTable> only_aa{tables[2]};
    EXPECT_EQ(fit_alpha(only_aa, grid).alpha, 0.5);
}

TEST(FitAlpha, RobustToUniformNoise) {
    AlphaGrid grid;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> noise(-0.02, 0.02);
    for (int trial = 0; trial < 20; ++trial) {
        auto tables = standard_tables(postselected_cphase_gate({0.91}));
        for (auto& t : tables) {
            for (auto& row : t.probabilities) {
                for (auto& x : row) x += noise(rng);
            }
        }
        EXPECT_NEAR(fit_alpha(tables, grid).alpha, 0.91, 0.03);
    }
}

TEST(GateByName, KnownAndUnknown) {
    EXPECT_NO_THROW(gate_by_name("cphase-klm"));
    EXPECT_THROW(gate_by_name("cnot"), DomainError);
    EXPECT_THROW(gate_by_name("cphase-postselected", 2.0), DomainError);
}

}  // namespace
}  // namespace timebin
