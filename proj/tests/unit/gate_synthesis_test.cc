// Copyright 2026 The crcal Authors
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

#include "crcal/gate_synthesis.h"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "crcal/errors.h"

using namespace crcal;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Pauli kPaulis[] = {Pauli::X, Pauli::Y, Pauli::Z};

Eigen::Matrix2cd pauli(char c) {
    Eigen::Matrix2cd m;
    const cd i(0, 1);
    switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m.setIdentity();
    }
    return m;
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd &a, const Eigen::Matrix2cd &b) {
    Eigen::Matrix4cd k;
    for (int r = 0; r < 2; r++)
        for (int c = 0; c < 2; c++) k.block<2, 2>(2 * r, 2 * c) = a(r, c) * b;
    return k;
}

// exp(-i theta/2 G) for Hermitian G via its eigendecomposition.
Eigen::Matrix4cd expm_hermitian(const Eigen::Matrix4cd &g, double theta) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(g);
    Eigen::Vector4cd d;
    for (int k = 0; k < 4; k++) d(k) = std::exp(cd(0, -theta / 2 * es.eigenvalues()(k)));
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::Matrix4cd direct(char a, char b, double theta) {
    return expm_hermitian(kron(pauli(a), pauli(b)), theta);
}

bool same_up_to_phase(const Eigen::Matrix4cd &u, const Eigen::Matrix4cd &v, double tol) {
    return std::abs((u.adjoint() * v).trace()) >= 4 - tol;
}

}  // namespace

TEST(gate_synthesis, zx_has_no_wrappers) {
    const auto s = identity_wrappers(Pauli::Z, Pauli::X);
    for (int q = 0; q < 2; q++) {
        EXPECT_TRUE(s.pre[q].empty());
        EXPECT_TRUE(s.post[q].empty());
    }
}

TEST(gate_synthesis, zz_is_hadamard_on_target) {
    const auto s = identity_wrappers(Pauli::Z, Pauli::Z);
    EXPECT_TRUE(s.pre[0].empty());
    EXPECT_TRUE(s.post[0].empty());
    ASSERT_EQ(s.pre[1].size(), 1u);
    EXPECT_EQ(s.pre[1][0].gate, SingleQubitGate::H);
    ASSERT_EQ(s.post[1].size(), 1u);
    EXPECT_EQ(s.post[1][0].gate, SingleQubitGate::H);
}

TEST(gate_synthesis, all_pairs_at_fixed_theta) {
    for (Pauli a : kPaulis)
        for (Pauli b : kPaulis) {
            auto s = identity_wrappers(a, b);
            s.theta = 0.7;
            EXPECT_TRUE(same_up_to_phase(unitary_of(s), direct(name(a), name(b), 0.7), 1e-12))
                << name(a) << name(b);
        }
}

TEST(gate_synthesis, all_pairs_random_theta) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2 * kPi, 2 * kPi);
    for (Pauli a : kPaulis)
        for (Pauli b : kPaulis) {
            auto s = identity_wrappers(a, b);
            for (int k = 0; k < 20; k++) {
                s.theta = u(rng);
                const Unitary4 w = unitary_of(s);
                EXPECT_TRUE(same_up_to_phase(w, direct(name(a), name(b), s.theta), 1e-10))
                    << name(a) << name(b) << " " << s.theta;
                EXPECT_LT((w.adjoint() * w - Unitary4::Identity()).cwiseAbs().maxCoeff(), 1e-12);
            }
        }
}

TEST(gate_synthesis, wrapper_search_is_deterministic) {
    for (Pauli a : kPaulis)
        for (Pauli b : kPaulis) {
            const auto s = identity_wrappers(a, b);
            const auto t = identity_wrappers(a, b);
            EXPECT_EQ(to_json(s).dump(), to_json(t).dump());
            for (int q = 0; q < 2; q++) {
                EXPECT_LE(s.pre[q].size(), 2u);
                EXPECT_EQ(s.post[q], inverse_word(s.pre[q]));
            }
        }
}

TEST(gate_synthesis, candidate_words_are_shortlex) {
    const auto &c = wrapper_candidates();
    ASSERT_EQ(c.size(), 13u);
    EXPECT_TRUE(c.front().empty());
    for (size_t i = 1; i < c.size(); i++) EXPECT_LE(c[i - 1].size(), c[i].size());
}

TEST(gate_synthesis, zy_matches_axis_gate) {
    auto zy = identity_wrappers(Pauli::Z, Pauli::Y);
    zy.theta = 1.1;
    const auto axis = phase_shifted_axis_gate(1.1, kPi / 2);
    EXPECT_TRUE(equivalent_up_to_global_phase(unitary_of(axis), unitary_of(zy), 1e-12));
}

TEST(gate_synthesis, axis_gate_zero_is_zx) {
    const auto s = phase_shifted_axis_gate(0.4, 0.0);
    EXPECT_TRUE(same_up_to_phase(unitary_of(s), direct('Z', 'X', 0.4), 1e-12));
}

TEST(gate_synthesis, axis_gate_matches_exponential) {
    for (double dphi : {kPi / 4, -0.3, 2.0}) {
        const double theta = 0.9;
        const Eigen::Matrix4cd g =
            kron(pauli('Z'), std::cos(dphi) * pauli('X') + std::sin(dphi) * pauli('Y'));
        const auto s = phase_shifted_axis_gate(theta, dphi);
        EXPECT_TRUE(same_up_to_phase(unitary_of(s), expm_hermitian(g, theta), 1e-12)) << dphi;
        EXPECT_TRUE(same_up_to_phase(target_unitary(s), expm_hermitian(g, theta), 1e-12)) << dphi;
    }
}

TEST(gate_synthesis, axis_gate_frames_cancel) {
    const auto plus = phase_shifted_axis_gate(0.8, 0.6);
    const auto minus = phase_shifted_axis_gate(0.8, -0.6);
    const Unitary2 frames = word_matrix(plus.post[1]) * word_matrix(minus.post[1]);
    EXPECT_NEAR(std::abs(frames.trace()), 2.0, 1e-12);
    auto back = plus;
    back.theta = -0.8;
    EXPECT_TRUE(equivalent_up_to_global_phase(unitary_of(back) * unitary_of(plus), Unitary4::Identity(), 1e-12));
}

TEST(gate_synthesis, equivalence_examples) {
    const Unitary4 u = direct('X', 'Y', 0.37);
    EXPECT_TRUE(equivalent_up_to_global_phase(u, u));
    for (double alpha : {0.1, 1.0, -2.5, kPi})
        EXPECT_TRUE(equivalent_up_to_global_phase(u, std::exp(cd(0, alpha)) * u));

    // U^dag V = exp(-i 1e-4/2 ZX), whose trace is 4 cos(5e-5).
    const double deficit = 4 * (1 - std::cos(5e-5));
    ASSERT_GT(deficit, 1e-9);
    EXPECT_FALSE(equivalent_up_to_global_phase(zx_unitary(0.3), zx_unitary(0.3001), 1e-9));
    EXPECT_TRUE(equivalent_up_to_global_phase(zx_unitary(0.3), zx_unitary(0.3001), 2 * deficit));
}

TEST(gate_synthesis, equivalence_rejects_non_unitary) {
    Unitary4 m = Unitary4::Identity();
    m(0, 0) = 2.0;
    EXPECT_THROW(equivalent_up_to_global_phase(m, Unitary4::Identity()), ValidationError);
}

TEST(gate_synthesis, zx_unitary_matches_oracle) {
    for (double t : {0.0, 0.2, kPi / 2, 3.0})
        EXPECT_LT((zx_unitary(t) - direct('Z', 'X', t)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(gate_synthesis, wrapper_inverses) {
    for (const auto &w : wrapper_candidates()) {
        const Unitary2 p = word_matrix(inverse_word(w)) * word_matrix(w);
        EXPECT_LT((p - Unitary2::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    }
    const WrapperGate vp{SingleQubitGate::VirtualPhase, 0.4};
    EXPECT_NEAR(vp.inverse().delta, -0.4, 0.0);
}

TEST(gate_synthesis, unitary_json_layout) {
    const auto j = unitary_to_json(zx_unitary(kPi / 2));
    ASSERT_EQ(j.size(), 4u);
    ASSERT_EQ(j[0].size(), 4u);
    EXPECT_NEAR(j[0][0][0].get<double>(), std::cos(kPi / 4), 1e-15);
    EXPECT_NEAR(j[0][1][1].get<double>(), -std::sin(kPi / 4), 1e-15);
}
