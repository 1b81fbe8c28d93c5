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

#include "crcal/clifford.h"

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <complex>
#include <random>
#include <set>

using namespace crcal;
using cd = std::complex<double>;

namespace {

Eigen::Matrix2cd one(char c) {
    Eigen::Matrix2cd m;
    switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cd(0, -1), cd(0, 1), 0; break;
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

// X0, X1, Z0, Z1 with qubit 0 as the left tensor factor.
std::array<Eigen::Matrix4cd, 4> basis() {
    return {kron(one('X'), one('I')), kron(one('I'), one('X')), kron(one('Z'), one('I')),
            kron(one('I'), one('Z'))};
}

// Conjugation images read straight off a unitary; compared as matrices so sign and phase count.
bool tableau_matches_unitary(const CliffordElement &c, const Eigen::Matrix4cd &u) {
    const auto b = basis();
    for (int k = 0; k < 4; k++) {
        const Eigen::Matrix4cd img = u * b[k] * u.adjoint();
        if ((img - pauli_string_matrix(c.images[k])).cwiseAbs().maxCoeff() > 1e-10) return false;
    }
    return true;
}

const CliffordGroup &group() {
    return CliffordGroup::instance();
}

}  // namespace

TEST(clifford, pauli_matrices_follow_convention) {
    const char names[] = {'I', 'X', 'Y', 'Z'};
    for (int a = 0; a < 4; a++)
        for (int b = 0; b < 4; b++) {
            const uint8_t x = ((a == 1 || a == 2) ? 1 : 0) | ((b == 1 || b == 2) ? 2 : 0);
            const uint8_t z = ((a == 3 || a == 2) ? 1 : 0) | ((b == 3 || b == 2) ? 2 : 0);
            const Eigen::Matrix4cd want = kron(one(names[a]), one(names[b]));
            EXPECT_LT((pauli_string_matrix(hermitian_pauli(x, z)) - want).cwiseAbs().maxCoeff(), 1e-15);
            EXPECT_LT((pauli_string_matrix(hermitian_pauli(x, z, true)) + want).cwiseAbs().maxCoeff(), 1e-15);
        }
}

TEST(clifford, multiply_matches_matrices) {
    for (uint8_t x1 = 0; x1 < 4; x1++)
        for (uint8_t z1 = 0; z1 < 4; z1++)
            for (uint8_t x2 = 0; x2 < 4; x2++)
                for (uint8_t z2 = 0; z2 < 4; z2++) {
                    const auto p = hermitian_pauli(x1, z1), q = hermitian_pauli(x2, z2);
                    const Eigen::Matrix4cd want = pauli_string_matrix(p) * pauli_string_matrix(q);
                    EXPECT_LT((pauli_string_matrix(multiply(p, q)) - want).cwiseAbs().maxCoeff(), 1e-15);
                }
}

TEST(clifford, group_order) {
    EXPECT_EQ(group().size(), CliffordGroup::kOrder);
    std::set<uint32_t> keys;
    for (uint32_t i = 0; i < group().size(); i++) keys.insert(group().element(i).key());
    EXPECT_EQ(keys.size(), 11520u);
}

TEST(clifford, identity_is_first) {
    const auto &e = group().element(0);
    EXPECT_TRUE(e.same_tableau(identity_clifford()));
    for (uint8_t x = 0; x < 4; x++)
        for (uint8_t z = 0; z < 4; z++) EXPECT_EQ(e.conjugate(hermitian_pauli(x, z)), hermitian_pauli(x, z));
    EXPECT_TRUE(invert(identity_clifford()).same_tableau(identity_clifford()));
}

TEST(clifford, every_element_is_symplectic_and_consistent) {
    for (uint32_t i = 0; i < group().size(); i++) {
        const auto &c = group().element(i);
        ASSERT_TRUE(c.symplectic()) << i;
        ASSERT_TRUE(tableau_matches_unitary(c, c.unitary)) << i;
        ASSERT_EQ(group().index_of(c), static_cast<int64_t>(i));
    }
}

TEST(clifford, generators_match_textbook_gates) {
    const double r = 1 / std::sqrt(2.0);
    Eigen::Matrix2cd h, s;
    h << r, r, r, -r;
    s << 1, 0, 0, cd(0, 1);
    Eigen::Matrix4cd cnot = Eigen::Matrix4cd::Zero();
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1;
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    EXPECT_TRUE(tableau_matches_unitary(generator_clifford(CliffordGenerator::H0), kron(h, id)));
    EXPECT_TRUE(tableau_matches_unitary(generator_clifford(CliffordGenerator::H1), kron(id, h)));
    EXPECT_TRUE(tableau_matches_unitary(generator_clifford(CliffordGenerator::S0), kron(s, id)));
    EXPECT_TRUE(tableau_matches_unitary(generator_clifford(CliffordGenerator::S1), kron(id, s)));
    EXPECT_TRUE(tableau_matches_unitary(generator_clifford(CliffordGenerator::Cnot), cnot));
}

TEST(clifford, inversion_roundtrip) {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 1000; i++) {
        const CliffordElement c = sample_clifford(rng);
        EXPECT_TRUE(compose(c, invert(c)).same_tableau(identity_clifford()));
        EXPECT_TRUE(compose(invert(c), c).same_tableau(identity_clifford()));
        const uint32_t k = static_cast<uint32_t>(group().index_of(c));
        EXPECT_EQ(group().compose(k, group().inverse(k)), 0u);
    }
}

TEST(clifford, composition_matches_unitaries) {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 100; i++) {
        const CliffordElement a = sample_clifford(rng);
        const CliffordElement b = sample_clifford(rng);
        // a first, then b.
        EXPECT_TRUE(tableau_matches_unitary(compose(a, b), b.unitary * a.unitary));
        const auto ia = static_cast<uint32_t>(group().index_of(a));
        const auto ib = static_cast<uint32_t>(group().index_of(b));
        EXPECT_TRUE(group().element(group().compose(ia, ib)).same_tableau(compose(a, b)));
    }
}

TEST(clifford, closure) {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<uint32_t> u(0, 11519);
    for (int i = 0; i < 2000; i++) {
        const auto c = compose(group().element(u(rng)), group().element(u(rng)));
        EXPECT_GE(group().index_of(c), 0);
    }
}

TEST(clifford, sampling_is_uniform) {
    std::mt19937_64 rng(24);
    std::vector<double> counts(group().size(), 0.0);
    const int n = 1000000;
    for (int i = 0; i < n; i++) counts[group().sample(rng)] += 1;
    const double expected = static_cast<double>(n) / counts.size();
    double chi2 = 0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
    EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.001) << chi2;
}
