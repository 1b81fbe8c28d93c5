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

#include <bit>
#include <complex>
#include <stdexcept>
#include <unsupported/Eigen/KroneckerProduct>

namespace crcal {

namespace {

constexpr uint32_t kKeySpace = 1u << 20;

int popcount(uint8_t v) {
    return std::popcount(static_cast<unsigned>(v));
}

Unitary2 single(SingleQubitGate g) {
    return WrapperGate{g}.matrix();
}

}  // namespace

int PauliString::sign_bit() const {
    return ((r - popcount(x & z)) & 3) == 2 ? 1 : 0;
}

PauliString multiply(const PauliString &a, const PauliString &b) {
    return {
        static_cast<uint8_t>(a.x ^ b.x),
        static_cast<uint8_t>(a.z ^ b.z),
        static_cast<uint8_t>((a.r + b.r + 2 * popcount(a.z & b.x)) & 3)};
}

PauliString hermitian_pauli(uint8_t x, uint8_t z, bool negative) {
    return {x, z, static_cast<uint8_t>((popcount(x & z) + (negative ? 2 : 0)) & 3)};
}

Unitary4 pauli_string_matrix(const PauliString &p) {
    // Qubit 0 is the left tensor factor.
    Unitary2 f[2];
    for (int q = 0; q < 2; q++) {
        Unitary2 xq = ((p.x >> q) & 1) ? pauli_matrix(Pauli::X) : Unitary2::Identity();
        Unitary2 zq = ((p.z >> q) & 1) ? pauli_matrix(Pauli::Z) : Unitary2::Identity();
        f[q] = xq * zq;
    }
    const std::complex<double> phase = std::pow(std::complex<double>(0, 1), p.r);
    return phase * Unitary4(Eigen::kroneckerProduct(f[0], f[1]));
}

PauliString CliffordElement::conjugate(const PauliString &p) const {
    PauliString out{0, 0, p.r};
    for (int q = 0; q < 2; q++) {
        if ((p.x >> q) & 1) {
            out = multiply(out, images[q]);
        }
    }
    for (int q = 0; q < 2; q++) {
        if ((p.z >> q) & 1) {
            out = multiply(out, images[2 + q]);
        }
    }
    return out;
}

uint32_t CliffordElement::key() const {
    uint32_t k = 0;
    for (const auto &img : images) {
        k = (k << 5) | (uint32_t(img.x) << 3) | (uint32_t(img.z) << 1) | uint32_t(img.sign_bit());
    }
    return k;
}

bool CliffordElement::symplectic() const {
    // Conjugation preserves commutation: images of X_j and Z_k anticommute iff j == k.
    auto anticommute = [](const PauliString &a, const PauliString &b) {
        return (popcount(a.x & b.z) + popcount(a.z & b.x)) % 2 == 1;
    };
    for (int i = 0; i < 4; i++) {
        if ((images[i].r - popcount(images[i].x & images[i].z)) % 2 != 0 || (images[i].x == 0 && images[i].z == 0)) {
            return false;
        }
        for (int j = i + 1; j < 4; j++) {
            const bool expected = (j - i == 2);
            if (anticommute(images[i], images[j]) != expected) {
                return false;
            }
        }
    }
    return true;
}

bool CliffordElement::same_tableau(const CliffordElement &other) const {
    return key() == other.key();
}

CliffordElement identity_clifford() {
    CliffordElement c;
    c.images = {hermitian_pauli(1, 0), hermitian_pauli(2, 0), hermitian_pauli(0, 1), hermitian_pauli(0, 2)};
    return c;
}

CliffordElement compose(const CliffordElement &a, const CliffordElement &b) {
    CliffordElement out;
    for (int i = 0; i < 4; i++) {
        out.images[i] = b.conjugate(a.images[i]);
    }
    out.unitary = b.unitary * a.unitary;
    return out;
}

CliffordElement invert(const CliffordElement &c) {
    // For each generator g find the Pauli P with c(P) = +-g, then fix the sign.
    const CliffordElement id = identity_clifford();
    CliffordElement out;
    for (int i = 0; i < 4; i++) {
        const PauliString &g = id.images[i];
        bool found = false;
        for (uint8_t x = 0; x < 4 && !found; x++) {
            for (uint8_t z = 0; z < 4 && !found; z++) {
                const PauliString p = hermitian_pauli(x, z);
                const PauliString img = c.conjugate(p);
                if (img.x == g.x && img.z == g.z) {
                    out.images[i] = hermitian_pauli(x, z, img.sign_bit() != g.sign_bit());
                    found = true;
                }
            }
        }
        if (!found) {
            throw std::logic_error("tableau is not invertible");
        }
    }
    out.unitary = c.unitary.adjoint();
    return out;
}

CliffordElement generator_clifford(CliffordGenerator g) {
    CliffordElement c = identity_clifford();
    const Unitary2 id = Unitary2::Identity();
    switch (g) {
        case CliffordGenerator::H0:
        case CliffordGenerator::H1: {
            const int q = g == CliffordGenerator::H0 ? 0 : 1;
            std::swap(c.images[q], c.images[2 + q]);
            const Unitary2 h = single(SingleQubitGate::H);
            c.unitary = q == 0 ? Unitary4(Eigen::kroneckerProduct(h, id)) : Unitary4(Eigen::kroneckerProduct(id, h));
            break;
        }
        case CliffordGenerator::S0:
        case CliffordGenerator::S1: {
            const int q = g == CliffordGenerator::S0 ? 0 : 1;
            // S X S^dag = Y.
            c.images[q] = hermitian_pauli(uint8_t(1 << q), uint8_t(1 << q));
            const Unitary2 s = single(SingleQubitGate::S);
            c.unitary = q == 0 ? Unitary4(Eigen::kroneckerProduct(s, id)) : Unitary4(Eigen::kroneckerProduct(id, s));
            break;
        }
        case CliffordGenerator::Cnot:
            // Control qubit 0, target qubit 1.
            c.images[0] = hermitian_pauli(3, 0);
            c.images[3] = hermitian_pauli(0, 3);
            c.unitary.setZero();
            c.unitary(0, 0) = c.unitary(1, 1) = c.unitary(2, 3) = c.unitary(3, 2) = 1;
            break;
    }
    return c;
}

CliffordGroup::CliffordGroup() : lookup_(kKeySpace, -1) {
    const std::array<CliffordGenerator, 5> gens{
        CliffordGenerator::H0, CliffordGenerator::H1, CliffordGenerator::S0, CliffordGenerator::S1,
        CliffordGenerator::Cnot};
    elements_.reserve(kOrder);
    elements_.push_back(identity_clifford());
    lookup_[elements_[0].key()] = 0;
    for (size_t head = 0; head < elements_.size(); head++) {
        for (auto g : gens) {
            CliffordElement next = crcal::compose(elements_[head], generator_clifford(g));
            const uint32_t k = next.key();
            if (lookup_[k] < 0) {
                lookup_[k] = static_cast<int32_t>(elements_.size());
                elements_.push_back(std::move(next));
            }
        }
    }
    if (elements_.size() != kOrder) {
        throw std::logic_error("two-qubit Clifford enumeration produced the wrong group order");
    }
    inverses_.resize(elements_.size());
    for (size_t i = 0; i < elements_.size(); i++) {
        inverses_[i] = static_cast<uint32_t>(lookup_[invert(elements_[i]).key()]);
    }
}

const CliffordGroup &CliffordGroup::instance() {
    static const CliffordGroup group;
    return group;
}

int64_t CliffordGroup::index_of(const CliffordElement &c) const {
    return lookup_[c.key()];
}

uint32_t CliffordGroup::compose(uint32_t a, uint32_t b) const {
    const int64_t k = index_of(crcal::compose(element(a), element(b)));
    if (k < 0) {
        throw std::logic_error("Clifford composition left the group");
    }
    return static_cast<uint32_t>(k);
}

uint32_t CliffordGroup::sample(std::mt19937_64 &rng) const {
    std::uniform_int_distribution<uint32_t> dist(0, static_cast<uint32_t>(elements_.size() - 1));
    return dist(rng);
}

CliffordElement sample_clifford(std::mt19937_64 &rng) {
    const auto &g = CliffordGroup::instance();
    return g.element(g.sample(rng));
}

}  // namespace crcal
