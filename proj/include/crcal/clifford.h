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

#ifndef CRCAL_CLIFFORD_H
#define CRCAL_CLIFFORD_H

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "crcal/gate_synthesis.h"

namespace crcal {

/// i^r X^x Z^z on two qubits; bit k of x/z refers to qubit k (0 = control).
struct PauliString {
    uint8_t x = 0;
    uint8_t z = 0;
    uint8_t r = 0;

    /// Sign bit once the Hermitian i^{|x&z|} factor is removed: P = (-1)^s * hermitian Pauli.
    int sign_bit() const;
    bool operator==(const PauliString &) const = default;
};

PauliString multiply(const PauliString &a, const PauliString &b);
PauliString hermitian_pauli(uint8_t x, uint8_t z, bool negative = false);
Unitary4 pauli_string_matrix(const PauliString &p);

/// Images of X0, X1, Z0, Z1 under conjugation by the Clifford.
struct CliffordElement {
    std::array<PauliString, 4> images;
    Unitary4 unitary = Unitary4::Identity();

    PauliString conjugate(const PauliString &p) const;
    uint32_t key() const;
    bool symplectic() const;
    bool same_tableau(const CliffordElement &other) const;
};

CliffordElement identity_clifford();
/// Apply a, then b.
CliffordElement compose(const CliffordElement &a, const CliffordElement &b);
CliffordElement invert(const CliffordElement &c);

enum class CliffordGenerator { H0, H1, S0, S1, Cnot };
CliffordElement generator_clifford(CliffordGenerator g);

class CliffordGroup {
   public:
    static constexpr size_t kOrder = 11520;

    /// Immutable after construction; shared across threads.
    static const CliffordGroup &instance();

    size_t size() const {
        return elements_.size();
    }
    const CliffordElement &element(uint32_t index) const {
        return elements_.at(index);
    }
    /// -1 if the tableau is not an element.
    int64_t index_of(const CliffordElement &c) const;
    uint32_t compose(uint32_t a, uint32_t b) const;
    uint32_t inverse(uint32_t a) const {
        return inverses_.at(a);
    }
    uint32_t sample(std::mt19937_64 &rng) const;

   private:
    CliffordGroup();
    std::vector<CliffordElement> elements_;
    std::vector<uint32_t> inverses_;
    std::vector<int32_t> lookup_;
};

CliffordElement sample_clifford(std::mt19937_64 &rng);

}  // namespace crcal

#endif
