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

#ifndef CRCAL_GATE_SYNTHESIS_H
#define CRCAL_GATE_SYNTHESIS_H

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "json.hpp"

namespace crcal {

struct CalibratedGate;

using Unitary2 = Eigen::Matrix2cd;
using Unitary4 = Eigen::Matrix4cd;

enum class Pauli { I, X, Y, Z };
char name(Pauli p);
Pauli pauli_from_char(char c);
Unitary2 pauli_matrix(Pauli p);

enum class SingleQubitGate { H, S, Sdg, X, VirtualPhase };

struct WrapperGate {
    SingleQubitGate gate;
    /// Only used by VirtualPhase.
    double delta = 0;

    Unitary2 matrix() const;
    WrapperGate inverse() const;
    std::string label() const;
    bool operator==(const WrapperGate &) const = default;
};

using WrapperWord = std::vector<WrapperGate>;

/// Target gate AB(theta) = exp(-i theta/2 A (x) B), realized as post * ZX(theta) * pre.
/// Qubit 0 is the control, qubit 1 the target; words are listed in time order.
struct TwoQubitGateSpec {
    Pauli generator_a = Pauli::Z;
    Pauli generator_b = Pauli::X;
    /// Rotates the target generator in the XY plane: B -> cos(phi) B + sin(phi) B', only for B = X.
    double axis_phase = 0;
    double theta = 0;
    std::array<WrapperWord, 2> pre;
    std::array<WrapperWord, 2> post;

    void validate() const;
    std::string label() const;
};

Unitary2 word_matrix(const WrapperWord &word);
WrapperWord inverse_word(const WrapperWord &word);

/// exp(-i theta/2 G) for an involutory G.
Unitary4 involutory_exp(const Unitary4 &generator, double theta);
Unitary4 zx_unitary(double theta);

/// The matrix the wrapped schedule implements.
Unitary4 unitary_of(const TwoQubitGateSpec &spec);
/// The matrix the spec is meant to realize, built directly from its generators.
Unitary4 target_unitary(const TwoQubitGateSpec &spec);

bool is_unitary(const Unitary4 &u, double tol);
bool equivalent_up_to_global_phase(const Unitary4 &u, const Unitary4 &v, double tol = 1e-10);

/// Shortest, then lexicographically first, wrappers over {H, S, S^dag} turning ZX into AB.
TwoQubitGateSpec identity_wrappers(Pauli a, Pauli b, double theta = 0);
TwoQubitGateSpec phase_shifted_axis_gate(const CalibratedGate &gate, double dphi);
TwoQubitGateSpec phase_shifted_axis_gate(double theta, double dphi);

/// The candidate words searched per qubit, in search order.
const std::vector<WrapperWord> &wrapper_candidates();

nlohmann::json unitary_to_json(const Unitary4 &u);
nlohmann::json to_json(const TwoQubitGateSpec &spec);

}  // namespace crcal

#endif
