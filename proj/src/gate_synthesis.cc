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

#include <fmt/format.h>

#include <cmath>
#include <complex>
#include <unsupported/Eigen/KroneckerProduct>

#include "crcal/calibration.h"
#include "crcal/errors.h"

namespace crcal {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0, 1};
constexpr double kSearchTheta = 0.7;
constexpr double kSearchTol = 1e-12;

Unitary4 kron(const Unitary2 &a, const Unitary2 &b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

}  // namespace

char name(Pauli p) {
    return "IXYZ"[static_cast<int>(p)];
}

Pauli pauli_from_char(char c) {
    switch (c) {
        case 'I': return Pauli::I;
        case 'X': return Pauli::X;
        case 'Y': return Pauli::Y;
        case 'Z': return Pauli::Z;
    }
    throw ValidationError(fmt::format("unknown Pauli label '{}'", c));
}

Unitary2 pauli_matrix(Pauli p) {
    Unitary2 m;
    switch (p) {
        case Pauli::I: m << 1, 0, 0, 1; break;
        case Pauli::X: m << 0, 1, 1, 0; break;
        case Pauli::Y: m << 0, -kI, kI, 0; break;
        case Pauli::Z: m << 1, 0, 0, -1; break;
    }
    return m;
}

Unitary2 WrapperGate::matrix() const {
    Unitary2 m;
    switch (gate) {
        case SingleQubitGate::H: m << 1, 1, 1, -1; m /= std::sqrt(2.0); break;
        case SingleQubitGate::S: m << 1, 0, 0, kI; break;
        case SingleQubitGate::Sdg: m << 1, 0, 0, -kI; break;
        case SingleQubitGate::X: m << 0, 1, 1, 0; break;
        case SingleQubitGate::VirtualPhase: m << 1, 0, 0, std::exp(kI * delta); break;
    }
    return m;
}

WrapperGate WrapperGate::inverse() const {
    switch (gate) {
        case SingleQubitGate::S: return {SingleQubitGate::Sdg};
        case SingleQubitGate::Sdg: return {SingleQubitGate::S};
        case SingleQubitGate::VirtualPhase: return {SingleQubitGate::VirtualPhase, -delta};
        default: return *this;
    }
}

std::string WrapperGate::label() const {
    switch (gate) {
        case SingleQubitGate::H: return "H";
        case SingleQubitGate::S: return "S";
        case SingleQubitGate::Sdg: return "Sdg";
        case SingleQubitGate::X: return "X";
        case SingleQubitGate::VirtualPhase: return fmt::format("VP({:.9g})", delta);
    }
    return "?";
}

Unitary2 word_matrix(const WrapperWord &word) {
    Unitary2 u = Unitary2::Identity();
    for (const auto &g : word) {
        u = g.matrix() * u;
    }
    return u;
}

WrapperWord inverse_word(const WrapperWord &word) {
    WrapperWord out;
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        out.push_back(it->inverse());
    }
    return out;
}

void TwoQubitGateSpec::validate() const {
    if (generator_a == Pauli::I || generator_b == Pauli::I) {
        throw ValidationError("gate generators must be X, Y or Z");
    }
    if (axis_phase != 0 && generator_b != Pauli::X) {
        throw ValidationError("axis_phase is only defined for an X target generator");
    }
    for (int q = 0; q < 2; q++) {
        if (pre[q].size() != post[q].size()) {
            throw ValidationError(fmt::format("qubit {} has mismatched pre/post wrapper lengths", q));
        }
    }
    if (!std::isfinite(theta)) {
        throw ValidationError("theta must be finite");
    }
}

std::string TwoQubitGateSpec::label() const {
    if (axis_phase != 0) {
        return fmt::format("{}(cos{:.4g}X+sin{:.4g}Y)", name(generator_a), axis_phase, axis_phase);
    }
    return std::string{name(generator_a), name(generator_b)};
}

Unitary4 involutory_exp(const Unitary4 &generator, double theta) {
    return std::cos(theta / 2) * Unitary4::Identity() - kI * std::sin(theta / 2) * generator;
}

Unitary4 zx_unitary(double theta) {
    return involutory_exp(kron(pauli_matrix(Pauli::Z), pauli_matrix(Pauli::X)), theta);
}

Unitary4 unitary_of(const TwoQubitGateSpec &spec) {
    spec.validate();
    const Unitary4 pre = kron(word_matrix(spec.pre[0]), word_matrix(spec.pre[1]));
    const Unitary4 post = kron(word_matrix(spec.post[0]), word_matrix(spec.post[1]));
    return post * zx_unitary(spec.theta) * pre;
}

Unitary4 target_unitary(const TwoQubitGateSpec &spec) {
    spec.validate();
    Unitary2 b = pauli_matrix(spec.generator_b);
    if (spec.axis_phase != 0) {
        b = std::cos(spec.axis_phase) * pauli_matrix(Pauli::X) + std::sin(spec.axis_phase) * pauli_matrix(Pauli::Y);
    }
    return involutory_exp(kron(pauli_matrix(spec.generator_a), b), spec.theta);
}

bool is_unitary(const Unitary4 &u, double tol) {
    return ((u.adjoint() * u - Unitary4::Identity()).cwiseAbs().maxCoeff()) <= tol;
}

bool equivalent_up_to_global_phase(const Unitary4 &u, const Unitary4 &v, double tol) {
    const double unitarity_tol = std::max(tol, 1e-9);
    if (!is_unitary(u, unitarity_tol) || !is_unitary(v, unitarity_tol)) {
        throw ValidationError("equivalent_up_to_global_phase requires unitary inputs");
    }
    return std::abs((u.adjoint() * v).trace()) >= 4 - tol;
}

const std::vector<WrapperWord> &wrapper_candidates() {
    static const std::vector<WrapperWord> words = [] {
        const std::array<WrapperGate, 3> alphabet{
            WrapperGate{SingleQubitGate::H}, WrapperGate{SingleQubitGate::S}, WrapperGate{SingleQubitGate::Sdg}};
        std::vector<WrapperWord> out{{}};
        for (const auto &g : alphabet) {
            out.push_back({g});
        }
        for (const auto &g1 : alphabet) {
            for (const auto &g2 : alphabet) {
                out.push_back({g1, g2});
            }
        }
        return out;
    }();
    return words;
}

TwoQubitGateSpec identity_wrappers(Pauli a, Pauli b, double theta) {
    TwoQubitGateSpec spec;
    spec.generator_a = a;
    spec.generator_b = b;
    spec.validate();
    for (const auto &w0 : wrapper_candidates()) {
        for (const auto &w1 : wrapper_candidates()) {
            spec.theta = kSearchTheta;
            spec.pre = {w0, w1};
            spec.post = {inverse_word(w0), inverse_word(w1)};
            if (equivalent_up_to_global_phase(unitary_of(spec), target_unitary(spec), kSearchTol)) {
                spec.theta = theta;
                return spec;
            }
        }
    }
    throw std::logic_error(fmt::format("no wrapper found for {}{}", name(a), name(b)));
}

TwoQubitGateSpec phase_shifted_axis_gate(double theta, double dphi) {
    TwoQubitGateSpec spec;
    spec.theta = theta;
    spec.axis_phase = dphi;
    if (dphi != 0) {
        spec.pre[1] = {WrapperGate{SingleQubitGate::VirtualPhase, -dphi}};
        spec.post[1] = {WrapperGate{SingleQubitGate::VirtualPhase, dphi}};
    }
    return spec;
}

TwoQubitGateSpec phase_shifted_axis_gate(const CalibratedGate &gate, double dphi) {
    return phase_shifted_axis_gate(gate.theta, dphi);
}

nlohmann::json unitary_to_json(const Unitary4 &u) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < 4; r++) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < 4; c++) {
            row.push_back({u(r, c).real(), u(r, c).imag()});
        }
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json to_json(const TwoQubitGateSpec &spec) {
    auto words = [](const WrapperWord &w) {
        std::vector<std::string> out;
        for (const auto &g : w) {
            out.push_back(g.label());
        }
        return out;
    };
    return {
        {"gate", spec.label()},
        {"theta", spec.theta},
        {"axis_phase", spec.axis_phase},
        {"pre", {{"control", words(spec.pre[0])}, {"target", words(spec.pre[1])}}},
        {"post", {{"control", words(spec.post[0])}, {"target", words(spec.post[1])}}},
    };
}

}  // namespace crcal
