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

#ifndef CRCAL_VIRTUAL_DEVICE_H
#define CRCAL_VIRTUAL_DEVICE_H

#include <Eigen/Dense>
#include <cstdint>

#include "crcal/device.h"
#include "crcal/pulse_model.h"

namespace crcal {

enum class Control : int { Zero = 0, One = 1 };
enum class Basis : int { X = 0, Y = 1, Z = 2 };

const char *name(Basis b);

/// Pauli coefficients of the target-qubit interaction, in rad/us.
struct EffectiveHamiltonian {
    double c_zx = 0;
    double c_zy = 0;
    double c_zz = 0;
    double c_ix = 0;
    double c_iy = 0;
    double c_iz = 0;

    /// Precession field seen by the target: c_i + c_z for control |0>, c_i - c_z for |1>.
    Eigen::Vector3d field(Control c) const;
};

struct BlochVector {
    double x = 0;
    double y = 0;
    double z = 1;

    double norm() const;
    double component(Basis b) const;
    Eigen::Vector3d vec() const {
        return {x, y, z};
    }
    static BlochVector from(const Eigen::Vector3d &v) {
        return {v.x(), v.y(), v.z()};
    }
};

EffectiveHamiltonian effective_hamiltonian(const DeviceConfig &dev, const EchoedCrSchedule &s);

/// Rotation of r0 about `omega` by |omega| * t (Rodrigues). Solves dr/dt = omega x r.
BlochVector rotate_bloch(const Eigen::Vector3d &omega, double t_us, const BlochVector &r0);

BlochVector evolve_bloch(const EffectiveHamiltonian &h, Control control, double t_us, const BlochVector &r0);

/// Interaction time of a schedule: effective_area of the CR pulse, in us.
double interaction_time_us(const EchoedCrSchedule &s);

/// Noiseless target expectation value after the schedule, target starting in |0>.
double ideal_expectation(const DeviceConfig &dev, const EchoedCrSchedule &s, Control control, Basis basis);

struct Counts {
    int64_t n0 = 0;
    int64_t n1 = 0;
    bool operator==(const Counts &) const = default;
};

/// Shot-sampled target measurement with readout error. Deterministic in `seed`.
Counts sample_measurement(
    const DeviceConfig &dev, const EchoedCrSchedule &s, Control control, Basis basis, int64_t shots, uint64_t seed);

/// Applies the inverse of a row-stochastic confusion(true, observed) matrix to an observed
/// distribution, then clips to [0, 1] and renormalizes. Clipping biases estimates near
/// the boundary of the simplex.
Eigen::VectorXd mitigate_readout(const Eigen::VectorXd &observed, const Eigen::MatrixXd &confusion);

/// Mitigated P(1) and its standard error for a single-qubit count.
struct MitigatedProbability {
    double p1;
    double stderr_p1;
};
MitigatedProbability mitigate_counts(const Counts &counts, const Eigen::Matrix2d &confusion);

/// Contraction of the generalized Bloch vector after n_pulses depolarizing CR pulses.
double apply_depolarizing_survival(double p, int n_pulses);

}  // namespace crcal

#endif
