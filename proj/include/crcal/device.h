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

#ifndef CRCAL_DEVICE_H
#define CRCAL_DEVICE_H

#include <Eigen/Dense>
#include <string>

#include "json.hpp"

namespace crcal {

inline constexpr int kDeviceSchemaVersion = 1;

/// Reported qubit parameters. Informational only; the simulation never reads them.
struct DeviceMetadata {
    double control_freq_ghz = 4.962;
    double control_anharmonicity_ghz = -0.344;
    double target_freq_ghz = 5.046;
    double target_anharmonicity_ghz = -0.343;
    bool operator==(const DeviceMetadata &) const = default;
};

/// Hidden ground truth of the virtual two-qubit device.
///
/// Couplings are Bloch precession rates in rad/us per unit drive amplitude, so a
/// coefficient c acting for t us rotates the target by c*t. The CR drive at phase phi
/// and amplitude A produces
///   c_zx + i c_zy = (g1 A + g3 A^3) exp(i (phi - phi_dev_cr))
///   c_ix + i c_iy = A (eps_ix + i eps_iy) exp(i (phi - phi_dev_cancel))
///                   - kappa_c A_c exp(i phi_c)              (cancellation tone)
///   c_iz = eps_iz A,  c_zz = eps_zz A.
struct DeviceConfig {
    double phi_dev_cr = 0.37;
    double phi_dev_cancel = -0.81;
    double g1 = 6.0;
    double g3 = -2.0;
    double eps_ix = 0.40;
    double eps_iy = 0.33;
    double eps_iz = 0.10;
    double eps_zz = 0.10;
    double kappa_c = 3.0;
    // Row-stochastic: confusion(true, observed).
    Eigen::Matrix2d confusion_control{{0.97, 0.03}, {0.04, 0.96}};
    Eigen::Matrix2d confusion_target{{0.98, 0.02}, {0.05, 0.95}};
    double p_depol_per_cr_pulse = 0.006;
    double p_depol_per_clifford = 0.002;
    double sq_pulse_ns = 35.6;
    // Flat-top width and rise of the CR(pi/2) pulse inherited from the device CNOT.
    double cr_width_ns = 400.0;
    double cr_rise_ns = 40.0;
    // Cancellation amplitude used by the device CNOT; sets the scale of the probe tone.
    double cancel_amplitude_hint = 0.10;
    DeviceMetadata metadata;

    /// Throws ValidationError if any invariant fails.
    void validate() const;

    /// Two-qubit confusion matrix, basis index 2*control + target.
    Eigen::Matrix4d confusion_two_qubit() const;

    bool operator==(const DeviceConfig &) const = default;
};

DeviceConfig default_device();

/// Strict parse: requires schema_version, rejects unknown fields, validates.
DeviceConfig device_from_json(const nlohmann::json &j);
nlohmann::json to_json(const DeviceConfig &d);
DeviceConfig load_device(const std::string &path);

}  // namespace crcal

#endif
