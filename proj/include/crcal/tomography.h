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

#ifndef CRCAL_TOMOGRAPHY_H
#define CRCAL_TOMOGRAPHY_H

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "crcal/virtual_device.h"
#include "json.hpp"

namespace crcal {

inline constexpr size_t kMinTomographyWidths = 8;
inline constexpr int64_t kMinTomographyShots = 1000;
inline constexpr size_t kDefaultTomographyWidths = 512;
/// Below this observable rotation (rad) over the sweep the field is reported as unidentifiable.
inline constexpr double kDegenerateAngle = 0.2;

using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6d = Eigen::Matrix<double, 6, 1>;

struct TomographyPoint {
    double width;
    int64_t shots;
    int64_t n1;
    double p1;           // readout-mitigated
    double expectation;  // 1 - 2 p1
    double stderr;
};

/// Target Bloch trajectories over a width sweep, for both control states and all bases.
struct TomographyData {
    std::vector<double> widths;
    double rise_ns = 1;
    int64_t shots_per_point = 0;
    std::array<std::array<std::vector<TomographyPoint>, 3>, 2> series;

    const std::vector<TomographyPoint> &at(Control c, Basis b) const {
        return series[static_cast<int>(c)][static_cast<int>(b)];
    }
    std::vector<TomographyPoint> &at(Control c, Basis b) {
        return series[static_cast<int>(c)][static_cast<int>(b)];
    }
    /// Interaction time (us) of a sweep point.
    double time_us(double width) const;
    void validate() const;
};

/// Fitted precession field for one control state.
struct FieldFit {
    Eigen::Vector3d omega = Eigen::Vector3d::Zero();
    Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
    double chi2_per_dof = 0;
    int iterations = 0;
    bool degenerate = false;
};

struct TrajectoryFit {
    FieldFit control0;
    FieldFit control1;

    Matrix6d covariance() const;
    bool degenerate() const {
        return control0.degenerate || control1.degenerate;
    }
};

/// One expectation-value sample of a single-control trajectory.
struct TrajectorySample {
    double t_us;
    Basis basis;
    double value;
    double stderr;
};

/// Coefficients in rad/us, ordered (zx, zy, zz, ix, iy, iz) in `covariance`.
struct HamiltonianCoefficients {
    double c_zx = 0;
    double c_zy = 0;
    double c_zz = 0;
    double c_ix = 0;
    double c_iy = 0;
    double c_iz = 0;
    Matrix6d covariance = Matrix6d::Zero();
    bool degenerate = false;

    Vector6d as_vector() const;
    double sigma(int index) const;
    EffectiveHamiltonian as_hamiltonian() const;
};

/// Sweeps the flat-top width of `base` and samples X, Y, Z for both control states.
/// Each (width, control, basis) cell has its own seed derived from `seed`, so the result
/// does not depend on `threads`.
TomographyData run_tomography(
    const DeviceConfig &dev,
    const EchoedCrSchedule &base,
    const std::vector<double> &widths,
    int64_t shots,
    uint64_t seed,
    size_t threads = 1);

/// Weighted least-squares fit of a Rodrigues trajectory starting at +Z.
/// Initial frequency from a periodogram peak, axis from a linear solve at that frequency,
/// then Levenberg-Marquardt with an analytic Jacobian. Throws FitError on non-convergence.
FieldFit fit_precession_field(const std::vector<TrajectorySample> &samples);

/// Model trajectory and its Jacobian with respect to omega.
Eigen::Vector3d trajectory_model(const Eigen::Vector3d &omega, double t_us);
Eigen::Matrix3d trajectory_jacobian(const Eigen::Vector3d &omega, double t_us);

TrajectoryFit fit_bloch_trajectories(const TomographyData &data);

/// c_z = (omega0 - omega1) / 2, c_i = (omega0 + omega1) / 2, covariance propagated linearly.
HamiltonianCoefficients extract_coefficients(
    const Eigen::Vector3d &omega0, const Eigen::Vector3d &omega1, const Matrix6d &covariance = Matrix6d::Zero());
HamiltonianCoefficients extract_coefficients(const TrajectoryFit &fit);

/// Evenly spaced widths from 0 to the width at which a field of `rate_rad_per_us`
/// turns the target by 4 pi.
std::vector<double> default_width_grid(double rate_rad_per_us, double rise_ns, size_t n = kDefaultTomographyWidths);

std::string tomography_csv(const TomographyData &data);
nlohmann::json to_json(const HamiltonianCoefficients &c);

}  // namespace crcal

#endif
