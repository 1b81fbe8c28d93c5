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

#ifndef CRCAL_CALIBRATION_H
#define CRCAL_CALIBRATION_H

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crcal/tomography.h"
#include "json.hpp"

namespace crcal {

inline constexpr int kGateSchemaVersion = 1;
inline constexpr double kDefaultDominanceThreshold = 0.02;
/// Calibration may spend at most this many Hamiltonian tomography experiments.
inline constexpr int kTomographyBudget = 4;

struct AmplitudePoint {
    double amplitude;
    double z;
    double stderr;
};

/// <Z> of the target versus CR amplitude, with the control in |0> and |1>.
struct AmplitudeSweep {
    std::vector<double> amplitudes;
    std::array<std::vector<AmplitudePoint>, 2> z_expectations;

    void validate() const;
};

std::vector<double> default_amplitude_grid(size_t n = 41, double a_max = 1.0);

/// Shot-sampled sweep at the inherited width and rise, CR phase 0, no cancellation tone.
AmplitudeSweep measure_amplitude_sweep(
    const DeviceConfig &dev, const std::vector<double> &grid, int64_t shots, uint64_t seed, size_t threads = 1);

/// Same sweep with exact expectation values.
AmplitudeSweep exact_amplitude_sweep(const DeviceConfig &dev, const std::vector<double> &grid);

/// Smallest amplitude where the control-averaged <Z> crosses cos(theta): monotone cubic
/// (PCHIP) interpolation on the first descending branch, then bisection.
double solve_amplitude(const AmplitudeSweep &sweep, double theta);

struct AmplitudeCalibration {
    double amplitude;
    AmplitudeSweep sweep;
};
AmplitudeCalibration calibrate_amplitude(
    const DeviceConfig &dev,
    double theta,
    const std::vector<double> &grid,
    int64_t shots,
    uint64_t seed,
    size_t threads = 1);

/// phi0 = -atan2(c_zy, c_zx). Throws CalibrationError when there is no resolvable CR signal.
double calibrate_cr_phase(const HamiltonianCoefficients &coeffs);

struct CancellationPhase {
    double phase;  // phi0 - phi1
    double phi1;   // -atan2(c_iy, c_ix)
    bool needed;   // false when (c_ix, c_iy) is below the noise floor
};
CancellationPhase calibrate_cancellation_phase(const HamiltonianCoefficients &coeffs, double phi0);

struct CancellationAmplitude {
    double a_x;
    double a_y;
    double a_c;           // (a_x + a_y) / 2
    double disagreement;  // |a_x - a_y| / |a_c|
};
/// Linear extrapolation to the zero of the 1X and 1Y coefficients from a run without the
/// cancellation tone (run1) and with it at amplitude a0 (run2).
CancellationAmplitude calibrate_cancellation_amplitude(
    const HamiltonianCoefficients &run1, const HamiltonianCoefficients &run2, double a0);

struct CalibrationConfig {
    std::vector<double> amplitude_grid = default_amplitude_grid();
    int64_t amplitude_shots = 20000;
    int64_t tomography_shots = 20000;
    size_t tomography_widths = kDefaultTomographyWidths;
    std::optional<double> probe_amplitude;  // A0; defaults to half the device's CNOT cancellation amplitude
    uint64_t seed = 20230501;
    bool verify = true;
    double dominance_threshold = kDefaultDominanceThreshold;
    size_t threads = 1;

    nlohmann::json to_json() const;
};

struct CalibrationProvenance {
    uint64_t seed = 0;
    std::vector<double> amplitude_grid;
    std::vector<double> widths;
    int64_t amplitude_shots = 0;
    int64_t tomography_shots = 0;
    std::vector<std::string> tomography_experiments;
    double probe_amplitude = 0;
    double phi1 = 0;
    double a_x = 0;
    double a_y = 0;
    double cancellation_disagreement = 0;
    bool cancellation_needed = true;

    int tomography_count() const {
        return static_cast<int>(tomography_experiments.size());
    }
};

/// CR(theta): the parameters that make the echoed schedule implement exp(-i theta/2 Z x X).
struct CalibratedGate {
    double theta = 0;
    double amplitude = 0;
    double cr_phase = 0;
    double cancel_amplitude = 0;
    double cancel_phase = 0;
    double width = 0;
    double rise = 1;
    double sq_pulse_ns = kDefaultSqPulseNs;
    CalibrationProvenance provenance;

    EchoedCrSchedule schedule() const;
    void validate() const;
};

nlohmann::json to_json(const CalibratedGate &g);
CalibratedGate gate_from_json(const nlohmann::json &j);

struct TomographyRecord {
    std::string label;
    EchoedCrSchedule schedule;
    TomographyData data;
    HamiltonianCoefficients coefficients;
};

struct VerificationReport {
    HamiltonianCoefficients gate;
    HamiltonianCoefficients inverse;
    TomographyData gate_data;
    TomographyData inverse_data;
    /// max(|c_zy|, |c_zz|, |c_ix|, |c_iy|, |c_iz|) / |c_zx|
    double dominance_ratio = 0;
    /// Largest ||c_k(gate)| - |c_k(inverse)|| and the same in units of its standard error.
    double max_discrepancy = 0;
    double max_discrepancy_sigma = 0;
    double threshold = kDefaultDominanceThreshold;
    bool coefficients_consistent = false;
    bool passed = false;
};

double dominance_ratio(const HamiltonianCoefficients &c);

/// Tomography of the gate and of its inverse (frame shift pi).
VerificationReport verify_calibration(
    const DeviceConfig &dev,
    const CalibratedGate &gate,
    int64_t shots,
    uint64_t seed,
    size_t widths = kDefaultTomographyWidths,
    double threshold = kDefaultDominanceThreshold,
    size_t threads = 1);

nlohmann::json to_json(const VerificationReport &r);

struct CalibrationRun {
    CalibratedGate gate;
    AmplitudeSweep sweep;
    std::vector<TomographyRecord> tomographies;
    std::optional<double> dominance_ratio;  // from the verification tomography, when run
};

/// Amplitude sweep, then tomography for the CR phase and cancellation phase, two tomographies
/// without/with a probe cancellation tone for the cancellation amplitude, and an optional
/// verification tomography of the finished sequence.
CalibrationRun run_full_calibration(const DeviceConfig &dev, double theta, const CalibrationConfig &config);

std::string amplitude_sweep_csv(const AmplitudeSweep &sweep);

}  // namespace crcal

#endif
