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

#include "crcal/calibration.h"

#include <fmt/format.h>

#include <cmath>

// Boost 1.74's pchip calls unqualified isnan.
using std::isnan;

#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/tools/roots.hpp>
#include <numbers>

#include "crcal/errors.h"
#include "crcal/io.h"
#include "crcal/seeding.h"

namespace crcal {

namespace {

// Stage indices for seed derivation.
enum Stage : uint64_t {
    kStageAmplitude = 1,
    kStagePhaseTomography = 2,
    kStageCancelOff = 3,
    kStageCancelProbe = 4,
    kStageVerify = 5,
};

EchoedCrSchedule sweep_schedule(const DeviceConfig &dev, double amplitude) {
    return build_echoed_cr_schedule(
        make_flat_top_gaussian(amplitude, 0.0, dev.cr_width_ns, dev.cr_rise_ns), std::nullopt, 0.0, dev.sq_pulse_ns);
}

void check_theta(double theta) {
    if (!(theta > 0 && theta <= std::numbers::pi)) {
        throw ValidationError(fmt::format("theta must lie in (0, pi], got {}", theta));
    }
}

void check_grid(const std::vector<double> &grid) {
    if (grid.size() < 10) {
        throw ValidationError("amplitude grid needs at least 10 points");
    }
    for (size_t i = 0; i < grid.size(); i++) {
        if (!(grid[i] >= 0 && grid[i] <= 1)) {
            throw ValidationError("amplitude grid values must lie in [0, 1]");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw ValidationError("amplitude grid must be strictly increasing");
        }
    }
}

double wrap_phase(double phi) {
    return std::remainder(phi, 2 * std::numbers::pi);
}

}  // namespace

void AmplitudeSweep::validate() const {
    check_grid(amplitudes);
    for (const auto &series : z_expectations) {
        if (series.size() != amplitudes.size()) {
            throw ValidationError("amplitude sweep series must match the amplitude grid");
        }
    }
}

std::vector<double> default_amplitude_grid(size_t n, double a_max) {
    std::vector<double> grid(n);
    for (size_t i = 0; i < n; i++) {
        grid[i] = a_max * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return grid;
}

AmplitudeSweep measure_amplitude_sweep(
    const DeviceConfig &dev, const std::vector<double> &grid, int64_t shots, uint64_t seed, size_t threads) {
    check_grid(grid);
    AmplitudeSweep sweep;
    sweep.amplitudes = grid;
    sweep.z_expectations[0].resize(grid.size());
    sweep.z_expectations[1].resize(grid.size());
    parallel_for(grid.size() * 2, threads, [&](size_t cell) {
        const size_t i = cell / 2;
        const auto control = static_cast<Control>(cell % 2);
        const Counts counts =
            sample_measurement(dev, sweep_schedule(dev, grid[i]), control, Basis::Z, shots, derive_seed(seed, cell));
        const auto m = mitigate_counts(counts, dev.confusion_target);
        sweep.z_expectations[cell % 2][i] = {grid[i], 1 - 2 * m.p1, 2 * m.stderr_p1};
    });
    return sweep;
}

AmplitudeSweep exact_amplitude_sweep(const DeviceConfig &dev, const std::vector<double> &grid) {
    check_grid(grid);
    AmplitudeSweep sweep;
    sweep.amplitudes = grid;
    for (int c = 0; c < 2; c++) {
        for (double a : grid) {
            const double z = ideal_expectation(dev, sweep_schedule(dev, a), static_cast<Control>(c), Basis::Z);
            sweep.z_expectations[c].push_back({a, z, 0.0});
        }
    }
    return sweep;
}

double solve_amplitude(const AmplitudeSweep &sweep, double theta) {
    check_theta(theta);
    sweep.validate();
    const double target = std::cos(theta);
    const size_t n = sweep.amplitudes.size();
    // Averaging the two control states removes the first-order shift of the rotation
    // rate caused by control-independent drive terms.
    std::vector<double> z(n);
    for (size_t i = 0; i < n; i++) {
        z[i] = 0.5 * (sweep.z_expectations[0][i].z + sweep.z_expectations[1][i].z);
    }
    size_t k = 0;
    while (k < n && z[k] > target) {
        k++;
    }
    if (k == n) {
        throw CalibrationError(
            "amplitude",
            fmt::format(
                "<Z> never reaches cos(theta) = {:.6f} on the sweep; increase the maximum amplitude or "
                "widen the grid",
                target));
    }
    if (k == 0) {
        throw CalibrationError(
            "amplitude", "<Z> is already below cos(theta) at the first grid point; the sweep does not bracket it");
    }
    if (z[k] == target) {
        return sweep.amplitudes[k];
    }
    // Interpolate only the first descending branch, up to the first local minimum.
    size_t end = k + 1;
    while (end < n && z[end] <= z[end - 1]) {
        end++;
    }
    std::vector<double> xs(sweep.amplitudes.begin(), sweep.amplitudes.begin() + end);
    std::vector<double> ys(z.begin(), z.begin() + end);
    const double lo = sweep.amplitudes[k - 1];
    const double hi = sweep.amplitudes[k];
    if (xs.size() < 4) {
        // Too few points for a cubic; fall back to the secant through the bracket.
        return lo + (hi - lo) * (z[k - 1] - target) / (z[k - 1] - z[k]);
    }
    boost::math::interpolators::pchip<std::vector<double>> spline(std::move(xs), std::move(ys));
    auto f = [&](double a) { return spline(a) - target; };
    boost::math::tools::eps_tolerance<double> tol(48);
    const auto [a, b] = boost::math::tools::bisect(f, lo, hi, tol);
    return 0.5 * (a + b);
}

AmplitudeCalibration calibrate_amplitude(
    const DeviceConfig &dev,
    double theta,
    const std::vector<double> &grid,
    int64_t shots,
    uint64_t seed,
    size_t threads) {
    check_theta(theta);
    AmplitudeSweep sweep = measure_amplitude_sweep(dev, grid, shots, seed, threads);
    const double a = solve_amplitude(sweep, theta);
    return {a, std::move(sweep)};
}

double calibrate_cr_phase(const HamiltonianCoefficients &coeffs) {
    const double magnitude = std::hypot(coeffs.c_zx, coeffs.c_zy);
    const double noise = std::sqrt(coeffs.covariance(0, 0) + coeffs.covariance(1, 1));
    if (coeffs.degenerate || !(magnitude > std::max(3 * noise, 1e-12))) {
        throw CalibrationError("cr_phase", "no cross-resonance signal above the noise floor");
    }
    return -std::atan2(coeffs.c_zy, coeffs.c_zx);
}

CancellationPhase calibrate_cancellation_phase(const HamiltonianCoefficients &coeffs, double phi0) {
    const double magnitude = std::hypot(coeffs.c_ix, coeffs.c_iy);
    const double noise = std::sqrt(coeffs.covariance(3, 3) + coeffs.covariance(4, 4));
    if (!(magnitude > std::max(3 * noise, 1e-12))) {
        return {phi0, 0.0, false};
    }
    const double phi1 = -std::atan2(coeffs.c_iy, coeffs.c_ix);
    return {phi0 - phi1, phi1, true};
}

CancellationAmplitude calibrate_cancellation_amplitude(
    const HamiltonianCoefficients &run1, const HamiltonianCoefficients &run2, double a0) {
    if (!(a0 > 0)) {
        throw ValidationError("probe amplitude A0 must be positive");
    }
    auto extrapolate = [&](double c1, double c2, int index, const char *axis) {
        const double diff = c1 - c2;
        const double noise = std::sqrt(run1.covariance(index, index) + run2.covariance(index, index));
        if (!(std::abs(diff) > noise) || diff == 0) {
            throw CalibrationError(
                "cancellation_amplitude",
                fmt::format("cancellation tone had no measurable effect on the 1{} term; increase A0", axis));
        }
        return a0 * c1 / diff;
    };
    CancellationAmplitude out;
    out.a_x = extrapolate(run1.c_ix, run2.c_ix, 3, "X");
    out.a_y = extrapolate(run1.c_iy, run2.c_iy, 4, "Y");
    out.a_c = 0.5 * (out.a_x + out.a_y);
    out.disagreement = out.a_c != 0 ? std::abs(out.a_x - out.a_y) / std::abs(out.a_c) : INFINITY;
    return out;
}

nlohmann::json CalibrationConfig::to_json() const {
    return {
        {"amplitude_grid", amplitude_grid},
        {"amplitude_shots", amplitude_shots},
        {"tomography_shots", tomography_shots},
        {"tomography_widths", tomography_widths},
        {"probe_amplitude", probe_amplitude ? nlohmann::json(*probe_amplitude) : nlohmann::json(nullptr)},
        {"seed", seed},
        {"verify", verify},
        {"dominance_threshold", dominance_threshold},
    };
}

EchoedCrSchedule CalibratedGate::schedule() const {
    const auto cr = make_flat_top_gaussian(amplitude, cr_phase, width, rise);
    std::optional<PulseParams> cancel;
    if (cancel_amplitude > 0) {
        cancel = make_flat_top_gaussian(cancel_amplitude, cancel_phase, width, rise);
    }
    return build_echoed_cr_schedule(cr, cancel, 0.0, sq_pulse_ns);
}

void CalibratedGate::validate() const {
    check_theta(theta);
    if (!(amplitude > 0 && amplitude <= 1)) {
        throw ValidationError("calibrated amplitude must lie in (0, 1]");
    }
    if (!(cancel_amplitude >= 0 && cancel_amplitude <= 1)) {
        throw ValidationError("cancellation amplitude must lie in [0, 1]");
    }
    schedule();
}

nlohmann::json to_json(const CalibratedGate &g) {
    const auto &p = g.provenance;
    return {
        {"schema_version", kGateSchemaVersion},
        {"gate", "ZX"},
        {"theta", g.theta},
        {"amplitude", g.amplitude},
        {"cr_phase", g.cr_phase},
        {"cancel_amplitude", g.cancel_amplitude},
        {"cancel_phase", g.cancel_phase},
        {"width_ns", g.width},
        {"rise_ns", g.rise},
        {"sq_pulse_ns", g.sq_pulse_ns},
        {"schedule", to_json(g.schedule())},
        {"provenance",
         {
             {"seed", p.seed},
             {"amplitude_grid", p.amplitude_grid},
             {"widths_ns", p.widths},
             {"amplitude_shots", p.amplitude_shots},
             {"tomography_shots", p.tomography_shots},
             {"tomography_experiments", p.tomography_experiments},
             {"tomography_count", p.tomography_count()},
             {"probe_amplitude", p.probe_amplitude},
             {"phi1", p.phi1},
             {"a_x", p.a_x},
             {"a_y", p.a_y},
             {"cancellation_disagreement", p.cancellation_disagreement},
             {"cancellation_needed", p.cancellation_needed},
         }},
    };
}

CalibratedGate gate_from_json(const nlohmann::json &j) {
    CalibratedGate g;
    try {
        if (j.at("schema_version").get<int>() != kGateSchemaVersion) {
            throw ValidationError("unsupported gate schema_version");
        }
        g.theta = j.at("theta").get<double>();
        g.amplitude = j.at("amplitude").get<double>();
        g.cr_phase = j.at("cr_phase").get<double>();
        g.cancel_amplitude = j.at("cancel_amplitude").get<double>();
        g.cancel_phase = j.at("cancel_phase").get<double>();
        g.width = j.at("width_ns").get<double>();
        g.rise = j.at("rise_ns").get<double>();
        g.sq_pulse_ns = j.value("sq_pulse_ns", kDefaultSqPulseNs);
        if (j.contains("provenance")) {
            const auto &p = j.at("provenance");
            g.provenance.seed = p.value("seed", uint64_t{0});
            g.provenance.amplitude_grid = p.value("amplitude_grid", std::vector<double>{});
            g.provenance.widths = p.value("widths_ns", std::vector<double>{});
            g.provenance.amplitude_shots = p.value("amplitude_shots", int64_t{0});
            g.provenance.tomography_shots = p.value("tomography_shots", int64_t{0});
            g.provenance.tomography_experiments =
                p.value("tomography_experiments", std::vector<std::string>{});
            g.provenance.probe_amplitude = p.value("probe_amplitude", 0.0);
            g.provenance.phi1 = p.value("phi1", 0.0);
            g.provenance.a_x = p.value("a_x", 0.0);
            g.provenance.a_y = p.value("a_y", 0.0);
            g.provenance.cancellation_disagreement = p.value("cancellation_disagreement", 0.0);
            g.provenance.cancellation_needed = p.value("cancellation_needed", true);
        }
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("gate file schema error: ") + e.what());
    }
    g.validate();
    return g;
}

double dominance_ratio(const HamiltonianCoefficients &c) {
    const double others = std::max(
        {std::abs(c.c_zy), std::abs(c.c_zz), std::abs(c.c_ix), std::abs(c.c_iy), std::abs(c.c_iz)});
    return std::abs(c.c_zx) > 0 ? others / std::abs(c.c_zx) : INFINITY;
}

VerificationReport verify_calibration(
    const DeviceConfig &dev,
    const CalibratedGate &gate,
    int64_t shots,
    uint64_t seed,
    size_t widths,
    double threshold,
    size_t threads) {
    gate.validate();
    const double rate = gate.theta / interaction_time_us(gate.schedule());
    const auto grid = default_width_grid(rate, gate.rise, widths);
    const EchoedCrSchedule forward = gate.schedule();
    const EchoedCrSchedule inverse = shift_phase(forward, std::numbers::pi);

    VerificationReport r;
    r.threshold = threshold;
    r.gate_data = run_tomography(dev, forward, grid, shots, derive_seed(seed, 1), threads);
    r.inverse_data = run_tomography(dev, inverse, grid, shots, derive_seed(seed, 2), threads);
    r.gate = extract_coefficients(fit_bloch_trajectories(r.gate_data));
    r.inverse = extract_coefficients(fit_bloch_trajectories(r.inverse_data));
    r.dominance_ratio = dominance_ratio(r.gate);

    const Vector6d a = r.gate.as_vector().cwiseAbs();
    const Vector6d b = r.inverse.as_vector().cwiseAbs();
    for (int k = 0; k < 6; k++) {
        const double d = std::abs(a(k) - b(k));
        const double se = std::sqrt(r.gate.covariance(k, k) + r.inverse.covariance(k, k));
        r.max_discrepancy = std::max(r.max_discrepancy, d);
        r.max_discrepancy_sigma = std::max(r.max_discrepancy_sigma, se > 0 ? d / se : (d > 0 ? INFINITY : 0.0));
    }
    r.coefficients_consistent = r.max_discrepancy_sigma <= 3;
    r.passed = !r.gate.degenerate && r.dominance_ratio < threshold;
    return r;
}

nlohmann::json to_json(const VerificationReport &r) {
    return {
        {"gate_coefficients", to_json(r.gate)},
        {"inverse_coefficients", to_json(r.inverse)},
        {"dominance_ratio", r.dominance_ratio},
        {"threshold", r.threshold},
        {"max_abs_coefficient_discrepancy", r.max_discrepancy},
        {"max_discrepancy_sigma", r.max_discrepancy_sigma},
        {"coefficients_consistent", r.coefficients_consistent},
        {"passed", r.passed},
    };
}

CalibrationRun run_full_calibration(const DeviceConfig &dev, double theta, const CalibrationConfig &config) {
    check_theta(theta);
    dev.validate();
    CalibrationRun run;
    CalibratedGate &gate = run.gate;
    auto &prov = gate.provenance;
    gate.theta = theta;
    gate.width = dev.cr_width_ns;
    gate.rise = dev.cr_rise_ns;
    gate.sq_pulse_ns = dev.sq_pulse_ns;
    prov.seed = config.seed;
    prov.amplitude_grid = config.amplitude_grid;
    prov.amplitude_shots = config.amplitude_shots;
    prov.tomography_shots = config.tomography_shots;

    auto staged = [](const char *stage, auto &&fn) {
        try {
            return fn();
        } catch (const CalibrationError &) {
            throw;
        } catch (const std::exception &e) {
            throw CalibrationError(stage, e.what());
        }
    };

    // 1. Amplitude.
    auto amp = staged("amplitude", [&] {
        return calibrate_amplitude(
            dev,
            theta,
            config.amplitude_grid,
            config.amplitude_shots,
            derive_seed(config.seed, kStageAmplitude),
            config.threads);
    });
    gate.amplitude = amp.amplitude;
    run.sweep = std::move(amp.sweep);

    const double t_gate = (gate.width + edge_area_constant() * gate.rise) / 1000.0;
    prov.widths = default_width_grid(theta / t_gate, gate.rise, config.tomography_widths);

    auto tomography = [&](const char *label, const EchoedCrSchedule &s, Stage stage) {
        TomographyRecord rec{label, s, {}, {}};
        staged(label, [&] {
            rec.data = run_tomography(
                dev,
                s,
                prov.widths,
                config.tomography_shots,
                derive_seed(config.seed, stage),
                config.threads);
            rec.coefficients = extract_coefficients(fit_bloch_trajectories(rec.data));
            return 0;
        });
        prov.tomography_experiments.push_back(label);
        run.tomographies.push_back(rec);
        return rec.coefficients;
    };

    // 2. CR and cancellation phases from one tomography at CR phase 0.
    const auto cr_at = [&](double phase) {
        return make_flat_top_gaussian(gate.amplitude, phase, gate.width, gate.rise);
    };
    const auto phase_coeffs = tomography(
        "phase", build_echoed_cr_schedule(cr_at(0.0), std::nullopt, 0.0, gate.sq_pulse_ns), kStagePhaseTomography);
    gate.cr_phase = staged("cr_phase", [&] { return calibrate_cr_phase(phase_coeffs); });
    const auto cancel_phase = calibrate_cancellation_phase(phase_coeffs, gate.cr_phase);
    prov.phi1 = cancel_phase.phi1;
    prov.cancellation_needed = cancel_phase.needed;
    gate.cancel_phase = wrap_phase(cancel_phase.phase);

    // 3. Cancellation amplitude by linear extrapolation between two tomographies.
    if (cancel_phase.needed) {
        const double a0 = config.probe_amplitude.value_or(0.5 * dev.cancel_amplitude_hint);
        prov.probe_amplitude = a0;
        const auto off = tomography(
            "cancel_off",
            build_echoed_cr_schedule(cr_at(gate.cr_phase), std::nullopt, 0.0, gate.sq_pulse_ns),
            kStageCancelOff);
        const auto probe_pulse = staged("cancellation_amplitude", [&] {
            return make_flat_top_gaussian(a0, gate.cancel_phase, gate.width, gate.rise);
        });
        const auto probe = tomography(
            "cancel_probe",
            build_echoed_cr_schedule(cr_at(gate.cr_phase), probe_pulse, 0.0, gate.sq_pulse_ns),
            kStageCancelProbe);
        const auto amps = calibrate_cancellation_amplitude(off, probe, a0);
        prov.a_x = amps.a_x;
        prov.a_y = amps.a_y;
        prov.cancellation_disagreement = amps.disagreement;
        double a_c = amps.a_c;
        if (a_c < 0) {
            a_c = -a_c;
            gate.cancel_phase = wrap_phase(gate.cancel_phase + std::numbers::pi);
        }
        if (a_c > 1) {
            throw CalibrationError("cancellation_amplitude", fmt::format("extrapolated amplitude {} exceeds 1", a_c));
        }
        gate.cancel_amplitude = a_c;
    }

    // 4. Verification of the full sequence.
    if (config.verify) {
        const auto verify = tomography("verification", gate.schedule(), kStageVerify);
        run.dominance_ratio = dominance_ratio(verify);
    }
    gate.validate();
    return run;
}

std::string amplitude_sweep_csv(const AmplitudeSweep &sweep) {
    std::string out = "amplitude,z_control0,stderr_control0,z_control1,stderr_control1\n";
    for (size_t i = 0; i < sweep.amplitudes.size(); i++) {
        const auto &a = sweep.z_expectations[0][i];
        const auto &b = sweep.z_expectations[1][i];
        out += fmt::format(
            "{},{},{},{},{}\n", fmt9(sweep.amplitudes[i]), fmt9(a.z), fmt9(a.stderr), fmt9(b.z), fmt9(b.stderr));
    }
    return out;
}

}  // namespace crcal
