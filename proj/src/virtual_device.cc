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

#include "crcal/virtual_device.h"

#include <cmath>
#include <complex>
#include <random>
#include <string>

#include "crcal/errors.h"

namespace crcal {

const char *name(Basis b) {
    switch (b) {
        case Basis::X:
            return "X";
        case Basis::Y:
            return "Y";
        case Basis::Z:
            return "Z";
    }
    return "?";
}

Eigen::Vector3d EffectiveHamiltonian::field(Control c) const {
    const double sign = c == Control::Zero ? 1.0 : -1.0;
    return {c_ix + sign * c_zx, c_iy + sign * c_zy, c_iz + sign * c_zz};
}

double BlochVector::norm() const {
    return std::sqrt(x * x + y * y + z * z);
}

double BlochVector::component(Basis b) const {
    switch (b) {
        case Basis::X:
            return x;
        case Basis::Y:
            return y;
        case Basis::Z:
            return z;
    }
    return 0;
}

EffectiveHamiltonian effective_hamiltonian(const DeviceConfig &dev, const EchoedCrSchedule &s) {
    using cd = std::complex<double>;
    const double a = s.cr_pulse.amplitude;
    const double phi = s.cr_pulse.phase + s.phase_frame_shift;
    const double g = dev.g1 * a + dev.g3 * a * a * a;

    const cd z_xy = g * std::polar(1.0, phi - dev.phi_dev_cr);
    cd i_xy = a * cd(dev.eps_ix, dev.eps_iy) * std::polar(1.0, phi - dev.phi_dev_cancel);
    if (s.cancellation) {
        const double phi_c = s.cancellation->phase + s.phase_frame_shift;
        i_xy -= dev.kappa_c * s.cancellation->amplitude * std::polar(1.0, phi_c);
    }

    EffectiveHamiltonian h;
    h.c_zx = z_xy.real();
    h.c_zy = z_xy.imag();
    h.c_zz = dev.eps_zz * a;
    h.c_ix = i_xy.real();
    h.c_iy = i_xy.imag();
    h.c_iz = dev.eps_iz * a;
    return h;
}

BlochVector rotate_bloch(const Eigen::Vector3d &omega, double t_us, const BlochVector &r0) {
    const double w = omega.norm();
    const double angle = w * t_us;
    if (w == 0 || angle == 0) {
        return r0;
    }
    const Eigen::Vector3d n = omega / w;
    const Eigen::Vector3d r = r0.vec();
    const Eigen::Vector3d out =
        r * std::cos(angle) + n.cross(r) * std::sin(angle) + n * n.dot(r) * (1 - std::cos(angle));
    return BlochVector::from(out);
}

BlochVector evolve_bloch(const EffectiveHamiltonian &h, Control control, double t_us, const BlochVector &r0) {
    return rotate_bloch(h.field(control), t_us, r0);
}

double interaction_time_us(const EchoedCrSchedule &s) {
    return effective_area(s.cr_pulse) / 1000.0;
}

double ideal_expectation(const DeviceConfig &dev, const EchoedCrSchedule &s, Control control, Basis basis) {
    const auto h = effective_hamiltonian(dev, s);
    return evolve_bloch(h, control, interaction_time_us(s), BlochVector{}).component(basis);
}

Counts sample_measurement(
    const DeviceConfig &dev, const EchoedCrSchedule &s, Control control, Basis basis, int64_t shots, uint64_t seed) {
    if (shots < 1) {
        throw ValidationError("shots must be at least 1");
    }
    const double expectation = ideal_expectation(dev, s, control, basis);
    const double p1 = std::clamp((1 - expectation) / 2, 0.0, 1.0);
    const auto &m = dev.confusion_target;
    const double p1_observed = std::clamp((1 - p1) * m(0, 1) + p1 * m(1, 1), 0.0, 1.0);
    std::mt19937_64 rng(seed);
    std::binomial_distribution<int64_t> draw(shots, p1_observed);
    const int64_t n1 = draw(rng);
    return Counts{shots - n1, n1};
}

Eigen::VectorXd mitigate_readout(const Eigen::VectorXd &observed, const Eigen::MatrixXd &confusion) {
    if (confusion.rows() != confusion.cols() || confusion.rows() != observed.size()) {
        throw ValidationError("confusion matrix shape does not match the observed distribution");
    }
    if (std::abs(observed.sum() - 1) > 1e-9) {
        throw ValidationError("observed probabilities must sum to 1");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(confusion);
    const auto &sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    if (!(cond < 1e12)) {
        throw NumericError("confusion matrix is singular (condition number " + std::to_string(cond) + ")");
    }
    // observed = confusion^T * true
    Eigen::VectorXd corrected = confusion.transpose().partialPivLu().solve(observed);
    corrected = corrected.cwiseMax(0.0).cwiseMin(1.0);
    const double total = corrected.sum();
    if (total <= 0) {
        throw NumericError("readout mitigation produced an empty distribution");
    }
    return corrected / total;
}

MitigatedProbability mitigate_counts(const Counts &counts, const Eigen::Matrix2d &confusion) {
    const double shots = static_cast<double>(counts.n0 + counts.n1);
    Eigen::Vector2d observed(counts.n0 / shots, counts.n1 / shots);
    const Eigen::VectorXd corrected = mitigate_readout(observed, confusion);
    // Add-half smoothing keeps the error bar finite at 0 or `shots` ones.
    const double p_smooth = (counts.n1 + 0.5) / (shots + 1);
    const double gain = std::abs(1 - confusion(0, 1) - confusion(1, 0));
    return {corrected(1), std::sqrt(p_smooth * (1 - p_smooth) / shots) / gain};
}

double apply_depolarizing_survival(double p, int n_pulses) {
    if (!(p >= 0 && p < 1)) {
        throw ValidationError("depolarizing probability must lie in [0, 1)");
    }
    if (n_pulses < 0) {
        throw ValidationError("pulse count must be non-negative");
    }
    return std::pow(1 - p, n_pulses);
}

}  // namespace crcal
