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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "crcal/device.h"
#include "crcal/errors.h"

using namespace crcal;

namespace {

EchoedCrSchedule schedule(double amp, double phase, double width = 400.0) {
    return build_echoed_cr_schedule(make_flat_top_gaussian(amp, phase, width, 40.0), std::nullopt, 0.0);
}

// Classic RK4 on dr/dt = omega x r.
Eigen::Vector3d rk4(const Eigen::Vector3d &omega, double t, Eigen::Vector3d r, double h) {
    const int steps = static_cast<int>(std::round(t / h));
    h = t / steps;
    auto f = [&](const Eigen::Vector3d &v) -> Eigen::Vector3d { return omega.cross(v); };
    for (int i = 0; i < steps; i++) {
        const Eigen::Vector3d k1 = f(r);
        const Eigen::Vector3d k2 = f(r + h / 2 * k1);
        const Eigen::Vector3d k3 = f(r + h / 2 * k2);
        const Eigen::Vector3d k4 = f(r + h * k3);
        r += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return r;
}

DeviceConfig identity_readout(DeviceConfig d) {
    d.confusion_control = Eigen::Matrix2d::Identity();
    d.confusion_target = Eigen::Matrix2d::Identity();
    return d;
}

}  // namespace

TEST(virtual_device, zero_drive_is_zero) {
    const auto h = effective_hamiltonian(default_device(), schedule(0.0, 0.3));
    EXPECT_EQ(h.c_zx, 0);
    EXPECT_EQ(h.c_zy, 0);
    EXPECT_EQ(h.c_zz, 0);
    EXPECT_EQ(h.c_ix, 0);
    EXPECT_EQ(h.c_iy, 0);
    EXPECT_EQ(h.c_iz, 0);
}

TEST(virtual_device, aligned_phase_has_no_zy) {
    const DeviceConfig dev = default_device();
    const auto h = effective_hamiltonian(dev, schedule(0.4, dev.phi_dev_cr));
    EXPECT_EQ(h.c_zy, 0.0);
    EXPECT_NEAR(h.c_zx, dev.g1 * 0.4 + dev.g3 * 0.064, 1e-14);
}

TEST(virtual_device, quarter_turn_rotates_zx_zy) {
    const DeviceConfig dev = default_device();
    const auto a = effective_hamiltonian(dev, schedule(0.4, 0.9));
    const auto b = effective_hamiltonian(dev, schedule(0.4, 0.9 + std::numbers::pi / 2));
    // Rotation by +pi/2: (x, y) -> (-y, x).
    EXPECT_NEAR(b.c_zx, -a.c_zy, 1e-12);
    EXPECT_NEAR(b.c_zy, a.c_zx, 1e-12);
}

TEST(virtual_device, phase_covariance) {
    const DeviceConfig dev = default_device();
    const auto s = build_echoed_cr_schedule(
        make_flat_top_gaussian(0.3, 0.2, 400.0, 40.0), make_flat_top_gaussian(0.04, -1.1, 400.0, 40.0), 0.0);
    const double delta = 0.77;
    const auto h0 = effective_hamiltonian(dev, s);
    const auto h1 = effective_hamiltonian(dev, shift_phase(s, delta));
    auto rot = [&](double x, double y) {
        return Eigen::Vector2d(std::cos(delta) * x - std::sin(delta) * y, std::sin(delta) * x + std::cos(delta) * y);
    };
    EXPECT_TRUE(rot(h0.c_zx, h0.c_zy).isApprox(Eigen::Vector2d(h1.c_zx, h1.c_zy), 1e-12));
    EXPECT_TRUE(rot(h0.c_ix, h0.c_iy).isApprox(Eigen::Vector2d(h1.c_ix, h1.c_iy), 1e-12));
    EXPECT_EQ(h0.c_zz, h1.c_zz);
    EXPECT_EQ(h0.c_iz, h1.c_iz);
}

TEST(virtual_device, cancellation_is_linear) {
    const DeviceConfig dev = default_device();
    auto with_cancel = [&](double ac) {
        std::optional<PulseParams> c;
        if (ac > 0) {
            c = make_flat_top_gaussian(ac, 0.4, 400.0, 40.0);
        }
        return effective_hamiltonian(
            dev, build_echoed_cr_schedule(make_flat_top_gaussian(0.3, 0.2, 400.0, 40.0), c, 0.0));
    };
    const auto h0 = with_cancel(0);
    const auto h1 = with_cancel(0.01);
    const auto h2 = with_cancel(0.02);
    EXPECT_NEAR(h2.c_ix - h1.c_ix, h1.c_ix - h0.c_ix, 1e-13);
    EXPECT_NEAR(h2.c_iy - h1.c_iy, h1.c_iy - h0.c_iy, 1e-13);
    EXPECT_NEAR(std::hypot(h1.c_ix - h0.c_ix, h1.c_iy - h0.c_iy), dev.kappa_c * 0.01, 1e-13);
    EXPECT_EQ(h1.c_zx, h0.c_zx);
}

TEST(virtual_device, field_sum_and_difference) {
    const auto h = effective_hamiltonian(default_device(), schedule(0.5, 1.3));
    const Eigen::Vector3d f0 = h.field(Control::Zero);
    const Eigen::Vector3d f1 = h.field(Control::One);
    EXPECT_LT((f0 + f1 - 2 * Eigen::Vector3d(h.c_ix, h.c_iy, h.c_iz)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((f0 - f1 - 2 * Eigen::Vector3d(h.c_zx, h.c_zy, h.c_zz)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(virtual_device, evolve_examples) {
    EffectiveHamiltonian h;
    h.c_iz = 1.7;
    for (double t : {0.0, 0.3, 2.0}) {
        const auto r = evolve_bloch(h, Control::Zero, t, BlochVector{});
        EXPECT_NEAR(r.z, 1.0, 1e-15);
        EXPECT_NEAR(r.x, 0.0, 1e-15);
    }
    const Eigen::Vector3d omega(2.0, 0.0, 0.0);
    const auto r = rotate_bloch(omega, std::numbers::pi / 2.0, BlochVector{});
    EXPECT_NEAR(r.x, 0.0, 1e-15);
    EXPECT_NEAR(r.y, 0.0, 1e-15);
    EXPECT_NEAR(r.z, -1.0, 1e-15);
}

TEST(virtual_device, evolve_matches_rk4) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0, 2);
    for (int trial = 0; trial < 5; trial++) {
        EffectiveHamiltonian h{n(rng), n(rng), n(rng), n(rng), n(rng), n(rng)};
        for (Control c : {Control::Zero, Control::One}) {
            const BlochVector r0{0.3, -0.4, std::sqrt(1 - 0.25)};
            const double t = 0.8;
            const auto r = evolve_bloch(h, c, t, r0);
            const Eigen::Vector3d ref = rk4(h.field(c), t, r0.vec(), 1e-4);
            EXPECT_TRUE((r.vec() - ref).cwiseAbs().maxCoeff() < 1e-8) << trial;
        }
    }
}

TEST(virtual_device, evolve_preserves_norm) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0, 3);
    std::uniform_real_distribution<double> u(0, 5);
    for (int i = 0; i < 10000; i++) {
        const Eigen::Vector3d omega(n(rng), n(rng), n(rng));
        Eigen::Vector3d r0(n(rng), n(rng), n(rng));
        r0 *= u(rng) / 5 / r0.norm();
        const auto r = rotate_bloch(omega, u(rng), BlochVector::from(r0));
        ASSERT_NEAR(r.norm(), r0.norm(), 1e-12);
    }
}

TEST(virtual_device, sampling_zero_drive) {
    const DeviceConfig dev = identity_readout(default_device());
    for (uint64_t seed : {1u, 2u, 3u}) {
        const Counts c = sample_measurement(dev, schedule(0.0, 0.0), Control::One, Basis::Z, 5000, seed);
        EXPECT_EQ(c.n1, 0);
        EXPECT_EQ(c.n0, 5000);
    }
}

TEST(virtual_device, sampling_is_deterministic) {
    const DeviceConfig dev = default_device();
    const auto s = schedule(0.3, 0.1);
    EXPECT_EQ(
        sample_measurement(dev, s, Control::Zero, Basis::X, 20000, 42),
        sample_measurement(dev, s, Control::Zero, Basis::X, 20000, 42));
    EXPECT_THROW(sample_measurement(dev, s, Control::Zero, Basis::X, 0, 42), ValidationError);
}

TEST(virtual_device, readout_error_binomial) {
    DeviceConfig dev = default_device();
    dev.confusion_target << 0.98, 0.02, 0.05, 0.95;
    const int64_t shots = 100000;
    const Counts c = sample_measurement(dev, schedule(0.0, 0.0), Control::Zero, Basis::Z, shots, 5);
    const double p = static_cast<double>(c.n1) / shots;
    EXPECT_NEAR(p, 0.02, 3 * std::sqrt(0.02 * 0.98 / shots));
}

TEST(virtual_device, sampling_converges_to_analytic) {
    const DeviceConfig dev = identity_readout(default_device());
    const auto s = schedule(0.35, 0.6);
    const int64_t shots = 100000;
    for (Basis b : {Basis::X, Basis::Y, Basis::Z}) {
        const double expect = ideal_expectation(dev, s, Control::One, b);
        const double p1 = (1 - expect) / 2;
        const Counts c = sample_measurement(dev, s, Control::One, b, shots, 99 + static_cast<int>(b));
        EXPECT_NEAR(static_cast<double>(c.n1) / shots, p1, 3 * std::sqrt(p1 * (1 - p1) / shots) + 1e-12);
    }
}

TEST(virtual_device, mitigation_examples) {
    const Eigen::Vector2d obs(0.7, 0.3);
    EXPECT_TRUE(mitigate_readout(obs, Eigen::Matrix2d::Identity()).isApprox(obs, 1e-15));

    Eigen::Matrix2d conf;
    conf << 0.9, 0.1, 0.1, 0.9;
    const Eigen::VectorXd fixed = mitigate_readout(Eigen::Vector2d(0.9, 0.1), conf);
    EXPECT_NEAR(fixed(0), 1.0, 1e-12);
    EXPECT_NEAR(fixed(1), 0.0, 1e-12);

    const Eigen::VectorXd clipped = mitigate_readout(Eigen::Vector2d(0.95, 0.05), conf);
    EXPECT_EQ(clipped(1), 0.0);
    EXPECT_NEAR(clipped.sum(), 1.0, 1e-15);
}

TEST(virtual_device, mitigation_singular) {
    Eigen::Matrix2d conf;
    conf << 0.5, 0.5, 0.5, 0.5;
    try {
        mitigate_readout(Eigen::Vector2d(0.5, 0.5), conf);
        FAIL() << "expected NumericError";
    } catch (const NumericError &e) {
        EXPECT_NE(std::string(e.what()).find("condition number"), std::string::npos);
    }
}

TEST(virtual_device, mitigated_counts_error) {
    Eigen::Matrix2d conf;
    conf << 0.98, 0.02, 0.05, 0.95;
    const auto m = mitigate_counts({7000, 3000}, conf);
    // Observed p1 = 0.3 = 0.02 + p * (0.95 - 0.02).
    EXPECT_NEAR(m.p1, (0.3 - 0.02) / 0.93, 1e-12);
    EXPECT_NEAR(m.stderr_p1, std::sqrt(0.3 * 0.7 / 10000) / 0.93, 1e-5);
    EXPECT_GT(mitigate_counts({10000, 0}, conf).stderr_p1, 0);
}

TEST(virtual_device, depolarizing_survival) {
    EXPECT_EQ(apply_depolarizing_survival(0.01, 0), 1.0);
    EXPECT_NEAR(apply_depolarizing_survival(0.01, 2), 0.9801, 1e-15);
    EXPECT_NEAR(apply_depolarizing_survival(0.01, 4) / apply_depolarizing_survival(0.01, 2), 0.9801, 1e-15);
    EXPECT_THROW(apply_depolarizing_survival(1.0, 1), ValidationError);
    EXPECT_THROW(apply_depolarizing_survival(0.1, -1), ValidationError);
}

TEST(virtual_device, interaction_time) {
    const auto s = schedule(0.3, 0.0, 400.0);
    EXPECT_NEAR(interaction_time_us(s), (400.0 + edge_area_constant() * 40.0) / 1000.0, 1e-15);
}

TEST(device_config, json_roundtrip) {
    const DeviceConfig d = default_device();
    EXPECT_EQ(device_from_json(to_json(d)), d);
    EXPECT_NO_THROW(load_device(std::string(CRCAL_SOURCE_DIR) + "/configs/device_default.json"));
    EXPECT_EQ(load_device(std::string(CRCAL_SOURCE_DIR) + "/configs/device_default.json"), d);
}

TEST(device_config, rejects_bad_input) {
    auto j = to_json(default_device());
    auto unknown = j;
    unknown["gamma"] = 1.0;
    EXPECT_THROW(device_from_json(unknown), ValidationError);
    auto nested = j;
    nested["readout_confusion"]["extra"] = 1;
    EXPECT_THROW(device_from_json(nested), ValidationError);
    auto missing = j;
    missing.erase("schema_version");
    EXPECT_THROW(device_from_json(missing), ValidationError);
    auto version = j;
    version["schema_version"] = 2;
    EXPECT_THROW(device_from_json(version), ValidationError);
    auto rows = j;
    rows["readout_confusion"]["target"] = {{0.9, 0.2}, {0.0, 1.0}};
    EXPECT_THROW(device_from_json(rows), ValidationError);
    auto g1 = j;
    g1["g1"] = 0.0;
    EXPECT_THROW(device_from_json(g1), ValidationError);
    auto depol = j;
    depol["p_depol_per_cr_pulse"] = 1.0;
    EXPECT_THROW(device_from_json(depol), ValidationError);
    auto type = j;
    type["g3"] = "big";
    EXPECT_THROW(device_from_json(type), ValidationError);
}

TEST(device_config, two_qubit_confusion) {
    const DeviceConfig d = default_device();
    const Eigen::Matrix4d m = d.confusion_two_qubit();
    // |10> read as |01>: control flips 1->0 and target flips 0->1.
    EXPECT_NEAR(m(2, 1), d.confusion_control(1, 0) * d.confusion_target(0, 1), 1e-15);
    for (int r = 0; r < 4; r++) {
        EXPECT_NEAR(m.row(r).sum(), 1.0, 1e-15);
    }
}
