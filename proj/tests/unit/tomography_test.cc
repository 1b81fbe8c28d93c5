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

#include "crcal/tomography.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "crcal/device.h"
#include "crcal/errors.h"

using namespace crcal;

namespace {

// Synthetic trajectory straight from the Rodrigues rotation, optionally shot-sampled.
std::vector<TrajectorySample> synthetic(
    const Eigen::Vector3d &omega, int n_times, int64_t shots, std::mt19937_64 *rng, double t_max = -1) {
    if (t_max < 0) {
        t_max = 4 * std::numbers::pi / omega.norm();
    }
    std::vector<TrajectorySample> out;
    for (int i = 0; i < n_times; i++) {
        const double t = t_max * i / (n_times - 1);
        const BlochVector r = rotate_bloch(omega, t, BlochVector{});
        for (Basis b : {Basis::X, Basis::Y, Basis::Z}) {
            const double v = r.component(b);
            if (rng == nullptr) {
                out.push_back({t, b, v, 0.01});
                continue;
            }
            const double p1 = std::clamp((1 - v) / 2, 0.0, 1.0);
            std::binomial_distribution<int64_t> draw(shots, p1);
            const int64_t n1 = draw(*rng);
            const double s = (n1 + 0.5) / (shots + 1.0);
            out.push_back({t, b, 1 - 2.0 * n1 / shots, 2 * std::sqrt(s * (1 - s) / shots)});
        }
    }
    return out;
}

EchoedCrSchedule base(double amp, double phase) {
    return build_echoed_cr_schedule(make_flat_top_gaussian(amp, phase, 400.0, 40.0), std::nullopt, 0.0);
}

}  // namespace

TEST(tomography, jacobian_matches_finite_differences) {
    const double h = 1e-6;
    for (const Eigen::Vector3d omega :
         {Eigen::Vector3d(2.0, 0.3, 0.5), Eigen::Vector3d(-1.0, 4.0, 0.2), Eigen::Vector3d(1e-4, 2e-4, -1e-4)}) {
        for (double t : {0.05, 0.7, 2.3}) {
            const Eigen::Matrix3d jac = trajectory_jacobian(omega, t);
            for (int k = 0; k < 3; k++) {
                Eigen::Vector3d up = omega, dn = omega;
                up(k) += h;
                dn(k) -= h;
                const Eigen::Vector3d fd = (trajectory_model(up, t) - trajectory_model(dn, t)) / (2 * h);
                EXPECT_LT((jac.col(k) - fd).cwiseAbs().maxCoeff(), 1e-7) << omega.transpose() << " t=" << t;
            }
        }
    }
}

TEST(tomography, model_matches_rotation) {
    const Eigen::Vector3d omega(0.4, -1.2, 2.0);
    for (double t : {0.0, 0.3, 1.9}) {
        EXPECT_LT((trajectory_model(omega, t) - rotate_bloch(omega, t, BlochVector{}).vec()).norm(), 1e-14);
    }
}

TEST(tomography, noiseless_roundtrip) {
    const Eigen::Vector3d omega(2.0, 0.0, 0.5);
    const FieldFit fit = fit_precession_field(synthetic(omega, 16, 0, nullptr));
    EXPECT_FALSE(fit.degenerate);
    EXPECT_LT((fit.omega - omega).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(tomography, fit_is_order_independent) {
    std::mt19937_64 rng(3);
    auto samples = synthetic(Eigen::Vector3d(1.5, -0.7, 0.4), 24, 20000, &rng);
    const FieldFit a = fit_precession_field(samples);
    std::shuffle(samples.begin(), samples.end(), rng);
    const FieldFit b = fit_precession_field(samples);
    EXPECT_LT((a.omega - b.omega).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(tomography, coverage) {
    const Eigen::Vector3d omega(2.0, 0.3, 0.5);
    std::mt19937_64 rng(2024);
    int inside = 0;
    for (int rep = 0; rep < 100; rep++) {
        const FieldFit fit = fit_precession_field(synthetic(omega, 32, 20000, &rng));
        bool ok = true;
        for (int k = 0; k < 3; k++) {
            ok = ok && std::abs(fit.omega(k) - omega(k)) <= 3 * std::sqrt(fit.covariance(k, k));
        }
        inside += ok;
    }
    EXPECT_GE(inside, 95);
}

TEST(tomography, flat_data_is_degenerate) {
    std::vector<TrajectorySample> flat;
    for (int i = 0; i < 16; i++) {
        flat.push_back({0.1 * i, Basis::X, 0.0, 0.01});
        flat.push_back({0.1 * i, Basis::Y, 0.0, 0.01});
        flat.push_back({0.1 * i, Basis::Z, 1.0, 0.01});
    }
    EXPECT_TRUE(fit_precession_field(flat).degenerate);
}

TEST(tomography, extract_examples) {
    const auto pure = extract_coefficients(Eigen::Vector3d(3, 0, 0), Eigen::Vector3d(-3, 0, 0));
    EXPECT_EQ(pure.c_zx, 3);
    EXPECT_EQ(pure.c_ix, 0);
    EXPECT_EQ(pure.c_zy, 0);
    EXPECT_EQ(pure.c_iz, 0);
    const auto drive = extract_coefficients(Eigen::Vector3d(1, 1, 1), Eigen::Vector3d(1, 1, 1));
    EXPECT_EQ(drive.c_zx, 0);
    EXPECT_EQ(drive.c_zy, 0);
    EXPECT_EQ(drive.c_zz, 0);
    EXPECT_EQ(drive.c_ix, 1);
    EXPECT_EQ(drive.c_iy, 1);
    EXPECT_EQ(drive.c_iz, 1);
}

TEST(tomography, extract_inverts_device_fields) {
    const auto h = effective_hamiltonian(default_device(), base(0.45, 1.1));
    const auto c = extract_coefficients(h.field(Control::Zero), h.field(Control::One));
    const Vector6d want(h.c_zx, h.c_zy, h.c_zz, h.c_ix, h.c_iy, h.c_iz);
    EXPECT_LT((c.as_vector() - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(tomography, covariance_propagation) {
    Matrix6d cov = Matrix6d::Zero();
    cov.diagonal() << 1, 2, 3, 4, 5, 6;
    const auto c = extract_coefficients(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), cov);
    // var(zx) = (var(w0x) + var(w1x)) / 4
    EXPECT_NEAR(c.covariance(0, 0), (1 + 4) / 4.0, 1e-15);
    EXPECT_NEAR(c.covariance(0, 3), (1 - 4) / 4.0, 1e-15);
    EXPECT_TRUE(c.covariance.isApprox(c.covariance.transpose()));
}

TEST(tomography, zero_drive_stays_at_ground) {
    DeviceConfig dev = default_device();
    const auto widths = default_width_grid(3.0, 40.0, 8);
    const auto data = run_tomography(dev, base(0.0, 0.0), widths, 20000, 8);
    for (Control c : {Control::Zero, Control::One}) {
        for (size_t i = 0; i < widths.size(); i++) {
            const auto &z = data.at(c, Basis::Z)[i];
            const auto &x = data.at(c, Basis::X)[i];
            EXPECT_NEAR(z.expectation, 1.0, 4 * z.stderr);
            EXPECT_NEAR(x.expectation, 0.0, 4 * x.stderr);
        }
    }
    EXPECT_TRUE(fit_bloch_trajectories(data).degenerate());
}

TEST(tomography, deterministic_and_thread_independent) {
    const DeviceConfig dev = default_device();
    const auto widths = default_width_grid(2.5, 40.0, 16);
    const auto a = run_tomography(dev, base(0.2, 0.4), widths, 4000, 77, 1);
    const auto b = run_tomography(dev, base(0.2, 0.4), widths, 4000, 77, 3);
    EXPECT_EQ(tomography_csv(a), tomography_csv(b));
    const auto c = run_tomography(dev, base(0.2, 0.4), widths, 4000, 78, 1);
    EXPECT_NE(tomography_csv(a), tomography_csv(c));
}

TEST(tomography, rejects_bad_sweeps) {
    const DeviceConfig dev = default_device();
    EXPECT_THROW(run_tomography(dev, base(0.2, 0.0), default_width_grid(2.5, 40.0, 7), 4000, 1), ValidationError);
    EXPECT_THROW(run_tomography(dev, base(0.2, 0.0), default_width_grid(2.5, 40.0, 16), 999, 1), ValidationError);
    auto widths = default_width_grid(2.5, 40.0, 16);
    std::swap(widths[3], widths[4]);
    EXPECT_THROW(run_tomography(dev, base(0.2, 0.0), widths, 4000, 1), ValidationError);
}

TEST(tomography, covariance_shrinks_with_shots) {
    const DeviceConfig dev = default_device();
    const auto widths = default_width_grid(2.5, 40.0, 16);
    const auto lo = extract_coefficients(fit_bloch_trajectories(run_tomography(dev, base(0.2, 0.4), widths, 10000, 5)));
    const auto hi = extract_coefficients(fit_bloch_trajectories(run_tomography(dev, base(0.2, 0.4), widths, 40000, 5)));
    for (int k = 0; k < 6; k++) {
        EXPECT_LT(hi.covariance(k, k), lo.covariance(k, k)) << k;
    }
}

TEST(tomography, closed_loop_recovers_device) {
    const DeviceConfig dev = default_device();
    const auto s = base(0.22, dev.phi_dev_cr);
    const auto truth = effective_hamiltonian(dev, s);
    const double rate = std::abs(truth.c_zx);
    const auto data = run_tomography(dev, s, default_width_grid(rate, 40.0, 16), 20000, 12);
    const auto c = extract_coefficients(fit_bloch_trajectories(data));
    EXPECT_NEAR(c.c_zx, truth.c_zx, 0.02 * std::abs(truth.c_zx));
    // Control |0> and |1> precess at different rates.
    const double w0 = truth.field(Control::Zero).norm();
    const double w1 = truth.field(Control::One).norm();
    ASSERT_GT(std::abs(w0 - w1), 0.05);
    const auto fit = fit_bloch_trajectories(data);
    EXPECT_NEAR(fit.control0.omega.norm(), w0, 0.02 * w0);
    EXPECT_NEAR(fit.control1.omega.norm(), w1, 0.02 * w1);
}

TEST(tomography, width_grid_spans_four_pi) {
    const auto g = default_width_grid(2.0, 40.0, 16);
    ASSERT_EQ(g.size(), 16u);
    EXPECT_EQ(g.front(), 0.0);
    const double t_end = (g.back() + edge_area_constant() * 40.0) / 1000.0;
    EXPECT_NEAR(2.0 * t_end, 4 * std::numbers::pi, 1e-9);
}

TEST(tomography, coefficients_json) {
    const auto c = extract_coefficients(Eigen::Vector3d(3, 1, 0), Eigen::Vector3d(-3, 1, 0));
    const auto j = to_json(c);
    EXPECT_EQ(j.at("units").get<std::string>(), "rad/us");
    EXPECT_EQ(j.at("c_zx").get<double>(), 3.0);
    EXPECT_EQ(j.at("c_iy").get<double>(), 1.0);
}
