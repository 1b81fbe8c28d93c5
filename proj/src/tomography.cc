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

#include <fmt/format.h>

#include <algorithm>
#include <complex>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "crcal/errors.h"
#include "crcal/io.h"
#include "crcal/seeding.h"

namespace crcal {

namespace {

constexpr double kSmallAngle = 1e-3;
constexpr int kMaxFunctionEvaluations = 200;
constexpr double kGradientTolerance = 1e-10;
constexpr size_t kPeriodogramPoints = 2000;
constexpr size_t kRefinePoints = 200;

struct TrajectoryFunctor : Eigen::DenseFunctor<double> {
    explicit TrajectoryFunctor(const std::vector<TrajectorySample> &samples)
        : Eigen::DenseFunctor<double>(3, static_cast<int>(samples.size())), samples(samples) {
    }

    int operator()(const InputType &x, ValueType &fvec) const {
        for (size_t i = 0; i < samples.size(); i++) {
            const auto &s = samples[i];
            const Eigen::Vector3d r = trajectory_model(x, s.t_us);
            fvec(i) = (r(static_cast<int>(s.basis)) - s.value) / s.stderr;
        }
        return 0;
    }

    int df(const InputType &x, JacobianType &fjac) const {
        for (size_t i = 0; i < samples.size(); i++) {
            const auto &s = samples[i];
            fjac.row(i) = trajectory_jacobian(x, s.t_us).row(static_cast<int>(s.basis)) / s.stderr;
        }
        return 0;
    }

    const std::vector<TrajectorySample> &samples;
};

/// Weighted 2-parameter linear least squares v ~ p * u1 + q * u2.
Eigen::Vector2d solve2(
    const std::vector<double> &u1, const std::vector<double> &u2, const std::vector<double> &v, const std::vector<double> &w) {
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
    for (size_t i = 0; i < v.size(); i++) {
        a(0, 0) += w[i] * u1[i] * u1[i];
        a(0, 1) += w[i] * u1[i] * u2[i];
        a(1, 1) += w[i] * u2[i] * u2[i];
        b(0) += w[i] * u1[i] * v[i];
        b(1) += w[i] * u2[i] * v[i];
    }
    a(1, 0) = a(0, 1);
    return a.completeOrthogonalDecomposition().solve(b);
}

struct LinearProjection {
    Eigen::Vector3d axis;
    double residual;
};

/// At fixed frequency the trajectory is linear in (n x z) and n_z * n:
///   r(t) = cos(wt) z + sin(wt) (n_y, -n_x, 0) + (1 - cos(wt)) n_z n.
LinearProjection project_axis(const std::vector<TrajectorySample> &samples, double freq) {
    std::array<std::vector<double>, 3> s, one_minus_c, c, v, w;
    for (const auto &p : samples) {
        const int k = static_cast<int>(p.basis);
        const double ct = std::cos(freq * p.t_us);
        s[k].push_back(std::sin(freq * p.t_us));
        c[k].push_back(ct);
        one_minus_c[k].push_back(1 - ct);
        v[k].push_back(p.value);
        w[k].push_back(1 / (p.stderr * p.stderr));
    }
    const Eigen::Vector2d fx = v[0].empty() ? Eigen::Vector2d::Zero() : solve2(s[0], one_minus_c[0], v[0], w[0]);
    const Eigen::Vector2d fy = v[1].empty() ? Eigen::Vector2d::Zero() : solve2(s[1], one_minus_c[1], v[1], w[1]);
    double bz_num = 0;
    double bz_den = 0;
    for (size_t i = 0; i < v[2].size(); i++) {
        bz_num += w[2][i] * one_minus_c[2][i] * (v[2][i] - c[2][i]);
        bz_den += w[2][i] * one_minus_c[2][i] * one_minus_c[2][i];
    }
    const double bz = bz_den > 0 ? bz_num / bz_den : 0.0;

    double residual = 0;
    for (size_t i = 0; i < v[0].size(); i++) {
        residual += w[0][i] * std::pow(v[0][i] - fx(0) * s[0][i] - fx(1) * one_minus_c[0][i], 2);
    }
    for (size_t i = 0; i < v[1].size(); i++) {
        residual += w[1][i] * std::pow(v[1][i] - fy(0) * s[1][i] - fy(1) * one_minus_c[1][i], 2);
    }
    for (size_t i = 0; i < v[2].size(); i++) {
        residual += w[2][i] * std::pow(v[2][i] - c[2][i] - bz * one_minus_c[2][i], 2);
    }

    const double nx = -fy(0);
    const double ny = fx(0);
    const double perp2 = nx * nx + ny * ny;
    const double proj = fx(1) * nx + fy(1) * ny;  // = n_z * perp2 for exact data
    double nz;
    if (perp2 > 0.05) {
        nz = proj / perp2;
    } else {
        nz = (proj < 0 ? -1.0 : 1.0) * std::sqrt(std::max(bz, 0.0));
    }
    Eigen::Vector3d axis(nx, ny, nz);
    if (axis.norm() < 1e-12) {
        axis = Eigen::Vector3d::UnitX();
    }
    return {axis.normalized(), residual};
}

/// Dominant angular frequency of the mean-subtracted series, by direct periodogram.
double periodogram_peak(const std::vector<TrajectorySample> &samples, double lo, double hi) {
    std::array<double, 3> mean{0, 0, 0};
    std::array<int, 3> count{0, 0, 0};
    for (const auto &p : samples) {
        mean[static_cast<int>(p.basis)] += p.value;
        count[static_cast<int>(p.basis)]++;
    }
    for (int k = 0; k < 3; k++) {
        mean[k] = count[k] ? mean[k] / count[k] : 0.0;
    }
    double best_freq = lo;
    double best_power = -1;
    for (size_t j = 0; j < kPeriodogramPoints; j++) {
        const double freq = lo + (hi - lo) * static_cast<double>(j) / (kPeriodogramPoints - 1);
        std::array<std::complex<double>, 3> acc{};
        for (const auto &p : samples) {
            const int k = static_cast<int>(p.basis);
            acc[k] += (p.value - mean[k]) * std::polar(1.0, -freq * p.t_us);
        }
        const double power = std::norm(acc[0]) + std::norm(acc[1]) + std::norm(acc[2]);
        if (power > best_power) {
            best_power = power;
            best_freq = freq;
        }
    }
    return best_freq;
}

}  // namespace

double TomographyData::time_us(double width) const {
    return (width + edge_area_constant() * rise_ns) / 1000.0;
}

void TomographyData::validate() const {
    if (widths.size() < kMinTomographyWidths) {
        throw ValidationError(
            fmt::format("tomography needs at least {} widths, got {}", kMinTomographyWidths, widths.size()));
    }
    for (size_t i = 1; i < widths.size(); i++) {
        if (!(widths[i] > widths[i - 1])) {
            throw ValidationError("tomography widths must be strictly increasing");
        }
    }
    for (const auto &per_control : series) {
        for (const auto &points : per_control) {
            if (points.size() != widths.size()) {
                throw ValidationError("every tomography series must use the same width grid");
            }
            for (size_t i = 0; i < points.size(); i++) {
                if (points[i].width != widths[i]) {
                    throw ValidationError("every tomography series must use the same width grid");
                }
                if (!(std::abs(points[i].expectation) <= 1)) {
                    throw ValidationError("tomography expectation values must lie in [-1, 1]");
                }
            }
        }
    }
}

Matrix6d TrajectoryFit::covariance() const {
    Matrix6d c = Matrix6d::Zero();
    c.topLeftCorner<3, 3>() = control0.covariance;
    c.bottomRightCorner<3, 3>() = control1.covariance;
    return c;
}

Vector6d HamiltonianCoefficients::as_vector() const {
    Vector6d v;
    v << c_zx, c_zy, c_zz, c_ix, c_iy, c_iz;
    return v;
}

double HamiltonianCoefficients::sigma(int index) const {
    return std::sqrt(std::max(0.0, covariance(index, index)));
}

EffectiveHamiltonian HamiltonianCoefficients::as_hamiltonian() const {
    return EffectiveHamiltonian{c_zx, c_zy, c_zz, c_ix, c_iy, c_iz};
}

TomographyData run_tomography(
    const DeviceConfig &dev,
    const EchoedCrSchedule &base,
    const std::vector<double> &widths,
    int64_t shots,
    uint64_t seed,
    size_t threads) {
    if (widths.size() < kMinTomographyWidths) {
        throw ValidationError(
            fmt::format("tomography needs at least {} widths, got {}", kMinTomographyWidths, widths.size()));
    }
    if (shots < kMinTomographyShots) {
        throw ValidationError(fmt::format("tomography needs at least {} shots per point", kMinTomographyShots));
    }
    TomographyData data;
    data.widths = widths;
    data.rise_ns = base.cr_pulse.rise;
    data.shots_per_point = shots;
    for (auto &per_control : data.series) {
        for (auto &points : per_control) {
            points.resize(widths.size());
        }
    }

    const size_t cells = widths.size() * 6;
    parallel_for(cells, threads, [&](size_t cell) {
        const size_t wi = cell / 6;
        const auto control = static_cast<Control>((cell % 6) / 3);
        const auto basis = static_cast<Basis>(cell % 3);
        const EchoedCrSchedule s = base.with_width(widths[wi]);
        const Counts counts = sample_measurement(dev, s, control, basis, shots, derive_seed(seed, cell));
        const auto m = mitigate_counts(counts, dev.confusion_target);
        data.at(control, basis)[wi] =
            TomographyPoint{widths[wi], shots, counts.n1, m.p1, 1 - 2 * m.p1, 2 * m.stderr_p1};
    });
    data.validate();
    return data;
}

Eigen::Vector3d trajectory_model(const Eigen::Vector3d &omega, double t) {
    const double w = omega.norm();
    const double angle = w * t;
    double f2, f3;
    if (angle < kSmallAngle) {
        const double a2 = angle * angle;
        f2 = t * (1 - a2 / 6 + a2 * a2 / 120);
        f3 = t * t * (0.5 - a2 / 24 + a2 * a2 / 720);
    } else {
        f2 = std::sin(angle) / w;
        f3 = (1 - std::cos(angle)) / (w * w);
    }
    const Eigen::Vector3d cross(omega.y(), -omega.x(), 0);
    return std::cos(angle) * Eigen::Vector3d::UnitZ() + f2 * cross + f3 * omega.z() * omega;
}

Eigen::Matrix3d trajectory_jacobian(const Eigen::Vector3d &omega, double t) {
    const double w = omega.norm();
    const double angle = w * t;
    double f2, f3, g2, g3;
    if (angle < kSmallAngle) {
        const double a2 = angle * angle;
        f2 = t * (1 - a2 / 6 + a2 * a2 / 120);
        f3 = t * t * (0.5 - a2 / 24 + a2 * a2 / 720);
        g2 = -t * t * t * (1.0 / 3 - a2 / 30);
        g3 = -t * t * t * t * (1.0 / 12 - a2 / 180);
    } else {
        const double c = std::cos(angle);
        f2 = std::sin(angle) / w;
        f3 = (1 - c) / (w * w);
        g2 = (t * c - f2) / (w * w);
        g3 = (t * f2 - 2 * f3) / (w * w);
    }
    const Eigen::Vector3d cross(omega.y(), -omega.x(), 0);
    const std::array<Eigen::Vector3d, 3> dcross{
        Eigen::Vector3d(0, -1, 0), Eigen::Vector3d(1, 0, 0), Eigen::Vector3d::Zero()};
    Eigen::Matrix3d j;
    for (int k = 0; k < 3; k++) {
        Eigen::Vector3d col = -t * f2 * omega(k) * Eigen::Vector3d::UnitZ();
        col += g2 * omega(k) * cross + f2 * dcross[k];
        col += g3 * omega(k) * omega.z() * omega;
        col += f3 * omega.z() * Eigen::Vector3d::Unit(k);
        if (k == 2) {
            col += f3 * omega;
        }
        j.col(k) = col;
    }
    return j;
}

FieldFit fit_precession_field(const std::vector<TrajectorySample> &samples) {
    if (samples.size() < 4) {
        throw ValidationError("need at least 4 samples to fit a precession field");
    }
    for (const auto &s : samples) {
        if (!(s.stderr > 0) || !std::isfinite(s.value) || !(s.t_us >= 0)) {
            throw ValidationError("trajectory samples need finite values, positive stderr and t >= 0");
        }
    }

    std::vector<double> times;
    double max_dev = 0;
    for (const auto &s : samples) {
        times.push_back(s.t_us);
        max_dev = std::max(max_dev, s.basis == Basis::Z ? 1 - s.value : std::abs(s.value));
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    const double t_max = times.back();

    FieldFit out;
    if (max_dev < kDegenerateAngle || times.size() < 2) {
        out.degenerate = true;
        return out;
    }

    std::vector<double> gaps;
    for (size_t i = 1; i < times.size(); i++) {
        gaps.push_back(times[i] - times[i - 1]);
    }
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    const double dt = gaps[gaps.size() / 2];
    const double span = times.back() - times.front();
    const double bin = 2 * std::numbers::pi / span;
    const double nyquist = std::numbers::pi / dt;

    // Seed: periodogram peak, refined by scanning the linear-projection residual.
    const double peak = periodogram_peak(samples, bin / 4, nyquist);
    double best_freq = peak;
    double best_residual = INFINITY;
    const double lo = std::max(bin / 8, peak - 2 * bin);
    const double hi = std::min(nyquist, peak + 2 * bin);
    for (size_t j = 0; j < kRefinePoints; j++) {
        const double freq = lo + (hi - lo) * static_cast<double>(j) / (kRefinePoints - 1);
        const double r = project_axis(samples, freq).residual;
        if (r < best_residual) {
            best_residual = r;
            best_freq = freq;
        }
    }
    Eigen::VectorXd x = best_freq * project_axis(samples, best_freq).axis;

    TrajectoryFunctor functor(samples);
    Eigen::LevenbergMarquardt<TrajectoryFunctor> lm(functor);
    lm.setMaxfev(kMaxFunctionEvaluations);
    lm.setGtol(kGradientTolerance);
    lm.setXtol(1e-14);
    lm.setFtol(1e-14);
    const auto status = lm.minimize(x);

    Eigen::VectorXd residuals(samples.size());
    functor(x, residuals);
    const double chi2 = residuals.squaredNorm();
    if (status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation ||
        status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters || !x.allFinite()) {
        throw FitError(
            fmt::format("precession fit did not converge (status {})", static_cast<int>(status)),
            {x(0), x(1), x(2)},
            chi2);
    }

    Eigen::MatrixXd jac(samples.size(), 3);
    functor.df(x, jac);
    const Eigen::Matrix3d info = jac.transpose() * jac;
    out.omega = x;
    out.covariance = info.completeOrthogonalDecomposition().pseudoInverse();
    out.covariance = (out.covariance + out.covariance.transpose()) / 2;
    out.chi2_per_dof = samples.size() > 3 ? chi2 / static_cast<double>(samples.size() - 3) : 0.0;
    out.iterations = static_cast<int>(lm.iterations());
    if (out.omega.norm() * t_max < kDegenerateAngle) {
        out.degenerate = true;
    }
    return out;
}

TrajectoryFit fit_bloch_trajectories(const TomographyData &data) {
    data.validate();
    TrajectoryFit fit;
    for (int c = 0; c < 2; c++) {
        std::vector<TrajectorySample> samples;
        for (int b = 0; b < 3; b++) {
            for (const auto &p : data.series[c][b]) {
                samples.push_back({data.time_us(p.width), static_cast<Basis>(b), p.expectation, p.stderr});
            }
        }
        (c == 0 ? fit.control0 : fit.control1) = fit_precession_field(samples);
    }
    return fit;
}

HamiltonianCoefficients extract_coefficients(
    const Eigen::Vector3d &omega0, const Eigen::Vector3d &omega1, const Matrix6d &covariance) {
    Matrix6d m = Matrix6d::Zero();
    m.topLeftCorner<3, 3>() = 0.5 * Eigen::Matrix3d::Identity();
    m.topRightCorner<3, 3>() = -0.5 * Eigen::Matrix3d::Identity();
    m.bottomLeftCorner<3, 3>() = 0.5 * Eigen::Matrix3d::Identity();
    m.bottomRightCorner<3, 3>() = 0.5 * Eigen::Matrix3d::Identity();
    Vector6d omegas;
    omegas << omega0, omega1;
    const Vector6d c = m * omegas;

    HamiltonianCoefficients out;
    out.c_zx = c(0);
    out.c_zy = c(1);
    out.c_zz = c(2);
    out.c_ix = c(3);
    out.c_iy = c(4);
    out.c_iz = c(5);
    out.covariance = m * covariance * m.transpose();
    return out;
}

HamiltonianCoefficients extract_coefficients(const TrajectoryFit &fit) {
    auto out = extract_coefficients(fit.control0.omega, fit.control1.omega, fit.covariance());
    out.degenerate = fit.degenerate();
    return out;
}

std::vector<double> default_width_grid(double rate_rad_per_us, double rise_ns, size_t n) {
    if (!(rate_rad_per_us > 0)) {
        throw ValidationError("width grid needs a positive rotation rate");
    }
    if (n < kMinTomographyWidths) {
        throw ValidationError(fmt::format("width grid needs at least {} points", kMinTomographyWidths));
    }
    const double t_needed = 4 * std::numbers::pi / rate_rad_per_us;
    const double w_max = std::max(1000 * t_needed - edge_area_constant() * rise_ns, 10.0 * (n - 1));
    std::vector<double> widths(n);
    for (size_t i = 0; i < n; i++) {
        widths[i] = w_max * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return widths;
}

std::string tomography_csv(const TomographyData &data) {
    std::string out = "width_ns,control,basis,shots,n1,p1,expectation,stderr\n";
    for (int c = 0; c < 2; c++) {
        for (int b = 0; b < 3; b++) {
            for (const auto &p : data.series[c][b]) {
                out += fmt::format(
                    "{},{},{},{},{},{},{},{}\n",
                    fmt9(p.width),
                    c,
                    name(static_cast<Basis>(b)),
                    p.shots,
                    p.n1,
                    fmt9(p.p1),
                    fmt9(p.expectation),
                    fmt9(p.stderr));
            }
        }
    }
    return out;
}

nlohmann::json to_json(const HamiltonianCoefficients &c) {
    static const char *names[] = {"c_zx", "c_zy", "c_zz", "c_ix", "c_iy", "c_iz"};
    nlohmann::json j;
    j["units"] = "rad/us";
    const Vector6d v = c.as_vector();
    nlohmann::json cov = nlohmann::json::array();
    for (int i = 0; i < 6; i++) {
        j[names[i]] = v(i);
        j[std::string("sigma_") + (names[i] + 2)] = c.sigma(i);
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < 6; k++) {
            row.push_back(c.covariance(i, k));
        }
        cov.push_back(row);
    }
    j["covariance"] = cov;
    j["degenerate"] = c.degenerate;
    return j;
}

}  // namespace crcal
