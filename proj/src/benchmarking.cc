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

#include "crcal/benchmarking.h"

#include <fmt/format.h>

#include <cmath>
#include <random>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "crcal/errors.h"
#include "crcal/io.h"
#include "crcal/seeding.h"
#include "crcal/virtual_device.h"

namespace crcal {

namespace {

using Density = Eigen::Matrix4cd;

void depolarize(Density &rho, double survival) {
    rho = survival * rho + (1 - survival) / 4 * Density::Identity();
}

Eigen::Vector4d sample_populations(const Eigen::Vector4d &probs, int64_t shots, std::mt19937_64 &rng) {
    Eigen::Vector4d counts = Eigen::Vector4d::Zero();
    int64_t remaining = shots;
    double mass = 1;
    for (int k = 0; k < 3 && remaining > 0; k++) {
        const double q = mass > 0 ? std::clamp(probs(k) / mass, 0.0, 1.0) : 0.0;
        std::binomial_distribution<int64_t> draw(remaining, q);
        const int64_t n = draw(rng);
        counts(k) = static_cast<double>(n);
        remaining -= n;
        mass -= probs(k);
    }
    counts(3) = static_cast<double>(remaining);
    return counts / static_cast<double>(shots);
}

Density propagate(const DeviceConfig &dev, const RbSequence &seq) {
    const auto &group = CliffordGroup::instance();
    const double clifford_survival = apply_depolarizing_survival(dev.p_depol_per_clifford, 1);
    const double pair_survival = apply_depolarizing_survival(dev.p_depol_per_cr_pulse, seq.pulses_per_pair);
    Density rho = Density::Zero();
    rho(0, 0) = 1;
    auto apply = [&](const Unitary4 &u) { rho = u * rho * u.adjoint(); };
    for (uint32_t c : seq.cliffords) {
        apply(group.element(c).unitary);
        depolarize(rho, clifford_survival);
        if (seq.interleaved()) {
            apply(seq.pair);
            depolarize(rho, pair_survival);
        }
    }
    apply(group.element(seq.inversion).unitary);
    depolarize(rho, clifford_survival);
    return rho;
}

struct DecayFunctor : Eigen::DenseFunctor<double> {
    explicit DecayFunctor(const std::vector<RbPoint> &points)
        : Eigen::DenseFunctor<double>(2, static_cast<int>(points.size())), points(points) {
    }

    int operator()(const InputType &x, ValueType &fvec) const {
        for (size_t i = 0; i < points.size(); i++) {
            const auto &p = points[i];
            fvec(i) = (x(0) * std::pow(x(1), p.m) + kRbAsymptote - p.p00) / p.stderr;
        }
        return 0;
    }

    int df(const InputType &x, JacobianType &fjac) const {
        for (size_t i = 0; i < points.size(); i++) {
            const auto &p = points[i];
            fjac(i, 0) = std::pow(x(1), p.m) / p.stderr;
            fjac(i, 1) = x(0) * p.m * std::pow(x(1), p.m - 1) / p.stderr;
        }
        return 0;
    }

    const std::vector<RbPoint> &points;
};

}  // namespace

void RbConfig::validate() const {
    if (m1 < 1 || delta < 1 || n_max < m1) {
        throw ValidationError("RB lengths need m1 >= 1, delta >= 1 and n_max >= m1");
    }
    if (n_seeds < 1 || shots < 1) {
        throw ValidationError("RB needs at least one seed and one shot");
    }
    if (interleave_pulses_custom < 0 || interleave_pulses_standard < 0) {
        throw ValidationError("interleave pulse counts must be non-negative");
    }
}

std::vector<int> RbConfig::lengths() const {
    validate();
    std::vector<int> out;
    for (int m = m1; m <= n_max; m += delta) {
        out.push_back(m);
    }
    return out;
}

nlohmann::json RbConfig::to_json() const {
    return {
        {"m1", m1},
        {"delta", delta},
        {"n_max", n_max},
        {"n_seeds", n_seeds},
        {"shots", shots},
        {"interleave_pulses_custom", interleave_pulses_custom},
        {"interleave_pulses_standard", interleave_pulses_standard},
    };
}

const char *name(RbVariant v) {
    switch (v) {
        case RbVariant::Reference: return "reference";
        case RbVariant::StandardInterleaved: return "standard_interleaved";
        case RbVariant::CustomInterleaved: return "custom_interleaved";
    }
    return "?";
}

std::vector<RbSequence> build_irb_sequences(
    const RbConfig &cfg, uint64_t master_seed, RbVariant variant, const TwoQubitGateSpec &gate) {
    const auto lengths = cfg.lengths();
    const auto &group = CliffordGroup::instance();
    TwoQubitGateSpec inverse = gate;
    inverse.theta = -gate.theta;
    const Unitary4 pair = unitary_of(inverse) * unitary_of(gate);
    int pulses = 0;
    if (variant == RbVariant::StandardInterleaved) {
        pulses = 2 * cfg.interleave_pulses_standard;
    } else if (variant == RbVariant::CustomInterleaved) {
        pulses = 2 * cfg.interleave_pulses_custom;
    }

    std::vector<RbSequence> out;
    for (size_t s = 0; s < static_cast<size_t>(cfg.n_seeds); s++) {
        std::mt19937_64 rng(derive_seed(master_seed, s));
        std::vector<uint32_t> draws(static_cast<size_t>(cfg.n_max));
        for (auto &d : draws) {
            d = group.sample(rng);
        }
        for (int m : lengths) {
            RbSequence seq;
            seq.variant = variant;
            seq.length = m;
            seq.seed_index = s;
            seq.cliffords.assign(draws.begin(), draws.begin() + m);
            uint32_t total = 0;
            for (uint32_t c : seq.cliffords) {
                total = group.compose(total, c);
            }
            seq.inversion = group.inverse(total);
            seq.pulses_per_pair = pulses;
            if (variant != RbVariant::Reference) {
                seq.pair = pair;
            }
            out.push_back(std::move(seq));
        }
    }
    return out;
}

double ideal_ground_population(const DeviceConfig &dev, const RbSequence &seq) {
    const Density rho = propagate(dev, seq);
    return std::clamp(rho(0, 0).real(), 0.0, 1.0);
}

double simulate_sequence(const DeviceConfig &dev, const RbSequence &seq, int64_t shots, uint64_t seed) {
    if (shots < 1) {
        throw ValidationError("shots must be positive");
    }
    const Density rho = propagate(dev, seq);

    Eigen::Vector4d probs = rho.diagonal().real().cwiseMax(0.0);
    probs /= probs.sum();
    const Eigen::Matrix4d confusion = dev.confusion_two_qubit();
    const Eigen::Vector4d observed_probs = confusion.transpose() * probs;
    std::mt19937_64 rng(seed);
    const Eigen::Vector4d observed = sample_populations(observed_probs, shots, rng);
    return mitigate_readout(observed, confusion)(0);
}

double DecayFit::model(double m) const {
    return a * std::pow(lam, m) + b_fixed;
}

DecayFit fit_decay(const std::vector<RbPoint> &points) {
    if (points.size() < 4) {
        throw ValidationError("decay fit needs at least 4 points");
    }
    bool signal = false;
    for (const auto &p : points) {
        if (!(p.p00 >= 0 && p.p00 <= 1)) {
            throw ValidationError("populations must lie in [0, 1]");
        }
        if (!(p.stderr > 0)) {
            throw ValidationError("decay fit needs positive standard errors");
        }
        signal = signal || p.p00 - kRbAsymptote > 3 * p.stderr;
    }
    if (!signal) {
        throw FitError("no decay signal: every point sits at the 0.25 asymptote within noise", {}, 0.0);
    }

    // Weighted log-linear seed.
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto &p : points) {
        const double y = std::max(p.p00 - kRbAsymptote, 1e-6);
        const double w = std::pow(y / p.stderr, 2);
        const double ly = std::log(y);
        sw += w;
        sx += w * p.m;
        sy += w * ly;
        sxx += w * p.m * p.m;
        sxy += w * p.m * ly;
    }
    const double denom = sw * sxx - sx * sx;
    const double slope = denom != 0 ? (sw * sxy - sx * sy) / denom : 0.0;
    const double intercept = (sy - slope * sx) / sw;
    Eigen::VectorXd x(2);
    x << std::exp(intercept), std::clamp(std::exp(slope), 1e-3, 1.5);

    DecayFunctor functor(points);
    Eigen::LevenbergMarquardt<DecayFunctor> lm(functor);
    lm.setMaxfev(400);
    lm.setXtol(1e-15);
    lm.setFtol(1e-15);
    lm.setGtol(1e-12);
    const auto status = lm.minimize(x);
    Eigen::VectorXd res(points.size());
    functor(x, res);
    if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters || !x.allFinite() || !(x(1) > 0)) {
        throw FitError("decay fit did not converge", {x(0), x(1)}, res.squaredNorm());
    }
    Eigen::MatrixXd jac(points.size(), 2);
    functor.df(x, jac);
    const Eigen::Matrix2d cov = (jac.transpose() * jac).inverse();

    DecayFit fit;
    fit.a = x(0);
    fit.lam = x(1);
    fit.residual = res.squaredNorm();
    fit.stderr_a = std::sqrt(std::max(cov(0, 0), 0.0));
    fit.stderr_lam = std::sqrt(std::max(cov(1, 1), 0.0));
    return fit;
}

InterleavedFidelity interleaved_fidelity(const DecayFit &ref, const DecayFit &interleaved) {
    if (!(ref.lam > 0)) {
        throw ValidationError("reference decay must have lam > 0");
    }
    if (!(interleaved.lam > 0)) {
        throw ValidationError("interleaved decay must have lam > 0");
    }
    InterleavedFidelity out;
    out.raw = std::sqrt(interleaved.lam / ref.lam);
    out.stderr = 0.5 * out.raw *
                 std::hypot(interleaved.stderr_lam / interleaved.lam, ref.stderr_lam / ref.lam);
    out.clamped = out.raw > 1;
    out.f = std::min(out.raw, 1.0);
    return out;
}

RbCurve run_rb_curve(
    const DeviceConfig &dev,
    const RbConfig &cfg,
    const TwoQubitGateSpec &gate,
    RbVariant variant,
    uint64_t seed,
    size_t threads) {
    const auto lengths = cfg.lengths();
    const auto sequences = build_irb_sequences(cfg, seed, variant, gate);
    const uint64_t sample_seed = derive_seed(seed, 1000 + static_cast<uint64_t>(variant));
    std::vector<double> values(sequences.size());
    parallel_for(sequences.size(), threads, [&](size_t i) {
        values[i] = simulate_sequence(dev, sequences[i], cfg.shots, derive_seed(sample_seed, i));
    });

    RbCurve curve;
    curve.variant = variant;
    const size_t n_seeds = static_cast<size_t>(cfg.n_seeds);
    curve.populations.assign(lengths.size(), std::vector<double>(n_seeds));
    for (size_t i = 0; i < sequences.size(); i++) {
        curve.populations[i % lengths.size()][sequences[i].seed_index] = values[i];
    }
    for (size_t k = 0; k < lengths.size(); k++) {
        const auto &v = curve.populations[k];
        double mean = 0;
        for (double p : v) {
            mean += p;
        }
        mean /= static_cast<double>(n_seeds);
        double var = 0;
        for (double p : v) {
            var += (p - mean) * (p - mean);
        }
        const double sd = n_seeds > 1 ? std::sqrt(var / static_cast<double>(n_seeds - 1)) : 0.0;
        // Floor at the binomial error so a perfectly flat curve still carries weight.
        const double shots = static_cast<double>(cfg.shots);
        const double binomial =
            std::sqrt(std::max(mean * (1 - mean), 1 / shots) / (shots * static_cast<double>(n_seeds)));
        const double se = std::max(sd / std::sqrt(static_cast<double>(n_seeds)), binomial);
        curve.points.push_back({lengths[k], mean, se});
        curve.spread.push_back(sd);
    }
    curve.fit = fit_decay(curve.points);
    return curve;
}

IrbResult run_irb(
    const DeviceConfig &dev, const TwoQubitGateSpec &gate, const RbConfig &cfg, uint64_t seed, size_t threads) {
    IrbResult r;
    r.gate = gate.label();
    r.reference = run_rb_curve(dev, cfg, gate, RbVariant::Reference, seed, threads);
    r.standard = run_rb_curve(dev, cfg, gate, RbVariant::StandardInterleaved, seed, threads);
    r.custom = run_rb_curve(dev, cfg, gate, RbVariant::CustomInterleaved, seed, threads);
    r.f_standard = interleaved_fidelity(r.reference.fit, r.standard.fit);
    r.f_custom = interleaved_fidelity(r.reference.fit, r.custom.fit);
    return r;
}

std::string rb_csv(const IrbResult &r) {
    std::string out = "m,variant,mean_p00,std_p00,stderr_p00,fit_p00\n";
    for (const RbCurve *c : {&r.reference, &r.standard, &r.custom}) {
        for (size_t k = 0; k < c->points.size(); k++) {
            const auto &p = c->points[k];
            out += fmt::format(
                "{},{},{},{},{},{}\n",
                p.m,
                name(c->variant),
                fmt9(p.p00),
                fmt9(c->spread[k]),
                fmt9(p.stderr),
                fmt9(c->fit.model(p.m)));
        }
    }
    return out;
}

nlohmann::json to_json(const DecayFit &f) {
    return {
        {"a", f.a},
        {"lam", f.lam},
        {"b_fixed", f.b_fixed},
        {"residual", f.residual},
        {"stderr_lam", f.stderr_lam},
        {"stderr_a", f.stderr_a},
    };
}

nlohmann::json to_json(const IrbResult &r) {
    auto fidelity = [](const InterleavedFidelity &f) {
        return nlohmann::json{{"value", f.f}, {"stderr", f.stderr}, {"raw", f.raw}, {"clamped", f.clamped}};
    };
    return {
        {"gate", r.gate},
        {"F_standard", fidelity(r.f_standard)},
        {"F_custom", fidelity(r.f_custom)},
        {"custom_at_least_standard", r.f_custom.f >= r.f_standard.f},
        {"fits",
         {{"reference", to_json(r.reference.fit)},
          {"standard_interleaved", to_json(r.standard.fit)},
          {"custom_interleaved", to_json(r.custom.fit)}}},
    };
}

}  // namespace crcal
