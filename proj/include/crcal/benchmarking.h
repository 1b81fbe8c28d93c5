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

#ifndef CRCAL_BENCHMARKING_H
#define CRCAL_BENCHMARKING_H

#include <cstdint>
#include <string>
#include <vector>

#include "crcal/clifford.h"
#include "crcal/device.h"
#include "crcal/gate_synthesis.h"
#include "json.hpp"

namespace crcal {

inline constexpr double kRbAsymptote = 0.25;

struct RbConfig {
    int m1 = 5;
    int delta = 7;
    int n_max = 68;
    int n_seeds = 10;
    int64_t shots = 20000;
    /// CR pulses per interleaved gate; the ZX(theta) ZX(-theta) pair carries twice this.
    int interleave_pulses_custom = 2;
    int interleave_pulses_standard = 4;

    void validate() const;
    std::vector<int> lengths() const;
    nlohmann::json to_json() const;
};

enum class RbVariant { Reference, StandardInterleaved, CustomInterleaved };
const char *name(RbVariant v);

struct RbSequence {
    RbVariant variant = RbVariant::Reference;
    int length = 0;
    size_t seed_index = 0;
    std::vector<uint32_t> cliffords;
    uint32_t inversion = 0;
    /// Zero for the reference variant.
    int pulses_per_pair = 0;
    Unitary4 pair = Unitary4::Identity();

    bool interleaved() const {
        return variant != RbVariant::Reference;
    }
};

/// Clifford draws depend only on (master_seed, seed index), so all variants share them.
std::vector<RbSequence> build_irb_sequences(
    const RbConfig &cfg, uint64_t master_seed, RbVariant variant, const TwoQubitGateSpec &gate);

/// Exact |00> population before readout.
double ideal_ground_population(const DeviceConfig &dev, const RbSequence &seq);
/// Sampled and readout-mitigated |00> population.
double simulate_sequence(const DeviceConfig &dev, const RbSequence &seq, int64_t shots, uint64_t seed);

struct RbPoint {
    int m = 0;
    double p00 = 0;
    double stderr = 0;
};

struct DecayFit {
    double a = 0;
    double lam = 0;
    double b_fixed = kRbAsymptote;
    /// Weighted sum of squared residuals.
    double residual = 0;
    double stderr_lam = 0;
    double stderr_a = 0;

    double model(double m) const;
};

DecayFit fit_decay(const std::vector<RbPoint> &points);

struct InterleavedFidelity {
    double f = 1;
    double stderr = 0;
    double raw = 1;
    bool clamped = false;
};

InterleavedFidelity interleaved_fidelity(const DecayFit &ref, const DecayFit &interleaved);

struct RbCurve {
    RbVariant variant = RbVariant::Reference;
    std::vector<RbPoint> points;
    std::vector<double> spread;
    /// populations[i][s] for length index i and seed index s.
    std::vector<std::vector<double>> populations;
    DecayFit fit;
};

struct IrbResult {
    std::string gate;
    RbCurve reference;
    RbCurve standard;
    RbCurve custom;
    InterleavedFidelity f_standard;
    InterleavedFidelity f_custom;
};

RbCurve run_rb_curve(
    const DeviceConfig &dev,
    const RbConfig &cfg,
    const TwoQubitGateSpec &gate,
    RbVariant variant,
    uint64_t seed,
    size_t threads = 1);

IrbResult run_irb(
    const DeviceConfig &dev, const TwoQubitGateSpec &gate, const RbConfig &cfg, uint64_t seed, size_t threads = 1);

std::string rb_csv(const IrbResult &r);
nlohmann::json to_json(const DecayFit &f);
nlohmann::json to_json(const IrbResult &r);

}  // namespace crcal

#endif
