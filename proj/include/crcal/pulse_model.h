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

#ifndef CRCAL_PULSE_MODEL_H
#define CRCAL_PULSE_MODEL_H

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace crcal {

// Units: time in ns, phases in rad, amplitudes dimensionless in [0, 1].

/// Gaussian edges are cut at this many rise-widths from the flat top.
inline constexpr double kEdgeTruncationInRise = 2.0;
inline constexpr double kDefaultSqPulseNs = 35.6;

/// Flat-top pulse with truncated Gaussian edges.
struct PulseParams {
    double amplitude = 0;
    double phase = 0;
    double width = 0;
    double rise = 1;

    double edge_support() const {
        return kEdgeTruncationInRise * rise;
    }
    double duration() const {
        return width + 2 * edge_support();
    }
    bool operator==(const PulseParams &) const = default;
};

/// Validating constructor; throws ValidationError naming the bad field.
PulseParams make_flat_top_gaussian(double amplitude, double phase, double width, double rise);

/// Area of the unit-amplitude envelope of one truncated Gaussian pair, in units of rise.
/// The edge is exp(-u^2/2) shifted and rescaled to hit zero at u = 2 and one at u = 0.
double edge_area_constant();

/// Normalized envelope value at time t (ns) measured from the pulse start. Zero outside.
double envelope(const PulseParams &p, double t_ns);

/// Integral of the envelope divided by amplitude: width + edge_area_constant() * rise.
double effective_area(const PulseParams &p);

struct ScheduleSegment {
    std::string channel;  // "control_drive", "cross_resonance", "target_drive"
    std::string kind;     // "cr", "echo_x", "cancel"
    double start_ns;
    double duration_ns;
    double amplitude;
    double phase;
};

/// Echoed cross-resonance sequence: CR(+) / X_c / CR(-) / X_c with optional
/// concurrent cancellation tones on the target. The CR pulse parameters describe the
/// pair as a whole; each half carries width/2 of flat top.
struct EchoedCrSchedule {
    PulseParams cr_pulse;
    std::optional<PulseParams> cancellation;
    bool echo = true;
    double phase_frame_shift = 0;
    double sq_pulse_ns = kDefaultSqPulseNs;

    double duration_ns() const;
    std::vector<ScheduleSegment> segments() const;

    /// Same schedule with the flat-top width of both tones replaced.
    EchoedCrSchedule with_width(double width) const;

    bool operator==(const EchoedCrSchedule &) const = default;
};

EchoedCrSchedule build_echoed_cr_schedule(
    const PulseParams &cr,
    const std::optional<PulseParams> &cancel,
    double frame_shift,
    double sq_pulse_ns = kDefaultSqPulseNs);

/// Virtual Z: adds `delta` to the frame of both tones.
EchoedCrSchedule shift_phase(const EchoedCrSchedule &s, double delta);

nlohmann::json to_json(const PulseParams &p);
nlohmann::json to_json(const EchoedCrSchedule &s);
PulseParams pulse_from_json(const nlohmann::json &j);
EchoedCrSchedule schedule_from_json(const nlohmann::json &j);

}  // namespace crcal

#endif
