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

#include "crcal/pulse_model.h"

#include <cmath>
#include <numbers>

#include "crcal/errors.h"

namespace crcal {

namespace {

double edge_shape(double u) {
    // u = distance from the flat top in units of rise, u in [0, 2].
    const double floor = std::exp(-0.5 * kEdgeTruncationInRise * kEdgeTruncationInRise);
    return (std::exp(-0.5 * u * u) - floor) / (1 - floor);
}

void check_finite(double v, const char *field) {
    if (!std::isfinite(v)) {
        throw ValidationError(std::string(field) + " must be finite");
    }
}

}  // namespace

PulseParams make_flat_top_gaussian(double amplitude, double phase, double width, double rise) {
    check_finite(amplitude, "amplitude");
    check_finite(phase, "phase");
    check_finite(width, "width");
    check_finite(rise, "rise");
    if (amplitude < 0 || amplitude > 1) {
        throw ValidationError("amplitude out of range [0, 1]: " + std::to_string(amplitude));
    }
    if (width < 0) {
        throw ValidationError("width must be non-negative: " + std::to_string(width));
    }
    if (rise <= 0) {
        throw ValidationError("rise must be positive: " + std::to_string(rise));
    }
    return PulseParams{amplitude, phase, width, rise};
}

double edge_area_constant() {
    const double c = kEdgeTruncationInRise;
    const double floor = std::exp(-0.5 * c * c);
    const double gauss = std::sqrt(std::numbers::pi / 2) * std::erf(c / std::numbers::sqrt2);
    return 2 * (gauss - c * floor) / (1 - floor);
}

double envelope(const PulseParams &p, double t_ns) {
    const double edge = p.edge_support();
    if (t_ns < 0 || t_ns > p.duration()) {
        return 0;
    }
    if (t_ns < edge) {
        return p.amplitude * edge_shape((edge - t_ns) / p.rise);
    }
    if (t_ns <= edge + p.width) {
        return p.amplitude;
    }
    return p.amplitude * edge_shape((t_ns - edge - p.width) / p.rise);
}

double effective_area(const PulseParams &p) {
    return p.width + edge_area_constant() * p.rise;
}

double EchoedCrSchedule::duration_ns() const {
    PulseParams half = cr_pulse;
    half.width /= 2;
    return 2 * half.duration() + (echo ? 2 * sq_pulse_ns : 0.0);
}

std::vector<ScheduleSegment> EchoedCrSchedule::segments() const {
    PulseParams half = cr_pulse;
    half.width /= 2;
    const double seg = half.duration();
    const double cr_phase = cr_pulse.phase + phase_frame_shift;
    std::vector<ScheduleSegment> out;
    double t = 0;
    for (int k = 0; k < 2; k++) {
        // Second half runs with the drive sign flipped, after the control is echoed.
        const double flip = k == 0 ? 0.0 : std::numbers::pi;
        out.push_back({"cross_resonance", "cr", t, seg, cr_pulse.amplitude, cr_phase + flip});
        if (cancellation) {
            out.push_back(
                {"target_drive",
                 "cancel",
                 t,
                 seg,
                 cancellation->amplitude,
                 cancellation->phase + phase_frame_shift + flip});
        }
        t += seg;
        if (echo) {
            out.push_back({"control_drive", "echo_x", t, sq_pulse_ns, 1.0, 0.0});
            t += sq_pulse_ns;
        }
    }
    return out;
}

EchoedCrSchedule EchoedCrSchedule::with_width(double width) const {
    EchoedCrSchedule s = *this;
    s.cr_pulse = make_flat_top_gaussian(cr_pulse.amplitude, cr_pulse.phase, width, cr_pulse.rise);
    if (s.cancellation) {
        s.cancellation = make_flat_top_gaussian(
            cancellation->amplitude, cancellation->phase, width, cancellation->rise);
    }
    return s;
}

EchoedCrSchedule build_echoed_cr_schedule(
    const PulseParams &cr, const std::optional<PulseParams> &cancel, double frame_shift, double sq_pulse_ns) {
    make_flat_top_gaussian(cr.amplitude, cr.phase, cr.width, cr.rise);
    if (cancel) {
        make_flat_top_gaussian(cancel->amplitude, cancel->phase, cancel->width, cancel->rise);
        if (cancel->width != cr.width) {
            throw ValidationError("cancellation width must equal cr width");
        }
        if (cancel->rise != cr.rise) {
            throw ValidationError("cancellation rise must equal cr rise");
        }
    }
    check_finite(frame_shift, "phase_frame_shift");
    if (!(sq_pulse_ns >= 0)) {
        throw ValidationError("sq_pulse_ns must be non-negative");
    }
    return EchoedCrSchedule{cr, cancel, true, frame_shift, sq_pulse_ns};
}

EchoedCrSchedule shift_phase(const EchoedCrSchedule &s, double delta) {
    EchoedCrSchedule out = s;
    out.phase_frame_shift += delta;
    return out;
}

nlohmann::json to_json(const PulseParams &p) {
    return {
        {"amplitude", p.amplitude},
        {"phase_rad", p.phase},
        {"width_ns", p.width},
        {"rise_ns", p.rise},
        {"duration_ns", p.duration()},
    };
}

nlohmann::json to_json(const EchoedCrSchedule &s) {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto &g : s.segments()) {
        segs.push_back({
            {"channel", g.channel},
            {"kind", g.kind},
            {"start_ns", g.start_ns},
            {"duration_ns", g.duration_ns},
            {"amplitude", g.amplitude},
            {"phase_rad", g.phase},
        });
    }
    return {
        {"cr_pulse", to_json(s.cr_pulse)},
        {"cancellation", s.cancellation ? to_json(*s.cancellation) : nlohmann::json(nullptr)},
        {"echo", s.echo},
        {"phase_frame_shift_rad", s.phase_frame_shift},
        {"sq_pulse_ns", s.sq_pulse_ns},
        {"duration_ns", s.duration_ns()},
        {"segments", segs},
    };
}

PulseParams pulse_from_json(const nlohmann::json &j) {
    return make_flat_top_gaussian(
        j.at("amplitude").get<double>(),
        j.at("phase_rad").get<double>(),
        j.at("width_ns").get<double>(),
        j.at("rise_ns").get<double>());
}

EchoedCrSchedule schedule_from_json(const nlohmann::json &j) {
    std::optional<PulseParams> cancel;
    if (j.contains("cancellation") && !j.at("cancellation").is_null()) {
        cancel = pulse_from_json(j.at("cancellation"));
    }
    return build_echoed_cr_schedule(
        pulse_from_json(j.at("cr_pulse")),
        cancel,
        j.at("phase_frame_shift_rad").get<double>(),
        j.value("sq_pulse_ns", kDefaultSqPulseNs));
}

}  // namespace crcal
