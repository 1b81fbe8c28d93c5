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

#include "crcal/device.h"

#include <cmath>
#include <fstream>
#include <set>

#include "crcal/errors.h"

namespace crcal {

namespace {

void check_confusion(const Eigen::Matrix2d &m, const char *name) {
    for (int r = 0; r < 2; r++) {
        double total = 0;
        for (int c = 0; c < 2; c++) {
            if (!(m(r, c) >= 0 && m(r, c) <= 1)) {
                throw ValidationError(std::string(name) + " entries must lie in [0, 1]");
            }
            total += m(r, c);
        }
        if (std::abs(total - 1) > 1e-9) {
            throw ValidationError(std::string(name) + " rows must sum to 1");
        }
    }
}

Eigen::Matrix2d confusion_from_json(const nlohmann::json &j, const char *name) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array() || j[0].size() != 2 ||
        j[1].size() != 2) {
        throw ValidationError(std::string(name) + " must be a 2x2 array");
    }
    Eigen::Matrix2d m;
    for (int r = 0; r < 2; r++) {
        for (int c = 0; c < 2; c++) {
            m(r, c) = j[r][c].get<double>();
        }
    }
    return m;
}

nlohmann::json confusion_to_json(const Eigen::Matrix2d &m) {
    return {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}};
}

void reject_unknown(const nlohmann::json &j, const std::set<std::string> &known, const std::string &where) {
    for (const auto &[key, value] : j.items()) {
        if (!known.count(key)) {
            throw ValidationError("unknown field '" + key + "' in " + where);
        }
    }
}

}  // namespace

void DeviceConfig::validate() const {
    for (double v : {phi_dev_cr, phi_dev_cancel, g1, g3, eps_ix, eps_iy, eps_iz, eps_zz, kappa_c}) {
        if (!std::isfinite(v)) {
            throw ValidationError("device couplings must be finite");
        }
    }
    if (!(g1 > 0)) {
        throw ValidationError("g1 must be positive");
    }
    check_confusion(confusion_control, "confusion_control");
    check_confusion(confusion_target, "confusion_target");
    if (!(p_depol_per_cr_pulse >= 0 && p_depol_per_cr_pulse < 1)) {
        throw ValidationError("p_depol_per_cr_pulse must lie in [0, 1)");
    }
    if (!(p_depol_per_clifford >= 0 && p_depol_per_clifford < 1)) {
        throw ValidationError("p_depol_per_clifford must lie in [0, 1)");
    }
    if (!(sq_pulse_ns >= 0)) {
        throw ValidationError("sq_pulse_ns must be non-negative");
    }
    if (!(cr_width_ns >= 0)) {
        throw ValidationError("cr_width_ns must be non-negative");
    }
    if (!(cr_rise_ns > 0)) {
        throw ValidationError("cr_rise_ns must be positive");
    }
    if (!(cancel_amplitude_hint > 0 && cancel_amplitude_hint <= 1)) {
        throw ValidationError("cancel_amplitude_hint must lie in (0, 1]");
    }
}

Eigen::Matrix4d DeviceConfig::confusion_two_qubit() const {
    Eigen::Matrix4d m;
    for (int tc = 0; tc < 2; tc++) {
        for (int tt = 0; tt < 2; tt++) {
            for (int oc = 0; oc < 2; oc++) {
                for (int ot = 0; ot < 2; ot++) {
                    m(2 * tc + tt, 2 * oc + ot) = confusion_control(tc, oc) * confusion_target(tt, ot);
                }
            }
        }
    }
    return m;
}

DeviceConfig default_device() {
    return DeviceConfig{};
}

DeviceConfig device_from_json(const nlohmann::json &j) {
    if (!j.is_object()) {
        throw ValidationError("device config must be a JSON object");
    }
    if (!j.contains("schema_version")) {
        throw ValidationError("device config is missing schema_version");
    }
    if (j.at("schema_version").get<int>() != kDeviceSchemaVersion) {
        throw ValidationError(
            "unsupported device schema_version " + j.at("schema_version").dump() + " (expected " +
            std::to_string(kDeviceSchemaVersion) + ")");
    }
    reject_unknown(
        j,
        {"schema_version",
         "phi_dev_cr",
         "phi_dev_cancel",
         "g1",
         "g3",
         "eps_ix",
         "eps_iy",
         "eps_iz",
         "eps_zz",
         "kappa_c",
         "readout_confusion",
         "p_depol_per_cr_pulse",
         "p_depol_per_clifford",
         "sq_pulse_ns",
         "cr_width_ns",
         "cr_rise_ns",
         "cancel_amplitude_hint",
         "metadata"},
        "device config");

    DeviceConfig d;
    try {
        d.phi_dev_cr = j.at("phi_dev_cr").get<double>();
        d.phi_dev_cancel = j.at("phi_dev_cancel").get<double>();
        d.g1 = j.at("g1").get<double>();
        d.g3 = j.at("g3").get<double>();
        d.eps_ix = j.at("eps_ix").get<double>();
        d.eps_iy = j.at("eps_iy").get<double>();
        d.eps_iz = j.at("eps_iz").get<double>();
        d.eps_zz = j.at("eps_zz").get<double>();
        d.kappa_c = j.at("kappa_c").get<double>();
        const auto &ro = j.at("readout_confusion");
        reject_unknown(ro, {"control", "target"}, "readout_confusion");
        d.confusion_control = confusion_from_json(ro.at("control"), "readout_confusion.control");
        d.confusion_target = confusion_from_json(ro.at("target"), "readout_confusion.target");
        d.p_depol_per_cr_pulse = j.at("p_depol_per_cr_pulse").get<double>();
        d.p_depol_per_clifford = j.value("p_depol_per_clifford", d.p_depol_per_clifford);
        d.sq_pulse_ns = j.value("sq_pulse_ns", d.sq_pulse_ns);
        d.cr_width_ns = j.at("cr_width_ns").get<double>();
        d.cr_rise_ns = j.at("cr_rise_ns").get<double>();
        d.cancel_amplitude_hint = j.at("cancel_amplitude_hint").get<double>();
        if (j.contains("metadata")) {
            const auto &m = j.at("metadata");
            reject_unknown(
                m,
                {"control_freq_ghz", "control_anharmonicity_ghz", "target_freq_ghz", "target_anharmonicity_ghz"},
                "metadata");
            d.metadata.control_freq_ghz = m.value("control_freq_ghz", d.metadata.control_freq_ghz);
            d.metadata.control_anharmonicity_ghz =
                m.value("control_anharmonicity_ghz", d.metadata.control_anharmonicity_ghz);
            d.metadata.target_freq_ghz = m.value("target_freq_ghz", d.metadata.target_freq_ghz);
            d.metadata.target_anharmonicity_ghz =
                m.value("target_anharmonicity_ghz", d.metadata.target_anharmonicity_ghz);
        }
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("device config schema error: ") + e.what());
    }
    d.validate();
    return d;
}

nlohmann::json to_json(const DeviceConfig &d) {
    return {
        {"schema_version", kDeviceSchemaVersion},
        {"phi_dev_cr", d.phi_dev_cr},
        {"phi_dev_cancel", d.phi_dev_cancel},
        {"g1", d.g1},
        {"g3", d.g3},
        {"eps_ix", d.eps_ix},
        {"eps_iy", d.eps_iy},
        {"eps_iz", d.eps_iz},
        {"eps_zz", d.eps_zz},
        {"kappa_c", d.kappa_c},
        {"readout_confusion",
         {{"control", confusion_to_json(d.confusion_control)}, {"target", confusion_to_json(d.confusion_target)}}},
        {"p_depol_per_cr_pulse", d.p_depol_per_cr_pulse},
        {"p_depol_per_clifford", d.p_depol_per_clifford},
        {"sq_pulse_ns", d.sq_pulse_ns},
        {"cr_width_ns", d.cr_width_ns},
        {"cr_rise_ns", d.cr_rise_ns},
        {"cancel_amplitude_hint", d.cancel_amplitude_hint},
        {"metadata",
         {{"control_freq_ghz", d.metadata.control_freq_ghz},
          {"control_anharmonicity_ghz", d.metadata.control_anharmonicity_ghz},
          {"target_freq_ghz", d.metadata.target_freq_ghz},
          {"target_anharmonicity_ghz", d.metadata.target_anharmonicity_ghz}}},
    };
}

DeviceConfig load_device(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open device config '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError("device config '" + path + "' is not valid JSON: " + e.what());
    }
    return device_from_json(j);
}

}  // namespace crcal
