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

#include "crcal/cli.h"

#include <fmt/chrono.h>
#include <fmt/format.h>

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <map>
#include <numbers>
#include <ostream>
#include <thread>

#include "crcal/benchmarking.h"
#include "crcal/calibration.h"
#include "crcal/device.h"
#include "crcal/errors.h"
#include "crcal/gate_synthesis.h"
#include "crcal/io.h"
#include "crcal/seeding.h"

namespace crcal {

namespace {

namespace fs = std::filesystem;

constexpr const char *kGateFile = "gate_zx_theta.json";
constexpr const char *kSweepFile = "amplitude_sweep.csv";
constexpr const char *kCoefficientsFile = "coefficients.json";
constexpr const char *kVerificationFile = "verification.json";
constexpr const char *kVerificationCsv = "verification_trajectories.csv";
constexpr const char *kRbSummaryFile = "rb_summary.json";
constexpr const char *kMetadataFile = "run_metadata.json";
constexpr uint64_t kVerifySeedStream = 99;
const std::vector<std::string> kDefaultRbGates{"ZX", "ZY", "ZZ", "XY", "XX", "YY"};
const std::vector<std::string> kAllGates{"XX", "XY", "XZ", "YX", "YY", "YZ", "ZX", "ZY", "ZZ"};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string device;
    double theta = std::numbers::pi / 5;
    uint64_t seed = 20230501;
    int64_t shots = 20000;
    std::string output = "crcal_out";
    std::string gate_file;
    std::vector<std::string> gates = kDefaultRbGates;
    size_t threads = std::max(1u, std::thread::hardware_concurrency());
    std::string format = "text";
    size_t widths = kDefaultTomographyWidths;
    bool dump_schedule = false;
    double axis_phase = 0;
};

std::string with_header(uint64_t seed, const std::string &hash, const std::string &csv) {
    return fmt::format("# seed={} config_hash={}\n", seed, hash) + csv;
}

void stamp(nlohmann::json &j, uint64_t seed, const std::string &hash) {
    j["seed"] = seed;
    j["config_hash"] = hash;
}

DeviceConfig require_device(const Options &o) {
    if (o.device.empty()) {
        throw UsageError(
            "missing --device; expected a device JSON file (see schemas/device.schema.json and "
            "configs/device_default.json)");
    }
    if (!fs::exists(o.device)) {
        throw UsageError(fmt::format("device file '{}' does not exist", o.device));
    }
    try {
        return load_device(o.device);
    } catch (const ValidationError &e) {
        throw UsageError(fmt::format(
            "device file '{}' failed schema validation: {} (see schemas/device.schema.json)", o.device, e.what()));
    }
}

void write_metadata(const fs::path &dir, const std::string &command, uint64_t seed, const std::string &hash) {
    const auto now = std::chrono::system_clock::now();
    nlohmann::json meta{
        {"command", command},
        {"seed", seed},
        {"config_hash", hash},
        {"timestamp_utc", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)))},
    };
    nlohmann::json all = nlohmann::json::object();
    const fs::path path = dir / kMetadataFile;
    if (fs::exists(path)) {
        try {
            all = nlohmann::json::parse(read_text_file(path.string()));
        } catch (const std::exception &) {
            all = nlohmann::json::object();
        }
    }
    all[command] = meta;
    write_text_file(path.string(), dump_json(all));
}

std::string trajectories_csv(const VerificationReport &r) {
    std::string out;
    for (const auto &[label, data] : {std::pair{"gate", &r.gate_data}, std::pair{"inverse", &r.inverse_data}}) {
        std::string body = tomography_csv(*data);
        const size_t eol = body.find('\n');
        if (out.empty()) {
            out = "sequence," + body.substr(0, eol + 1);
        }
        size_t pos = eol + 1;
        while (pos < body.size()) {
            const size_t next = body.find('\n', pos);
            out += std::string(label) + "," + body.substr(pos, next - pos + 1);
            pos = next + 1;
        }
    }
    return out;
}

int cmd_calibrate(const Options &o, std::ostream &out) {
    const DeviceConfig dev = require_device(o);
    if (!(o.theta > 0 && o.theta <= std::numbers::pi)) {
        throw UsageError(fmt::format("--theta must lie in (0, pi], got {}", o.theta));
    }
    CalibrationConfig cfg;
    cfg.amplitude_grid = default_amplitude_grid();
    cfg.amplitude_shots = o.shots;
    cfg.tomography_shots = o.shots;
    cfg.tomography_widths = o.widths;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    const nlohmann::json config{{"device", to_json(dev)}, {"theta", o.theta}, {"calibration", cfg.to_json()}};
    const std::string hash = config_hash(config);
    const fs::path dir = o.output;
    fs::create_directories(dir);

    CalibrationRun run;
    try {
        run = run_full_calibration(dev, o.theta, cfg);
    } catch (const CalibrationError &e) {
        out << fmt::format("calibration failed at stage '{}': {}\n", e.stage, e.what());
        return kExitQualityGate;
    }
    const VerificationReport report = verify_calibration(
        dev, run.gate, o.shots, derive_seed(o.seed, kVerifySeedStream), o.widths, cfg.dominance_threshold, o.threads);

    nlohmann::json gate = to_json(run.gate);
    stamp(gate, o.seed, hash);
    write_text_file((dir / kGateFile).string(), dump_json(gate));
    write_text_file((dir / kSweepFile).string(), with_header(o.seed, hash, amplitude_sweep_csv(run.sweep)));

    nlohmann::json coeffs{{"experiments", nlohmann::json::array()}};
    for (const auto &t : run.tomographies) {
        coeffs["experiments"].push_back(
            {{"label", t.label}, {"schedule", to_json(t.schedule)}, {"coefficients", to_json(t.coefficients)}});
        write_text_file(
            (dir / fmt::format("tomography_{}.csv", t.label)).string(),
            with_header(o.seed, hash, tomography_csv(t.data)));
    }
    stamp(coeffs, o.seed, hash);
    write_text_file((dir / kCoefficientsFile).string(), dump_json(coeffs));

    nlohmann::json verification = to_json(report);
    stamp(verification, o.seed, hash);
    write_text_file((dir / kVerificationFile).string(), dump_json(verification));
    write_text_file((dir / kVerificationCsv).string(), with_header(o.seed, hash, trajectories_csv(report)));
    write_metadata(dir, "calibrate", o.seed, hash);

    if (o.dump_schedule) {
        out << dump_json(to_json(run.gate.schedule()));
    }
    const auto &g = run.gate;
    out << fmt::format(
        "theta={} amplitude={} cr_phase={} cancel_amplitude={} cancel_phase={}\n",
        fmt9(g.theta),
        fmt9(g.amplitude),
        fmt9(g.cr_phase),
        fmt9(g.cancel_amplitude),
        fmt9(g.cancel_phase));
    out << fmt::format(
        "verification: dominance_ratio={} threshold={} -> {}\n",
        fmt9(report.dominance_ratio),
        fmt9(report.threshold),
        report.passed ? "PASS" : "FAIL");
    return report.passed ? kExitOk : kExitQualityGate;
}

TwoQubitGateSpec gate_spec(const std::string &label, double theta) {
    if (label.size() != 2 || label.find_first_not_of("XYZ") != std::string::npos) {
        throw UsageError(fmt::format("unknown gate '{}'; expected two of X, Y, Z such as ZX", label));
    }
    return identity_wrappers(pauli_from_char(label[0]), pauli_from_char(label[1]), theta);
}

int cmd_benchmark(const Options &o, std::ostream &out) {
    const DeviceConfig dev = require_device(o);
    const fs::path dir = o.output;
    const std::string gate_path = o.gate_file.empty() ? (dir / kGateFile).string() : o.gate_file;
    if (!fs::exists(gate_path)) {
        throw UsageError(fmt::format("gate file '{}' not found; run `crcal calibrate` first or pass --gate", gate_path));
    }
    CalibratedGate gate;
    try {
        gate = gate_from_json(nlohmann::json::parse(read_text_file(gate_path)));
    } catch (const nlohmann::json::exception &e) {
        throw UsageError(fmt::format("gate file '{}' is not valid JSON: {}", gate_path, e.what()));
    } catch (const ValidationError &e) {
        throw UsageError(fmt::format("gate file '{}' is invalid: {}", gate_path, e.what()));
    }
    RbConfig rb;
    rb.shots = o.shots;
    std::vector<TwoQubitGateSpec> specs;
    for (const auto &label : o.gates) {
        specs.push_back(gate_spec(label, gate.theta));
    }
    const nlohmann::json config{
        {"device", to_json(dev)}, {"theta", gate.theta}, {"rb", rb.to_json()}, {"gates", o.gates}};
    const std::string hash = config_hash(config);
    fs::create_directories(dir);

    nlohmann::json summary{{"theta", gate.theta}, {"rb", rb.to_json()}, {"gates", nlohmann::json::array()}};
    bool all_ok = true;
    for (size_t i = 0; i < specs.size(); i++) {
        const auto pos = std::find(kAllGates.begin(), kAllGates.end(), o.gates[i]) - kAllGates.begin();
        const IrbResult r = run_irb(dev, specs[i], rb, derive_seed(o.seed, static_cast<uint64_t>(pos)), o.threads);
        write_text_file((dir / fmt::format("rb_{}.csv", r.gate)).string(), with_header(o.seed, hash, rb_csv(r)));
        summary["gates"].push_back(to_json(r));
        const bool ok = r.f_custom.f >= r.f_standard.f;
        all_ok = all_ok && ok;
        out << fmt::format(
            "{}: F_S={} +- {}  F_C={} +- {}{}\n",
            r.gate,
            fmt9(r.f_standard.f),
            fmt9(r.f_standard.stderr),
            fmt9(r.f_custom.f),
            fmt9(r.f_custom.stderr),
            ok ? "" : "  (F_C < F_S)");
    }
    stamp(summary, o.seed, hash);
    write_text_file((dir / kRbSummaryFile).string(), dump_json(summary));
    write_metadata(dir, "benchmark", o.seed, hash);
    return all_ok ? kExitOk : kExitQualityGate;
}

std::string word_text(const WrapperWord &w) {
    if (w.empty()) {
        return "-";
    }
    std::string s;
    for (const auto &g : w) {
        s += (s.empty() ? "" : " ") + g.label();
    }
    return s;
}

int cmd_synthesize(const Options &o, std::ostream &out) {
    std::vector<TwoQubitGateSpec> specs;
    for (const auto &label : kAllGates) {
        specs.push_back(gate_spec(label, o.theta));
    }
    if (o.axis_phase != 0) {
        specs.push_back(phase_shifted_axis_gate(o.theta, o.axis_phase));
    }
    nlohmann::json doc{{"theta", o.theta}, {"convention", "control (x) target"}, {"gates", nlohmann::json::array()}};
    std::string table = fmt::format(
        "{:<18} {:<10} {:<10} {:<10} {:<10} {}\n", "gate", "pre_c", "pre_t", "post_c", "post_t", "verified");
    for (const auto &s : specs) {
        const Unitary4 u = unitary_of(s);
        const bool ok = equivalent_up_to_global_phase(u, target_unitary(s), 1e-10);
        auto j = to_json(s);
        j["unitary"] = unitary_to_json(u);
        j["verified"] = ok;
        doc["gates"].push_back(j);
        table += fmt::format(
            "{:<18} {:<10} {:<10} {:<10} {:<10} {}\n",
            s.label(),
            word_text(s.pre[0]),
            word_text(s.pre[1]),
            word_text(s.post[0]),
            word_text(s.post[1]),
            ok ? "yes" : "NO");
    }
    const std::string payload = o.format == "json" ? dump_json(doc) : table;
    out << payload;
    if (!o.output.empty() && o.output != "-") {
        fs::create_directories(o.output);
        write_text_file((fs::path(o.output) / (o.format == "json" ? "synthesis.json" : "synthesis.txt")).string(), payload);
    }
    return kExitOk;
}

std::optional<nlohmann::json> read_json(const fs::path &p) {
    if (!fs::exists(p)) {
        return std::nullopt;
    }
    return nlohmann::json::parse(read_text_file(p.string()));
}

int cmd_report(const Options &o, std::ostream &out) {
    const fs::path dir = o.output;
    const std::vector<std::string> expected{kGateFile, kSweepFile, kCoefficientsFile, kVerificationFile, kRbSummaryFile};
    std::map<std::string, bool> present;
    bool any = false;
    for (const auto &f : expected) {
        present[f] = fs::exists(dir / f);
        any = any || present[f];
    }
    if (!any) {
        std::string list;
        for (const auto &f : expected) {
            list += "\n  " + f;
        }
        throw UsageError(fmt::format("no crcal outputs in '{}'; expected some of:{}", dir.string(), list));
    }
    const auto gate = read_json(dir / kGateFile);
    const auto coeffs = read_json(dir / kCoefficientsFile);
    const auto verification = read_json(dir / kVerificationFile);
    const auto rb = read_json(dir / kRbSummaryFile);

    // Names only, so the payload does not depend on where the directory lives.
    nlohmann::json index{{"files", nlohmann::json::object()}};
    for (const auto &[f, ok] : present) {
        index["files"][f] = ok;
    }

    if (o.format == "json") {
        nlohmann::json merged{{"index", index}};
        merged["gate"] = gate.value_or(nullptr);
        merged["coefficients"] = coeffs.value_or(nullptr);
        merged["verification"] = verification.value_or(nullptr);
        merged["benchmark"] = rb.value_or(nullptr);
        if (present[kSweepFile]) {
            merged["amplitude_sweep_csv"] = read_text_file((dir / kSweepFile).string());
        }
        const std::string text = dump_json(merged);
        write_text_file((dir / "report.json").string(), text);
        out << text;
        return kExitOk;
    }

    std::string r = "crcal report\n============\n\n";
    auto missing = [&](const char *file) { r += fmt::format("  MISSING ({} not found)\n\n", file); };

    r += "Calibrated gate\n---------------\n";
    if (gate) {
        for (const char *k : {"theta", "amplitude", "cr_phase", "cancel_amplitude", "cancel_phase", "width_ns", "rise_ns"}) {
            r += fmt::format("  {:<18} {}\n", k, fmt9(gate->at(k).get<double>()));
        }
        r += fmt::format("  {:<18} {}\n\n", "seed", gate->at("seed").dump());
    } else {
        missing(kGateFile);
    }

    r += "Amplitude sweep\n---------------\n";
    if (present[kSweepFile]) {
        r += fmt::format("  {}\n", kSweepFile);
        const std::string csv = read_text_file((dir / kSweepFile).string());
        size_t rows = 0;
        for (char c : csv) {
            rows += c == '\n';
        }
        r += fmt::format("  {} amplitude points\n\n", rows >= 2 ? rows - 2 : 0);
    } else {
        missing(kSweepFile);
    }

    r += "Hamiltonian tomography (rad/us)\n-------------------------------\n";
    if (coeffs) {
        r += fmt::format(
            "  {:<14} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}\n", "experiment", "ZX", "ZY", "ZZ", "IX", "IY", "IZ");
        for (const auto &e : coeffs->at("experiments")) {
            const auto &c = e.at("coefficients");
            r += fmt::format("  {:<14}", e.at("label").get<std::string>());
            for (const char *k : {"c_zx", "c_zy", "c_zz", "c_ix", "c_iy", "c_iz"}) {
                r += fmt::format(" {:>12}", fmt9(c.at(k).get<double>()));
            }
            r += "\n";
        }
        r += "\n";
    } else {
        missing(kCoefficientsFile);
    }

    r += "Verification\n------------\n";
    if (verification) {
        r += fmt::format(
            "  dominance ratio {} (threshold {}): {}\n  gate/inverse max discrepancy {} ({} sigma)\n\n",
            fmt9(verification->at("dominance_ratio").get<double>()),
            fmt9(verification->at("threshold").get<double>()),
            verification->at("passed").get<bool>() ? "PASS" : "FAIL",
            fmt9(verification->at("max_abs_coefficient_discrepancy").get<double>()),
            fmt9(verification->at("max_discrepancy_sigma").get<double>()));
    } else {
        missing(kVerificationFile);
    }

    r += "Interleaved randomized benchmarking\n-----------------------------------\n";
    if (rb) {
        r += fmt::format("  {:<6} {:>14} {:>12} {:>14} {:>12}\n", "gate", "F_S", "stderr", "F_C", "stderr");
        for (const auto &g : rb->at("gates")) {
            r += fmt::format(
                "  {:<6} {:>14} {:>12} {:>14} {:>12}\n",
                g.at("gate").get<std::string>(),
                fmt9(g.at("F_standard").at("value").get<double>()),
                fmt9(g.at("F_standard").at("stderr").get<double>()),
                fmt9(g.at("F_custom").at("value").get<double>()),
                fmt9(g.at("F_custom").at("stderr").get<double>()));
        }
        r += "\n";
    } else {
        missing(kRbSummaryFile);
    }

    write_text_file((dir / "report.txt").string(), r);
    write_text_file((dir / "report_index.json").string(), dump_json(index));
    out << r;
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Cross-resonance gate calibration and benchmarking on a virtual device", "crcal"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--seed", o.seed, "Master seed")->envname("CRCAL_SEED");
        sub->add_option("--output,-o", o.output, "Output directory")->envname("CRCAL_OUTPUT");
        sub->add_option("--threads", o.threads, "Worker thread cap")
            ->envname("CRCAL_THREADS")
            ->check(CLI::PositiveNumber);
    };

    auto *calibrate = app.add_subcommand("calibrate", "Calibrate a ZX(theta) gate and verify it");
    calibrate->add_option("--device", o.device, "Device JSON")->envname("CRCAL_DEVICE");
    calibrate->add_option("--theta", o.theta, "Target angle in rad, (0, pi]");
    calibrate->add_option("--shots", o.shots, "Shots per measurement")->envname("CRCAL_SHOTS")->check(CLI::PositiveNumber);
    calibrate->add_option("--widths", o.widths, "Tomography widths per experiment")->check(CLI::Range(8, 100000));
    calibrate->add_flag("--dump-schedule", o.dump_schedule, "Print the calibrated schedule JSON");
    add_common(calibrate);

    auto *benchmark = app.add_subcommand("benchmark", "Interleaved RB of standard and custom AB(theta) gates");
    benchmark->add_option("--device", o.device, "Device JSON")->envname("CRCAL_DEVICE");
    benchmark->add_option("--gate", o.gate_file, "Calibrated gate JSON (default: <output>/gate_zx_theta.json)");
    benchmark->add_option("--gates", o.gates, "Gates to benchmark")->delimiter(',');
    benchmark->add_option("--shots", o.shots, "Shots per sequence")->envname("CRCAL_SHOTS")->check(CLI::PositiveNumber);
    add_common(benchmark);

    auto *synthesize = app.add_subcommand("synthesize", "Print single-qubit wrappers for all nine AB(theta) gates");
    synthesize->add_option("--theta", o.theta, "Angle in rad");
    synthesize->add_option("--axis-phase", o.axis_phase, "Also emit the Z(cos X + sin Y) gate at this phase");
    synthesize->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    synthesize->add_option("--output,-o", o.output, "Directory for synthesis.{txt,json}; '-' for stdout only");

    auto *report = app.add_subcommand("report", "Summarize an output directory");
    report->add_option("--output,-o", o.output, "Directory to summarize")->envname("CRCAL_OUTPUT");
    report->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*calibrate) {
            return cmd_calibrate(o, out);
        }
        if (*benchmark) {
            return cmd_benchmark(o, out);
        }
        if (*synthesize) {
            if (synthesize->count("--output") == 0) {
                o.output = "-";
            }
            return cmd_synthesize(o, out);
        }
        return cmd_report(o, out);
    } catch (const UsageError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nlohmann::json::exception &e) {
        err << "error: malformed JSON: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace crcal
