// telesim: command-line front end for the 1-DoF teleoperator testbed simulator.
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include "telesim/telesim.hpp"

namespace fs = std::filesystem;
using namespace telesim;

namespace {

enum ExitCode : int { kOk = 0, kConfigError = 2, kIoError = 3, kNumericalError = 4 };

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool quantize = false;
    std::optional<double> noise_std;
};

PlantConfig load_with_overrides(const CommonOptions& opt)
{
    PlantConfig cfg;
    if (!opt.config_path.empty()) {
        try {
            cfg = load_config(opt.config_path);
        } catch (const DocumentError& e) {
            throw IoError(e.what());
        }
    }
    if (opt.seed) {
        cfg.seed = *opt.seed;
    }
    if (opt.quantize) {
        cfg.quantize_encoders = true;
    }
    if (opt.noise_std) {
        cfg.noise.angle_deg = *opt.noise_std;
        cfg.noise.torque_mnm = *opt.noise_std;
    }
    return validate_config(cfg);
}

/// Files are staged in memory and only written once every one of them has been produced.
class OutputSet {
public:
    void add(std::string name, std::string content) { files_[std::move(name)] = std::move(content); }

    void commit(const fs::path& dir) const
    {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec || !fs::is_directory(dir)) {
            throw IoError("cannot create output directory " + dir.string());
        }
        for (const auto& [name, content] : files_) {
            const fs::path target = dir / name;
            const fs::path staging = dir / (name + ".partial");
            {
                std::ofstream out(staging, std::ios::binary | std::ios::trunc);
                if (!out) {
                    throw IoError("cannot write " + staging.string());
                }
                out << content;
                out.flush();
                if (!out) {
                    fs::remove(staging, ec);
                    throw IoError("write failed for " + staging.string());
                }
            }
            fs::rename(staging, target, ec);
            if (ec) {
                fs::remove(staging, ec);
                throw IoError("cannot move " + staging.string() + " into place");
            }
        }
    }

private:
    std::map<std::string, std::string> files_;
};

std::string two_column_csv(const char* x_name, const char* y_name, const std::vector<std::pair<double, double>>& rows)
{
    std::ostringstream out;
    out << x_name << ',' << y_name << '\n';
    for (const auto& [x, y] : rows) {
        out << format_double(x) << ',' << format_double(y) << '\n';
    }
    return out.str();
}

struct BodeOptions {
    double w_min = 0.05;
    double w_max = 100.0;
    std::size_t points = 200;
};

void add_bode_files(OutputSet& files, const TransferFunction2& tf, const BodeOptions& opt)
{
    const auto grid = log_grid(opt.w_min, opt.w_max, opt.points);
    std::vector<std::pair<double, double>> mag, phase;
    for (const auto& p : tf_bode(tf, grid)) {
        mag.emplace_back(p.omega, p.magnitude_db);
        phase.emplace_back(p.omega, p.phase_deg);
    }
    files.add("bode_magnitude.csv", two_column_csv("omega_rad_s", "magnitude_db", mag));
    files.add("bode_phase.csv", two_column_csv("omega_rad_s", "phase_deg", phase));
}

double default_step_horizon(const TransferFunction2& tf)
{
    // Ten envelope time constants, 1 / (zeta wn) = 2 / a1.
    return std::clamp(20.0 / tf.a1, 1.0, 120.0);
}

void add_step_file(OutputSet& files, const TransferFunction2& tf, std::optional<double> horizon, double dt)
{
    std::vector<std::pair<double, double>> rows;
    for (const auto& p : tf_step(tf, horizon.value_or(default_step_horizon(tf)), dt)) {
        rows.emplace_back(p.time, p.value);
    }
    files.add("step.csv", two_column_csv("time_s", "angle_deg", rows));
}

std::optional<std::pair<TransmissionKind, EnvironmentKind>> parse_only(const std::string& spec)
{
    if (spec.empty()) {
        return std::nullopt;
    }
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw ConfigError({"--only: expected KIND:ENV, got \"" + spec + "\""});
    }
    const auto t = parse_transmission(spec.substr(0, colon));
    const auto e = parse_environment(spec.substr(colon + 1));
    if (!t || !e) {
        throw ConfigError({"--only: unknown transmission or environment in \"" + spec + "\""});
    }
    return std::pair{*t, *e};
}

TransferFunction2 load_tf(const std::string& path)
{
    try {
        return tf_from_json(read_json_file(path));
    } catch (const DocumentError& e) {
        throw IoError(e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError({path + ": " + e.what()});
    }
}

void print_summary(const TransferFunction2& tf)
{
    const auto s = tf_analyze(tf);
    std::printf("transfer function: %s\n", format_tf(tf).c_str());
    if (s.dc_gain) {
        std::printf("dc_gain: %.4f deg/mNm\n", *s.dc_gain);
    } else {
        std::printf("dc_gain: undefined\n");
    }
    if (s.stable) {
        std::printf("natural_frequency: %.2f rad/s\n", *s.natural_frequency);
        std::printf("damping_ratio: %.3f\n", *s.damping_ratio);
        std::printf("stability: stable\n");
    } else {
        std::printf("stability: unstable\n");
    }
}

void add_common(CLI::App* cmd, CommonOptions& opt, bool out_required)
{
    cmd->add_option("-c,--config", opt.config_path, "JSON configuration document (defaults when omitted)");
    auto* out = cmd->add_option("-o,--out", opt.out, "Output directory");
    if (out_required) {
        out->required();
    }
    cmd->add_option("--seed", opt.seed, "Override the noise seed");
    cmd->add_flag("--quantize", opt.quantize, "Enable encoder quantization");
    cmd->add_option("--noise-std", opt.noise_std, "Measurement noise std (deg on angles, mNm on torques)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"telesim: reconfigurable 1-DoF teleoperator simulator and identification toolkit"};
    app.require_subcommand(1);

    CommonOptions common;
    bool no_refine = false;
    std::string only;
    std::string tf_path;
    BodeOptions bode_opt;
    std::optional<double> step_horizon;
    double step_dt = 1e-3;

    auto* simulate = app.add_subcommand("simulate", "Simulate one run of the configured excitation and write a CSV log");
    add_common(simulate, common, true);

    auto* identify = app.add_subcommand("identify", "Run the two-run identification protocol and fit a second-order model");
    add_common(identify, common, true);
    identify->add_flag("--no-refine", no_refine, "Skip output-error refinement (least-squares estimate only)");

    auto* sweep = app.add_subcommand("sweep", "Identify every transmission x {freespace, spring} cell");
    add_common(sweep, common, true);
    sweep->add_flag("--no-refine", no_refine, "Skip output-error refinement");
    sweep->add_option("--only", only, "Restrict to one cell, e.g. rigid:spring");

    auto* analyze = app.add_subcommand("analyze", "Print DC gain, natural frequency, damping ratio and stability");
    analyze->add_option("tf", tf_path, "Transfer-function JSON (bare or identify output)")->required();

    auto* bode = app.add_subcommand("bode", "Write Bode magnitude/phase CSVs for a transfer function");
    bode->add_option("tf", tf_path, "Transfer-function JSON")->required();
    bode->add_option("-o,--out", common.out, "Output directory")->required();
    bode->add_option("--w-min", bode_opt.w_min, "Lowest frequency, rad/s");
    bode->add_option("--w-max", bode_opt.w_max, "Highest frequency, rad/s");
    bode->add_option("--points", bode_opt.points, "Number of log-spaced points");

    auto* step = app.add_subcommand("step", "Write the unit-step (1 mNm) response CSV for a transfer function");
    step->add_option("tf", tf_path, "Transfer-function JSON")->required();
    step->add_option("-o,--out", common.out, "Output directory")->required();
    step->add_option("--horizon", step_horizon, "Response horizon in s (default 20/a1)");
    step->add_option("--dt", step_dt, "Sample spacing in s");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*simulate) {
            const PlantConfig cfg = load_with_overrides(common);
            const auto log = simulate_kinematic(cfg, cfg.excitation);
            std::ostringstream csv;
            write_csv(csv, log);
            OutputSet files;
            files.add("run.csv", csv.str());
            files.add("config.json", to_json(cfg).dump(2) + "\n");
            files.commit(common.out);
        } else if (*identify) {
            PlantConfig cfg = load_with_overrides(common);
            if (no_refine) {
                cfg.identification.refine = false;
            }
            const IdentResult result = run_identification(cfg);
            nlohmann::json doc = to_json(result);
            doc["transmission"] = to_string(cfg.transmission);
            doc["environment"] = to_string(cfg.environment.kind);
            OutputSet files;
            files.add("ident.json", doc.dump(2) + "\n");
            files.add("config.json", to_json(cfg).dump(2) + "\n");
            add_bode_files(files, result.tf, bode_opt);
            if (result.tf.stable()) {
                add_step_file(files, result.tf, std::nullopt, step_dt);
            }
            files.commit(common.out);
        } else if (*sweep) {
            PlantConfig cfg = load_with_overrides(common);
            if (no_refine) {
                cfg.identification.refine = false;
            }
            const SweepReport report = run_sweep(cfg, parse_only(only));
            OutputSet files;
            files.add("sweep.json", to_json(report).dump(2) + "\n");
            files.add("sweep.md", to_markdown(report));
            files.commit(common.out);
            std::cout << to_markdown(report);
            if (!report.all_cells_ok()) {
                return kNumericalError;
            }
        } else if (*analyze) {
            print_summary(load_tf(tf_path));
        } else if (*bode) {
            OutputSet files;
            add_bode_files(files, load_tf(tf_path), bode_opt);
            files.commit(common.out);
        } else if (*step) {
            OutputSet files;
            add_step_file(files, load_tf(tf_path), step_horizon, step_dt);
            files.commit(common.out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const SimulationDiverged& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const UnidentifiableData& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericalError;
    }
    return kOk;
}
