#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "telesim/control.hpp"
#include "telesim/excitation.hpp"
#include "telesim/units.hpp"

namespace telesim {

enum class TransmissionKind { rigid, elastic, damped, combined, electromechanical };

inline const char* to_string(TransmissionKind k)
{
    switch (k) {
    case TransmissionKind::rigid: return "rigid";
    case TransmissionKind::elastic: return "elastic";
    case TransmissionKind::damped: return "damped";
    case TransmissionKind::combined: return "combined";
    case TransmissionKind::electromechanical: return "electromechanical";
    }
    return "?";
}

inline const char* to_string(EnvironmentKind k)
{
    switch (k) {
    case EnvironmentKind::freespace: return "freespace";
    case EnvironmentKind::spring: return "spring";
    case EnvironmentKind::damper: return "damper";
    case EnvironmentKind::inertia: return "inertia";
    case EnvironmentKind::pendulum: return "pendulum";
    }
    return "?";
}

inline const char* to_string(ExcitationKind k)
{
    switch (k) {
    case ExcitationKind::chirp: return "chirp";
    case ExcitationKind::sine: return "sine";
    case ExcitationKind::step: return "step";
    }
    return "?";
}

inline std::optional<TransmissionKind> parse_transmission(const std::string& s)
{
    for (auto k : {TransmissionKind::rigid, TransmissionKind::elastic, TransmissionKind::damped,
                   TransmissionKind::combined, TransmissionKind::electromechanical}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    if (s == "em") {
        return TransmissionKind::electromechanical;
    }
    return std::nullopt;
}

inline std::optional<EnvironmentKind> parse_environment(const std::string& s)
{
    for (auto k : {EnvironmentKind::freespace, EnvironmentKind::spring, EnvironmentKind::damper,
                   EnvironmentKind::inertia, EnvironmentKind::pendulum}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    return std::nullopt;
}

/**
 * @brief Neoprene torsion rod of the elastic transmission.
 *
 * Torsional stiffness k = G J_p / L with J_p = pi d^4 / 32 and
 * G = E / (2 (1 + nu)); rubber is taken as incompressible (nu = 0.5).
 */
struct ElasticRod {
    double diameter_mm = 6.3;
    double length_mm = 50.0;
    double youngs_modulus_mpa = 1.69;
    double poisson_ratio = 0.5;

    double shear_modulus_pa() const { return youngs_modulus_mpa * 1e6 / (2.0 * (1.0 + poisson_ratio)); }

    double torsional_stiffness() const  ///< N·m/rad
    {
        const double d = diameter_mm * 1e-3;
        const double polar_moment = std::numbers::pi * d * d * d * d / 32.0;
        return shear_modulus_pa() * polar_moment / (length_mm * 1e-3);
    }

    bool operator==(const ElasticRod&) const = default;
};

struct MeasurementNoise {
    double angle_deg = 0.0;   ///< std of additive encoder-angle noise
    double torque_mnm = 0.0;  ///< std of additive torque-sensor noise

    bool operator==(const MeasurementNoise&) const = default;
};

struct IdentificationOptions {
    double svf_cutoff_rad_s = 25.0;
    bool refine = true;
    int whiteness_lags = 20;
    double confidence = 0.95;

    bool operator==(const IdentificationOptions&) const = default;
};

/**
 * @brief Full parameterization of one testbed run. SI units throughout.
 *
 * Inertia and viscous defaults are order-of-magnitude calibration knobs
 * (direct-drive rotor plus pulleys), not measured values.
 */
struct PlantConfig {
    TransmissionKind transmission = TransmissionKind::rigid;

    ElasticRod rod{};
    std::optional<double> elastic_stiffness_override;  ///< N·m/rad; rod-derived when empty
    double elastic_parallel_damping = 0.0;             ///< N·m·s/rad
    double damper_coefficient = 9.45e-3;               ///< N·m·s/rad

    PdGains gains{};
    double derivative_filter_cutoff_hz = 0.0;  ///< 0 = no filter
    std::optional<double> leader_motor_limit;  ///< N·m
    std::optional<double> follower_motor_limit;

    double leader_inertia = 2e-4;     ///< kg·m^2
    double follower_inertia = 2e-4;   ///< kg·m^2
    double leader_viscous = 1e-4;     ///< N·m·s/rad
    double follower_viscous = 1e-4;   ///< N·m·s/rad

    EnvironmentLaw environment{};

    double control_rate_hz = 1000.0;
    double integrator_step_s = 1e-4;
    int decimation = 10;  ///< integrator steps per control period, derived

    int encoder_counts_per_rev = 2000;
    bool quantize_encoders = false;
    MeasurementNoise noise{};
    std::uint64_t seed = 1;

    ExcitationSpec excitation{};
    IdentificationOptions identification{};

    double elastic_stiffness() const { return elastic_stiffness_override.value_or(rod.torsional_stiffness()); }
    double control_period_s() const { return 1.0 / control_rate_hz; }

    bool operator==(const PlantConfig&) const = default;
};

/// One or more violated config invariants, each prefixed by its field path.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues))
    {
    }

    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues)
    {
        std::string out = "invalid configuration";
        for (const auto& i : issues) {
            out += "\n  " + i;
        }
        return out;
    }

    std::vector<std::string> issues_;
};

namespace detail {

inline void check(std::vector<std::string>& issues, bool ok, const std::string& path, const std::string& message)
{
    if (!ok) {
        issues.push_back(path + ": " + message);
    }
}

inline bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
inline bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

} // namespace detail

/**
 * @brief Check every invariant and fill derived fields.
 *
 * Idempotent: validate_config(validate_config(c)) == validate_config(c).
 */
inline PlantConfig validate_config(PlantConfig cfg)
{
    using detail::check;
    using detail::finite_nonneg;
    using detail::finite_pos;
    std::vector<std::string> issues;

    check(issues, finite_pos(cfg.leader_inertia), "leader_inertia_kg_m2", "inertia must be positive");
    check(issues, finite_pos(cfg.follower_inertia), "follower_inertia_kg_m2", "inertia must be positive");
    check(issues, finite_nonneg(cfg.leader_viscous), "leader_viscous_Nm_s_per_rad", "damping must be non-negative");
    check(issues, finite_nonneg(cfg.follower_viscous), "follower_viscous_Nm_s_per_rad", "damping must be non-negative");
    check(issues, finite_nonneg(cfg.damper_coefficient), "damper_mNm_per_rad_s", "damping must be non-negative");
    check(issues, finite_nonneg(cfg.elastic_parallel_damping), "elastic_parallel_damping_mNm_per_rad_s",
          "damping must be non-negative");
    if (cfg.elastic_stiffness_override) {
        check(issues, finite_nonneg(*cfg.elastic_stiffness_override), "elastic_stiffness_mNm_per_rad",
              "stiffness must be non-negative");
    }
    check(issues, finite_pos(cfg.rod.diameter_mm), "rod_diameter_mm", "must be positive");
    check(issues, finite_pos(cfg.rod.length_mm), "rod_length_mm", "must be positive");
    check(issues, finite_pos(cfg.rod.youngs_modulus_mpa), "rod_youngs_modulus_MPa", "must be positive");
    check(issues, std::isfinite(cfg.rod.poisson_ratio) && cfg.rod.poisson_ratio > -1.0 && cfg.rod.poisson_ratio <= 0.5,
          "rod_poisson_ratio", "must lie in (-1, 0.5]");
    check(issues, finite_nonneg(cfg.gains.kp), "kp_Nm_per_rad", "gain must be non-negative");
    check(issues, finite_nonneg(cfg.gains.kd), "kd_Nm_s_per_rad", "gain must be non-negative");
    check(issues, finite_nonneg(cfg.derivative_filter_cutoff_hz), "derivative_filter_cutoff_hz", "must be non-negative");
    if (cfg.leader_motor_limit) {
        check(issues, finite_pos(*cfg.leader_motor_limit), "leader_motor_limit_mNm", "limit must be positive");
    }
    if (cfg.follower_motor_limit) {
        check(issues, finite_pos(*cfg.follower_motor_limit), "follower_motor_limit_mNm", "limit must be positive");
    }

    const auto& env = cfg.environment;
    check(issues, finite_nonneg(env.stiffness), "environment_stiffness_mNm_per_deg", "stiffness must be non-negative");
    check(issues, finite_nonneg(env.damping), "environment_damping_mNm_per_rad_s", "damping must be non-negative");
    check(issues, finite_nonneg(env.inertia), "environment_inertia_kg_m2", "inertia must be non-negative");
    check(issues, finite_nonneg(env.pendulum_mass), "pendulum_mass_kg", "must be non-negative");
    check(issues, finite_nonneg(env.pendulum_length), "pendulum_length_m", "must be non-negative");
    check(issues, finite_pos(env.torque_limit), "environment_torque_limit_mNm", "limit must be positive");

    check(issues, finite_pos(cfg.control_rate_hz), "control_rate_hz", "must be positive");
    check(issues, finite_pos(cfg.integrator_step_s), "integrator_step_s", "must be positive");
    if (finite_pos(cfg.control_rate_hz) && finite_pos(cfg.integrator_step_s)) {
        const double ratio = 1.0 / (cfg.control_rate_hz * cfg.integrator_step_s);
        const double nearest = std::round(ratio);
        if (nearest < 1.0 || ratio < 1.0 - 1e-9) {
            issues.push_back("integrator_step_s: integrator step exceeds the control period");
        } else if (std::abs(ratio - nearest) > 1e-9 * nearest) {
            issues.push_back("integrator_step_s: non-integer decimation (control period / integrator step = " +
                             std::to_string(ratio) + ")");
        } else {
            cfg.decimation = static_cast<int>(nearest);
        }
    }

    check(issues, cfg.encoder_counts_per_rev > 0, "encoder_counts_per_rev", "must be positive");
    check(issues, finite_nonneg(cfg.noise.angle_deg), "measurement_noise_std.angle_deg", "must be non-negative");
    check(issues, finite_nonneg(cfg.noise.torque_mnm), "measurement_noise_std.torque_mNm", "must be non-negative");

    try {
        cfg.excitation.validate();
    } catch (const std::exception& e) {
        issues.push_back(std::string("excitation: ") + e.what());
    }
    const auto& id = cfg.identification;
    check(issues, finite_pos(id.svf_cutoff_rad_s), "identification.svf_cutoff_rad_s", "must be positive");
    check(issues, id.whiteness_lags > 0, "identification.whiteness_lags", "must be positive");
    check(issues, id.confidence > 0.0 && id.confidence < 1.0, "identification.confidence", "must lie in (0, 1)");

    if (!issues.empty()) {
        throw ConfigError(std::move(issues));
    }
    return cfg;
}

namespace detail {

/// Strict reader for one JSON object: every key must be consumed, type errors are collected.
class ObjectReader {
public:
    ObjectReader(const nlohmann::json& obj, std::string prefix, std::vector<std::string>& issues)
        : obj_(obj), prefix_(std::move(prefix)), issues_(issues)
    {
        if (!obj_.is_object()) {
            issues_.push_back((prefix_.empty() ? std::string("<root>") : prefix_) + ": expected a JSON object");
            valid_ = false;
        }
    }

    std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

    const nlohmann::json* find(const std::string& key)
    {
        seen_.insert(key);
        if (!valid_) {
            return nullptr;
        }
        auto it = obj_.find(key);
        if (it == obj_.end()) {
            return nullptr;
        }
        return &*it;
    }

    void number(const std::string& key, double& out, double scale = 1.0)
    {
        if (const auto* v = find(key)) {
            if (!v->is_number()) {
                issues_.push_back(path(key) + ": expected a number");
                return;
            }
            out = v->get<double>() * scale;
        }
    }

    void optional_number(const std::string& key, std::optional<double>& out, double scale = 1.0)
    {
        if (const auto* v = find(key)) {
            if (v->is_null()) {
                out.reset();
                return;
            }
            if (!v->is_number()) {
                issues_.push_back(path(key) + ": expected a number or null");
                return;
            }
            out = v->get<double>() * scale;
        }
    }

    template <typename Int>
    void integer(const std::string& key, Int& out)
    {
        if (const auto* v = find(key)) {
            if (!v->is_number_integer()) {
                issues_.push_back(path(key) + ": expected an integer");
                return;
            }
            out = v->get<Int>();
        }
    }

    void boolean(const std::string& key, bool& out)
    {
        if (const auto* v = find(key)) {
            if (!v->is_boolean()) {
                issues_.push_back(path(key) + ": expected a boolean");
                return;
            }
            out = v->get<bool>();
        }
    }

    template <typename Enum, typename Parse>
    void enumeration(const std::string& key, Enum& out, Parse parse)
    {
        if (const auto* v = find(key)) {
            if (!v->is_string()) {
                issues_.push_back(path(key) + ": expected a string");
                return;
            }
            if (auto parsed = parse(v->get<std::string>())) {
                out = *parsed;
            } else {
                issues_.push_back(path(key) + ": unknown value \"" + v->get<std::string>() + "\"");
            }
        }
    }

    /// Report keys that no reader asked for.
    void finish()
    {
        if (!valid_) {
            return;
        }
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) {
                issues_.push_back(path(it.key()) + ": unknown field");
            }
        }
    }

private:
    const nlohmann::json& obj_;
    std::string prefix_;
    std::vector<std::string>& issues_;
    std::set<std::string> seen_;
    bool valid_ = true;
};

inline std::optional<ExcitationKind> parse_excitation_kind(const std::string& s)
{
    for (auto k : {ExcitationKind::chirp, ExcitationKind::sine, ExcitationKind::step}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    return std::nullopt;
}

} // namespace detail

/**
 * @brief Parse a configuration document (boundary units in field names) and validate it.
 *
 * Unknown fields are rejected. Missing fields take their defaults, so an empty
 * object yields the rigid / free-space default plant.
 */
inline PlantConfig parse_config(const nlohmann::json& doc)
{
    using units::kNmPerMilliNm;
    PlantConfig cfg;
    std::vector<std::string> issues;
    detail::ObjectReader r(doc, "", issues);

    r.enumeration("transmission", cfg.transmission, parse_transmission);
    r.optional_number("elastic_stiffness_mNm_per_rad", cfg.elastic_stiffness_override, kNmPerMilliNm);
    r.number("rod_diameter_mm", cfg.rod.diameter_mm);
    r.number("rod_length_mm", cfg.rod.length_mm);
    r.number("rod_youngs_modulus_MPa", cfg.rod.youngs_modulus_mpa);
    r.number("rod_poisson_ratio", cfg.rod.poisson_ratio);
    r.number("elastic_parallel_damping_mNm_per_rad_s", cfg.elastic_parallel_damping, kNmPerMilliNm);
    r.number("damper_mNm_per_rad_s", cfg.damper_coefficient, kNmPerMilliNm);
    r.number("kp_Nm_per_rad", cfg.gains.kp);
    r.number("kd_Nm_s_per_rad", cfg.gains.kd);
    r.number("derivative_filter_cutoff_hz", cfg.derivative_filter_cutoff_hz);
    r.optional_number("leader_motor_limit_mNm", cfg.leader_motor_limit, kNmPerMilliNm);
    r.optional_number("follower_motor_limit_mNm", cfg.follower_motor_limit, kNmPerMilliNm);
    r.number("leader_inertia_kg_m2", cfg.leader_inertia);
    r.number("follower_inertia_kg_m2", cfg.follower_inertia);
    r.number("leader_viscous_Nm_s_per_rad", cfg.leader_viscous);
    r.number("follower_viscous_Nm_s_per_rad", cfg.follower_viscous);

    r.enumeration("environment", cfg.environment.kind, parse_environment);
    r.number("environment_stiffness_mNm_per_deg", cfg.environment.stiffness, kNmPerMilliNm * units::kDegPerRad);
    r.number("environment_damping_mNm_per_rad_s", cfg.environment.damping, kNmPerMilliNm);
    r.number("environment_inertia_kg_m2", cfg.environment.inertia);
    r.number("pendulum_mass_kg", cfg.environment.pendulum_mass);
    r.number("pendulum_length_m", cfg.environment.pendulum_length);
    r.number("environment_torque_limit_mNm", cfg.environment.torque_limit, kNmPerMilliNm);

    r.number("control_rate_hz", cfg.control_rate_hz);
    r.number("integrator_step_s", cfg.integrator_step_s);
    int declared_decimation = 0;
    r.integer("decimation", declared_decimation);
    r.integer("encoder_counts_per_rev", cfg.encoder_counts_per_rev);
    r.boolean("quantize_encoders", cfg.quantize_encoders);
    r.integer("seed", cfg.seed);

    if (const auto* noise = r.find("measurement_noise_std")) {
        detail::ObjectReader nr(*noise, "measurement_noise_std", issues);
        nr.number("angle_deg", cfg.noise.angle_deg);
        nr.number("torque_mNm", cfg.noise.torque_mnm);
        nr.finish();
    }
    if (const auto* exc = r.find("excitation")) {
        detail::ObjectReader er(*exc, "excitation", issues);
        er.enumeration("kind", cfg.excitation.kind, detail::parse_excitation_kind);
        er.number("amplitude_deg", cfg.excitation.chirp.amplitude_deg);
        er.number("f0_hz", cfg.excitation.chirp.f0_hz);
        er.number("f1_hz", cfg.excitation.chirp.f1_hz);
        er.number("duration_s", cfg.excitation.chirp.duration_s);
        er.number("rise_time_s", cfg.excitation.rise_time_s);
        er.finish();
        if (cfg.excitation.kind == ExcitationKind::sine && !exc->contains("f1_hz")) {
            cfg.excitation.chirp.f1_hz = cfg.excitation.chirp.f0_hz;
        }
    }
    if (const auto* ident = r.find("identification")) {
        detail::ObjectReader ir(*ident, "identification", issues);
        ir.number("svf_cutoff_rad_s", cfg.identification.svf_cutoff_rad_s);
        ir.boolean("refine", cfg.identification.refine);
        ir.integer("whiteness_lags", cfg.identification.whiteness_lags);
        ir.number("confidence", cfg.identification.confidence);
        ir.finish();
    }
    r.finish();

    if (!issues.empty()) {
        throw ConfigError(std::move(issues));
    }
    cfg = validate_config(std::move(cfg));
    if (declared_decimation != 0 && declared_decimation != cfg.decimation) {
        throw ConfigError({"decimation: declared " + std::to_string(declared_decimation) + " but control rate and step give " +
                           std::to_string(cfg.decimation)});
    }
    return cfg;
}

/// Normalized document with every field spelled out (boundary units), including derived values.
inline nlohmann::json to_json(const PlantConfig& cfg)
{
    using units::kMilliNmPerNm;
    nlohmann::json j;
    j["transmission"] = to_string(cfg.transmission);
    j["elastic_stiffness_mNm_per_rad"] = cfg.elastic_stiffness_override
                                             ? nlohmann::json(*cfg.elastic_stiffness_override * kMilliNmPerNm)
                                             : nlohmann::json(nullptr);
    j["rod_diameter_mm"] = cfg.rod.diameter_mm;
    j["rod_length_mm"] = cfg.rod.length_mm;
    j["rod_youngs_modulus_MPa"] = cfg.rod.youngs_modulus_mpa;
    j["rod_poisson_ratio"] = cfg.rod.poisson_ratio;
    j["elastic_parallel_damping_mNm_per_rad_s"] = cfg.elastic_parallel_damping * kMilliNmPerNm;
    j["damper_mNm_per_rad_s"] = cfg.damper_coefficient * kMilliNmPerNm;
    j["kp_Nm_per_rad"] = cfg.gains.kp;
    j["kd_Nm_s_per_rad"] = cfg.gains.kd;
    j["derivative_filter_cutoff_hz"] = cfg.derivative_filter_cutoff_hz;
    j["leader_motor_limit_mNm"] =
        cfg.leader_motor_limit ? nlohmann::json(*cfg.leader_motor_limit * kMilliNmPerNm) : nlohmann::json(nullptr);
    j["follower_motor_limit_mNm"] =
        cfg.follower_motor_limit ? nlohmann::json(*cfg.follower_motor_limit * kMilliNmPerNm) : nlohmann::json(nullptr);
    j["leader_inertia_kg_m2"] = cfg.leader_inertia;
    j["follower_inertia_kg_m2"] = cfg.follower_inertia;
    j["leader_viscous_Nm_s_per_rad"] = cfg.leader_viscous;
    j["follower_viscous_Nm_s_per_rad"] = cfg.follower_viscous;
    j["environment"] = to_string(cfg.environment.kind);
    j["environment_stiffness_mNm_per_deg"] = cfg.environment.stiffness * kMilliNmPerNm * units::kRadPerDeg;
    j["environment_damping_mNm_per_rad_s"] = cfg.environment.damping * kMilliNmPerNm;
    j["environment_inertia_kg_m2"] = cfg.environment.inertia;
    j["pendulum_mass_kg"] = cfg.environment.pendulum_mass;
    j["pendulum_length_m"] = cfg.environment.pendulum_length;
    j["environment_torque_limit_mNm"] = cfg.environment.torque_limit * kMilliNmPerNm;
    j["control_rate_hz"] = cfg.control_rate_hz;
    j["integrator_step_s"] = cfg.integrator_step_s;
    j["decimation"] = cfg.decimation;
    j["encoder_counts_per_rev"] = cfg.encoder_counts_per_rev;
    j["quantize_encoders"] = cfg.quantize_encoders;
    j["measurement_noise_std"] = {{"angle_deg", cfg.noise.angle_deg}, {"torque_mNm", cfg.noise.torque_mnm}};
    j["seed"] = cfg.seed;
    j["excitation"] = {{"kind", to_string(cfg.excitation.kind)},
                       {"amplitude_deg", cfg.excitation.chirp.amplitude_deg},
                       {"f0_hz", cfg.excitation.chirp.f0_hz},
                       {"f1_hz", cfg.excitation.chirp.f1_hz},
                       {"duration_s", cfg.excitation.chirp.duration_s},
                       {"rise_time_s", cfg.excitation.rise_time_s}};
    j["identification"] = {{"svf_cutoff_rad_s", cfg.identification.svf_cutoff_rad_s},
                           {"refine", cfg.identification.refine},
                           {"whiteness_lags", cfg.identification.whiteness_lags},
                           {"confidence", cfg.identification.confidence}};
    return j;
}

/// Raised when a document cannot be read or parsed as JSON at all.
class DocumentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline nlohmann::json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DocumentError("cannot open " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError({path + ": malformed JSON (" + e.what() + ")"});
    }
}

inline PlantConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

} // namespace telesim
