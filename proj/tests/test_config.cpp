#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "telesim/config.hpp"

using namespace telesim;
using nlohmann::json;

namespace {

bool mentions(const ConfigError& e, const std::string& needle)
{
    for (const auto& issue : e.issues()) {
        if (issue.find(needle) != std::string::npos) {
            return true;
        }
    }
    return false;
}

template <typename Fn>
ConfigError expect_config_error(Fn fn)
{
    try {
        fn();
    } catch (const ConfigError& e) {
        return e;
    }
    ADD_FAILURE() << "expected ConfigError";
    return ConfigError({});
}

} // namespace

TEST(Config, EmptyDocumentGivesDefaults)
{
    const PlantConfig cfg = parse_config(json::object());
    EXPECT_EQ(cfg.transmission, TransmissionKind::rigid);
    EXPECT_EQ(cfg.environment.kind, EnvironmentKind::freespace);
    EXPECT_EQ(cfg, validate_config(PlantConfig{}));
    EXPECT_EQ(cfg.decimation, 10);
}

TEST(Config, NonIntegerDecimationIsRejected)
{
    const auto e = expect_config_error([] { parse_config(json{{"integrator_step_s", 3e-4}, {"control_rate_hz", 1000}}); });
    EXPECT_TRUE(mentions(e, "non-integer decimation"));
}

TEST(Config, NegativeInertiaIsRejected)
{
    const auto e = expect_config_error([] { parse_config(json{{"leader_inertia_kg_m2", -1}}); });
    EXPECT_TRUE(mentions(e, "inertia must be positive"));
    EXPECT_TRUE(mentions(e, "leader_inertia_kg_m2"));
}

TEST(Config, AllViolationsAreReportedTogether)
{
    const auto e = expect_config_error(
        [] { parse_config(json{{"leader_inertia_kg_m2", -1}, {"follower_inertia_kg_m2", 0}, {"encoder_counts_per_rev", 0}}); });
    EXPECT_EQ(e.issues().size(), 3u);
}

TEST(Config, UnknownAndMistypedFieldsAreRejected)
{
    const auto unknown = expect_config_error([] { parse_config(json{{"leader_inertia", 1e-4}}); });
    EXPECT_TRUE(mentions(unknown, "unknown field"));
    const auto mistyped = expect_config_error([] { parse_config(json{{"seed", "one"}}); });
    EXPECT_TRUE(mentions(mistyped, "seed"));
    const auto nested = expect_config_error([] { parse_config(json{{"excitation", {{"f0", 1.0}}}}); });
    EXPECT_TRUE(mentions(nested, "excitation.f0"));
    const auto kind = expect_config_error([] { parse_config(json{{"transmission", "springy"}}); });
    EXPECT_TRUE(mentions(kind, "transmission"));
}

TEST(Config, BoundaryUnitsAreConvertedToSi)
{
    const PlantConfig cfg = parse_config(json{{"transmission", "damped"},
                                              {"damper_mNm_per_rad_s", 9.45},
                                              {"environment", "spring"},
                                              {"environment_stiffness_mNm_per_deg", 1.0},
                                              {"environment_torque_limit_mNm", 467}});
    EXPECT_EQ(cfg.transmission, TransmissionKind::damped);
    EXPECT_DOUBLE_EQ(cfg.damper_coefficient, 9.45e-3);
    EXPECT_NEAR(cfg.environment.stiffness, 0.0572958, 1e-7);
    EXPECT_DOUBLE_EQ(cfg.environment.torque_limit, 0.467);
}

TEST(Config, ElectromechanicalAliasIsAccepted)
{
    EXPECT_EQ(parse_config(json{{"transmission", "em"}}).transmission, TransmissionKind::electromechanical);
    EXPECT_EQ(parse_config(json{{"transmission", "electromechanical"}}).transmission, TransmissionKind::electromechanical);
}

TEST(Config, DerivedRodStiffnessMatchesTorsionFormula)
{
    // G = E / (2 (1 + nu)) = 0.5633 MPa; J_p = pi d^4 / 32; k = G J_p / L.
    const double g = 1.69e6 / 3.0;
    const double d = 6.3e-3;
    const double jp = 3.141592653589793 * d * d * d * d / 32.0;
    const double k = g * jp / 50e-3;
    EXPECT_NEAR(k * 1e3, 1.742, 5e-4);
    EXPECT_NEAR(PlantConfig{}.elastic_stiffness(), k, 1e-15);
}

TEST(Config, StiffnessOverrideWins)
{
    const PlantConfig cfg = parse_config(json{{"elastic_stiffness_mNm_per_rad", 5.0}});
    EXPECT_DOUBLE_EQ(cfg.elastic_stiffness(), 5e-3);
}

TEST(Config, ValidationIsIdempotent)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    const TransmissionKind kinds[] = {TransmissionKind::rigid, TransmissionKind::elastic, TransmissionKind::damped,
                                      TransmissionKind::combined, TransmissionKind::electromechanical};
    const int decimations[] = {1, 2, 5, 10, 20};
    for (int i = 0; i < 200; ++i) {
        PlantConfig cfg;
        cfg.transmission = kinds[i % 5];
        cfg.leader_inertia = 1e-4 * u(rng);
        cfg.follower_inertia = 1e-4 * u(rng);
        cfg.damper_coefficient = 1e-3 * u(rng);
        cfg.gains.kp = 0.01 * u(rng);
        cfg.integrator_step_s = 1.0 / (cfg.control_rate_hz * decimations[i % 5]);
        cfg.seed = rng();
        const PlantConfig once = validate_config(cfg);
        EXPECT_EQ(validate_config(once), once);
        EXPECT_EQ(once.decimation, decimations[i % 5]);
    }
}

TEST(Config, JsonRoundTripIsExact)
{
    PlantConfig cfg;
    cfg.transmission = TransmissionKind::combined;
    cfg.environment.kind = EnvironmentKind::spring;
    cfg.leader_motor_limit = 0.2;
    cfg.noise = {0.01, 0.5};
    cfg.quantize_encoders = true;
    cfg.seed = 1234567890123ULL;
    cfg.identification.refine = false;
    const PlantConfig valid = validate_config(cfg);
    const json doc = to_json(valid);
    const PlantConfig back = parse_config(doc);
    EXPECT_EQ(back, valid);
    EXPECT_EQ(to_json(back).dump(), doc.dump());
}

TEST(Config, InconsistentDecimationIsRejected)
{
    json doc = to_json(validate_config(PlantConfig{}));
    doc["decimation"] = 7;
    EXPECT_THROW(parse_config(doc), ConfigError);
}

TEST(Config, FileErrorsAreDistinguished)
{
    const auto dir = std::filesystem::temp_directory_path() / "telesim_config_test";
    std::filesystem::create_directories(dir);
    const auto bad = dir / "bad.json";
    std::ofstream(bad) << "{ not json";
    EXPECT_THROW(load_config(bad.string()), ConfigError);
    EXPECT_THROW(load_config((dir / "missing.json").string()), DocumentError);
    std::filesystem::remove_all(dir);
}
