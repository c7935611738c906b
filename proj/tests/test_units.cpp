#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "telesim/units.hpp"

using namespace telesim;

TEST(Units, ZeroDegreesIsZeroRadians) { EXPECT_EQ(units::deg_to_rad(0.0), 0.0); }

TEST(Units, NinetyDegreesIsHalfPi) { EXPECT_NEAR(units::deg_to_rad(90.0), 1.5707963, 1e-7); }

TEST(Units, SpringConstantPerDegreeToPerRadian)
{
    // 1 mNm/deg expressed per radian is 180/pi mNm/rad.
    EXPECT_NEAR(units::per_deg_to_per_rad(1.0), 57.2958, 1e-4);
    EXPECT_NEAR(units::per_rad_to_per_deg(57.29577951308232), 1.0, 1e-12);
}

TEST(Units, NonFiniteInputsAreRejected)
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_THROW(units::deg_to_rad(nan), std::invalid_argument);
    EXPECT_THROW(units::rad_to_deg(inf), std::invalid_argument);
    EXPECT_THROW(units::mnm_to_nm(-inf), std::invalid_argument);
    EXPECT_THROW(units::nm_to_mnm(nan), std::invalid_argument);
    EXPECT_THROW(convert_angle(nan), std::invalid_argument);
}

TEST(Units, RoundTripsOverRandomValues)
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(-1e4, 1e4);
    for (int i = 0; i < 10000; ++i) {
        const double v = dist(rng);
        EXPECT_NEAR(units::rad_to_deg(units::deg_to_rad(v)), v, 1e-12 * std::max(1.0, std::abs(v)));
        EXPECT_NEAR(units::nm_to_mnm(units::mnm_to_nm(v)), v, 1e-12 * std::max(1.0, std::abs(v)));
        EXPECT_NEAR(units::per_rad_to_per_deg(units::per_deg_to_per_rad(v)), v, 1e-12 * std::max(1.0, std::abs(v)));
    }
}

TEST(Units, StrongTypesKeepSiInternally)
{
    const auto a = Angle::from_deg(180.0);
    EXPECT_DOUBLE_EQ(a.rad(), std::numbers::pi);
    EXPECT_DOUBLE_EQ(a.deg(), 180.0);
    const auto tq = Torque::from_mnm(467.0);
    EXPECT_DOUBLE_EQ(tq.nm(), 0.467);
    EXPECT_DOUBLE_EQ(tq.mnm(), 467.0);
}
