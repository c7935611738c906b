#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace telesim {

/**
 * @brief Unit discipline for the simulator.
 *
 * Everything inside the dynamics runs in SI (rad, rad/s, N·m). Degrees and
 * millinewton-metres only appear at the reporting boundary: CSV logs, JSON
 * documents and identified transfer functions (torque in mNm, angle in deg).
 */
namespace units {

inline constexpr double kRadPerDeg = std::numbers::pi / 180.0;
inline constexpr double kDegPerRad = 180.0 / std::numbers::pi;
inline constexpr double kNmPerMilliNm = 1e-3;
inline constexpr double kMilliNmPerNm = 1e3;

inline double require_finite(double value, const char* what)
{
    if (!std::isfinite(value)) {
        throw std::invalid_argument(std::string(what) + ": non-finite value");
    }
    return value;
}

/// Degrees to radians. Rejects NaN and infinities.
inline double deg_to_rad(double degrees) { return require_finite(degrees, "deg_to_rad") * kRadPerDeg; }
inline double rad_to_deg(double radians) { return require_finite(radians, "rad_to_deg") * kDegPerRad; }
inline double mnm_to_nm(double millinewton_metres) { return require_finite(millinewton_metres, "mnm_to_nm") * kNmPerMilliNm; }
inline double nm_to_mnm(double newton_metres) { return require_finite(newton_metres, "nm_to_mnm") * kMilliNmPerNm; }

/// Stiffness given per degree (e.g. mNm/deg) expressed per radian.
inline double per_deg_to_per_rad(double per_degree) { return require_finite(per_degree, "per_deg_to_per_rad") * kDegPerRad; }
inline double per_rad_to_per_deg(double per_radian) { return require_finite(per_radian, "per_rad_to_per_deg") * kRadPerDeg; }

} // namespace units

/**
 * @brief Thin strong type over an SI scalar.
 *
 * Tag types keep angles, velocities and torques from being mixed up in
 * function signatures. Arithmetic stays within one quantity kind.
 */
template <typename Tag>
class Quantity {
public:
    constexpr Quantity() = default;
    constexpr explicit Quantity(double si) : si_(si) {}

    constexpr double si() const { return si_; }

    constexpr Quantity operator-() const { return Quantity(-si_); }
    constexpr Quantity operator+(Quantity o) const { return Quantity(si_ + o.si_); }
    constexpr Quantity operator-(Quantity o) const { return Quantity(si_ - o.si_); }
    constexpr Quantity operator*(double k) const { return Quantity(si_ * k); }
    constexpr auto operator<=>(const Quantity&) const = default;

private:
    double si_ = 0.0;
};

struct AngleTag {};
struct AngularVelocityTag {};
struct TorqueTag {};

class Angle : public Quantity<AngleTag> {
public:
    using Quantity::Quantity;
    constexpr Angle(Quantity<AngleTag> q) : Quantity(q) {}
    static Angle from_deg(double deg) { return Angle(units::deg_to_rad(deg)); }
    static constexpr Angle from_rad(double rad) { return Angle(rad); }
    double deg() const { return units::rad_to_deg(si()); }
    constexpr double rad() const { return si(); }
};

class AngularVelocity : public Quantity<AngularVelocityTag> {
public:
    using Quantity::Quantity;
    constexpr AngularVelocity(Quantity<AngularVelocityTag> q) : Quantity(q) {}
    static AngularVelocity from_deg_s(double deg_s) { return AngularVelocity(units::deg_to_rad(deg_s)); }
    static constexpr AngularVelocity from_rad_s(double rad_s) { return AngularVelocity(rad_s); }
    double deg_s() const { return units::rad_to_deg(si()); }
    constexpr double rad_s() const { return si(); }
};

class Torque : public Quantity<TorqueTag> {
public:
    using Quantity::Quantity;
    constexpr Torque(Quantity<TorqueTag> q) : Quantity(q) {}
    static Torque from_mnm(double mnm) { return Torque(units::mnm_to_nm(mnm)); }
    static constexpr Torque from_nm(double nm) { return Torque(nm); }
    double mnm() const { return units::nm_to_mnm(si()); }
    constexpr double nm() const { return si(); }
};

/// Degrees in, radians out.
inline double convert_angle(double degrees) { return units::deg_to_rad(degrees); }

} // namespace telesim
