#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace telesim {

/// Position-position PD gains, N·m/rad and N·m·s/rad.
struct PdGains {
    double kp = 0.05;
    double kd = 0.05;

    void validate() const
    {
        if (!(kp >= 0.0) || !(kd >= 0.0)) {
            throw std::invalid_argument("PD gains must be non-negative");
        }
    }

    bool operator==(const PdGains&) const = default;
};

/// Sensed leader/follower state as seen by the 1 kHz loop (rad, rad/s).
struct ControllerSample {
    double theta_l = 0.0;
    double omega_l = 0.0;
    double theta_f = 0.0;
    double omega_f = 0.0;
};

struct PdCommand {
    double leader = 0.0;    ///< N·m on the leader motor
    double follower = 0.0;  ///< N·m on the follower motor
};

/**
 * Bilateral position-position PD law:
 *   T_l = Kp (theta_f - theta_l) + Kd (omega_f - omega_l)
 *   T_f = Kp (theta_l - theta_f) + Kd (omega_l - omega_f)
 * Both lines are evaluated as written; IEEE negation of a difference is exact,
 * so T_l + T_f == 0 bit for bit.
 */
inline PdCommand pd_bilateral(const ControllerSample& s, const PdGains& gains)
{
    PdCommand cmd;
    cmd.leader = gains.kp * (s.theta_f - s.theta_l) + gains.kd * (s.omega_f - s.omega_l);
    cmd.follower = gains.kp * (s.theta_l - s.theta_f) + gains.kd * (s.omega_l - s.omega_f);
    return cmd;
}

/// Symmetric saturation; an empty limit means unlimited.
inline double clamp_torque(double torque, std::optional<double> limit)
{
    if (!limit) {
        return torque;
    }
    return std::clamp(torque, -*limit, *limit);
}

/**
 * @brief First-order low-pass on a sampled signal, y += alpha (x - y).
 *
 * alpha = 1 - exp(-2 pi fc / rate). A cutoff of 0 disables the filter and
 * passes the input through unchanged.
 */
class FirstOrderLowPass {
public:
    FirstOrderLowPass() = default;
    FirstOrderLowPass(double cutoff_hz, double sample_rate_hz)
        : alpha_(cutoff_hz > 0.0 ? 1.0 - std::exp(-2.0 * std::numbers::pi * cutoff_hz / sample_rate_hz) : 1.0)
    {
    }

    double update(double x)
    {
        if (!primed_) {
            y_ = x;
            primed_ = true;
            return y_;
        }
        y_ += alpha_ * (x - y_);
        return y_;
    }

    double value() const { return y_; }

private:
    double alpha_ = 1.0;
    double y_ = 0.0;
    bool primed_ = false;
};

enum class EnvironmentKind { freespace, spring, damper, inertia, pendulum };

/**
 * @brief Virtual environment rendered on the follower by the environment motor.
 *
 * Units are SI. The default stiffness is 1 mNm/deg and the default limit is the
 * 467 mNm peak torque of the environment motor.
 */
struct EnvironmentLaw {
    EnvironmentKind kind = EnvironmentKind::freespace;
    double stiffness = 1e-3 * 180.0 / std::numbers::pi;  ///< N·m/rad
    double damping = 0.0;                                  ///< N·m·s/rad
    double inertia = 0.0;                                  ///< kg·m^2
    double pendulum_mass = 0.0;                            ///< kg
    double pendulum_length = 0.0;                          ///< m
    double torque_limit = 0.467;                           ///< N·m
    double gravity = 9.81;                                 ///< m/s^2

    bool operator==(const EnvironmentLaw&) const = default;
};

struct FollowerSample {
    double angle = 0.0;         ///< rad
    double velocity = 0.0;      ///< rad/s
    double acceleration = 0.0;  ///< rad/s^2, only used by the inertia law
};

/// Demanded environment torque before saturation (N·m).
inline double environment_demand(const EnvironmentLaw& law, const FollowerSample& s)
{
    switch (law.kind) {
    case EnvironmentKind::freespace:
        return 0.0;
    case EnvironmentKind::spring:
        return -law.stiffness * s.angle;
    case EnvironmentKind::damper:
        return -law.damping * s.velocity;
    case EnvironmentKind::inertia:
        return -law.inertia * s.acceleration;
    case EnvironmentKind::pendulum:
        return -law.pendulum_mass * law.gravity * law.pendulum_length * std::sin(s.angle);
    }
    return 0.0;
}

/// Rendered torque, clamped to +/- torque_limit. Held for one control period by the caller.
inline double render_environment(const EnvironmentLaw& law, const FollowerSample& s)
{
    return std::clamp(environment_demand(law, s), -law.torque_limit, law.torque_limit);
}

} // namespace telesim
