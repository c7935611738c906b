#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "telesim/units.hpp"

namespace telesim {

/// Angle, velocity and acceleration of a prescribed trajectory (SI).
struct TrajectorySample {
    double angle = 0.0;         ///< rad
    double velocity = 0.0;      ///< rad/s
    double acceleration = 0.0;  ///< rad/s^2
};

/**
 * @brief Linear chirp theta(t) = A sin(phi(t)), phi(t) = 2 pi (f0 t + (f1 - f0) t^2 / (2T)).
 *
 * Sine phase so the trajectory leaves the neutral position at zero angle.
 * A constant-frequency sine is the degenerate case f0 == f1.
 */
struct ChirpSpec {
    double amplitude_deg = 90.0;
    double f0_hz = 0.1;
    double f1_hz = 2.0;
    double duration_s = 20.0;

    void validate() const
    {
        if (!(amplitude_deg > 0.0) || !std::isfinite(amplitude_deg)) {
            throw std::invalid_argument("chirp amplitude must be positive");
        }
        if (!(f0_hz > 0.0) || !(f1_hz >= f0_hz) || !std::isfinite(f1_hz)) {
            throw std::invalid_argument("chirp frequencies must satisfy 0 < f0 <= f1");
        }
        if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
            throw std::invalid_argument("chirp duration must be positive");
        }
    }

    double sweep_rate() const { return (f1_hz - f0_hz) / duration_s; }  ///< Hz/s

    double phase(double t) const { return 2.0 * std::numbers::pi * (f0_hz * t + 0.5 * sweep_rate() * t * t); }

    double instantaneous_frequency(double t) const { return f0_hz + sweep_rate() * t; }

    /// Times at which the phase completes whole cycles, starting with 0 and ending at (or just before) T.
    std::vector<double> cycle_boundaries() const
    {
        std::vector<double> times{0.0};
        const double r = sweep_rate();
        for (int k = 1;; ++k) {
            // f0 t + r t^2 / 2 = k
            const double t = (r == 0.0) ? k / f0_hz : (-f0_hz + std::sqrt(f0_hz * f0_hz + 2.0 * r * k)) / r;
            if (t > duration_s * (1.0 + 1e-12)) {
                break;
            }
            times.push_back(std::min(t, duration_s));
        }
        return times;
    }

    bool operator==(const ChirpSpec&) const = default;
};

/// Evaluate the chirp and its exact derivatives at t in [0, T].
inline TrajectorySample chirp_eval(const ChirpSpec& spec, double t)
{
    if (!(t >= 0.0 && t <= spec.duration_s)) {
        throw std::out_of_range("chirp_eval: t=" + std::to_string(t) + " outside [0, " + std::to_string(spec.duration_s) + "]");
    }
    const double amp = units::deg_to_rad(spec.amplitude_deg);
    const double phi = spec.phase(t);
    const double phi_dot = 2.0 * std::numbers::pi * spec.instantaneous_frequency(t);
    const double phi_ddot = 2.0 * std::numbers::pi * spec.sweep_rate();
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    return {amp * s, amp * c * phi_dot, amp * (c * phi_ddot - s * phi_dot * phi_dot)};
}

enum class ExcitationKind { chirp, sine, step };

/**
 * @brief Any of the analytic leader trajectories.
 *
 * The step is a quintic (minimum-jerk) ramp from 0 to the amplitude over
 * rise_time_s, so that the kinematic drive still sees finite, exact
 * velocity and acceleration.
 */
struct ExcitationSpec {
    ExcitationKind kind = ExcitationKind::chirp;
    ChirpSpec chirp{};
    double rise_time_s = 0.2;  ///< step only

    double duration_s() const { return chirp.duration_s; }

    void validate() const
    {
        chirp.validate();
        if (kind == ExcitationKind::sine && chirp.f1_hz != chirp.f0_hz) {
            throw std::invalid_argument("sine excitation requires f1_hz == f0_hz");
        }
        if (kind == ExcitationKind::step && (!(rise_time_s > 0.0) || rise_time_s > chirp.duration_s)) {
            throw std::invalid_argument("step rise time must lie in (0, duration]");
        }
    }

    TrajectorySample eval(double t) const
    {
        if (kind != ExcitationKind::step) {
            return chirp_eval(chirp, t);
        }
        if (!(t >= 0.0 && t <= chirp.duration_s)) {
            throw std::out_of_range("step excitation: t outside [0, duration]");
        }
        const double amp = units::deg_to_rad(chirp.amplitude_deg);
        if (t >= rise_time_s) {
            return {amp, 0.0, 0.0};
        }
        const double tau = t / rise_time_s;
        const double tau2 = tau * tau;
        const double pos = tau2 * tau * (10.0 - 15.0 * tau + 6.0 * tau2);
        const double vel = 30.0 * tau2 * (1.0 - 2.0 * tau + tau2) / rise_time_s;
        const double acc = 60.0 * tau * (1.0 - 3.0 * tau + 2.0 * tau2) / (rise_time_s * rise_time_s);
        return {amp * pos, amp * vel, amp * acc};
    }

    bool operator==(const ExcitationSpec&) const = default;
};

inline ExcitationSpec make_chirp(const ChirpSpec& spec) { return {ExcitationKind::chirp, spec, 0.2}; }

/// One excitation run of the identification protocol.
struct ProtocolRun {
    ExcitationSpec excitation;
    std::uint64_t noise_stream = 0;  ///< selects an independent measurement-noise stream
    std::string label;
};

struct TwoRunProtocol {
    ProtocolRun estimation;
    ProtocolRun validation;
};

/**
 * @brief Estimation and validation runs of the same excitation.
 *
 * Both runs replay the identical trajectory; they only differ in the
 * measurement-noise stream they draw from. Without noise the two logs are
 * therefore bit-identical.
 */
inline TwoRunProtocol protocol_two_chirps(const ExcitationSpec& spec)
{
    spec.validate();
    return {{spec, 0, "estimation"}, {spec, 1, "validation"}};
}

inline TwoRunProtocol protocol_two_chirps(const ChirpSpec& spec)
{
    const auto kind = spec.f0_hz == spec.f1_hz ? ExcitationKind::sine : ExcitationKind::chirp;
    return protocol_two_chirps(ExcitationSpec{kind, spec, 0.2});
}

} // namespace telesim
