#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <numbers>
#include <string>
#include <utility>

#include "telesim/config.hpp"
#include "telesim/control.hpp"
#include "telesim/excitation.hpp"
#include "telesim/random.hpp"
#include "telesim/timeseries.hpp"
#include "telesim/units.hpp"

namespace telesim {

/**
 * @brief Mechanical coupling between leader and follower.
 *
 * Constants in SI. The rigid kind is a kinematic constraint handled by the
 * integrator, and the electromechanical kind couples only through the motors,
 * so both produce no transmission torque here.
 */
struct TransmissionLaw {
    TransmissionKind kind = TransmissionKind::rigid;
    double elastic_stiffness = 0.0;  ///< k_e, N·m/rad
    double elastic_damping = 0.0;    ///< c_ve, N·m·s/rad, parallel to the rod
    double damper = 0.0;             ///< c_d, N·m·s/rad

    static TransmissionLaw from_config(const PlantConfig& cfg)
    {
        return {cfg.transmission, cfg.elastic_stiffness(), cfg.elastic_parallel_damping, cfg.damper_coefficient};
    }
};

/// Torque the transmission applies to the follower for dtheta = theta_l - theta_f, domega = omega_l - omega_f.
/// The leader receives the reaction -tau.
inline double transmission_torque(const TransmissionLaw& law, double dtheta, double domega)
{
    switch (law.kind) {
    case TransmissionKind::elastic:
        return law.elastic_stiffness * dtheta + law.elastic_damping * domega;
    case TransmissionKind::damped:
        return law.damper * domega;
    case TransmissionKind::combined:
        return law.elastic_stiffness * dtheta + (law.elastic_damping + law.damper) * domega;
    case TransmissionKind::rigid:
    case TransmissionKind::electromechanical:
        return 0.0;
    }
    return 0.0;
}

/// Validated config plus the quantities the integrator needs on every call.
struct PlantModel {
    PlantConfig cfg;
    TransmissionLaw law;

    explicit PlantModel(PlantConfig c) : cfg(validate_config(std::move(c))), law(TransmissionLaw::from_config(cfg)) {}

    bool rigid() const { return cfg.transmission == TransmissionKind::rigid; }
    bool electromechanical() const { return cfg.transmission == TransmissionKind::electromechanical; }
    double integrator_step() const { return cfg.integrator_step_s; }
};

struct PlantState {
    double theta_l = 0.0;  ///< rad
    double omega_l = 0.0;  ///< rad/s
    double theta_f = 0.0;
    double omega_f = 0.0;

    // Zero-order-hold torques, N·m, refreshed once per control period.
    double leader_cmd = 0.0;
    double follower_cmd = 0.0;
    double env_hold = 0.0;

    // Encoder history for backward differences.
    bool has_previous = false;
    double prev_theta_l = 0.0;
    double prev_theta_f = 0.0;
    double prev_omega_f = 0.0;

    std::int64_t tick = 0;  ///< integrator steps taken
    double time = 0.0;      ///< s, tick * integrator_step
};

struct StateRates {
    double theta_l = 0.0;
    double omega_l = 0.0;
    double theta_f = 0.0;
    double omega_f = 0.0;
};

/// Angular accelerations (leader, follower) for the given positions/velocities and held torques.
inline std::pair<double, double> accelerations(const PlantModel& m, double theta_l, double omega_l, double theta_f,
                                               double omega_f, const PlantState& held, double operator_torque)
{
    const auto& c = m.cfg;
    if (m.rigid()) {
        const double inertia = c.leader_inertia + c.follower_inertia;
        const double viscous = c.leader_viscous + c.follower_viscous;
        const double a = (operator_torque - viscous * omega_l + held.env_hold + held.leader_cmd + held.follower_cmd) / inertia;
        return {a, a};
    }
    const double tau = transmission_torque(m.law, theta_l - theta_f, omega_l - omega_f);
    const double a_l = (operator_torque - c.leader_viscous * omega_l - tau + held.leader_cmd) / c.leader_inertia;
    const double a_f = (tau - c.follower_viscous * omega_f + held.env_hold + held.follower_cmd) / c.follower_inertia;
    return {a_l, a_f};
}

/**
 * Equations of motion of the two-inertia model:
 *   J_l w_l' = T_op - b_l w_l - tau + T_l_cmd
 *   J_f w_f' = tau - b_f w_f + T_env + T_f_cmd
 * The rigid transmission collapses to a single body with J = J_l + J_f, b = b_l + b_f.
 */
inline StateRates derivatives(const PlantState& s, double operator_torque, const PlantModel& m)
{
    const auto [a_l, a_f] = accelerations(m, s.theta_l, s.omega_l, s.theta_f, s.omega_f, s, operator_torque);
    return {s.omega_l, a_l, m.rigid() ? s.omega_l : s.omega_f, a_f};
}

class SimulationDiverged : public std::runtime_error {
public:
    explicit SimulationDiverged(double t)
        : std::runtime_error("simulation diverged at t=" + std::to_string(t) + " s"), time_(t)
    {
    }
    double time() const { return time_; }

private:
    double time_;
};

namespace detail {

inline void check_finite_state(const PlantState& s)
{
    constexpr double kLimit = 1e12;
    for (double v : {s.theta_l, s.omega_l, s.theta_f, s.omega_f}) {
        if (!std::isfinite(v) || std::abs(v) > kLimit) {
            throw SimulationDiverged(s.time);
        }
    }
}

inline void advance_clock(PlantState& s, const PlantModel& m)
{
    ++s.tick;
    s.time = static_cast<double>(s.tick) * m.integrator_step();
}

} // namespace detail

/**
 * @brief One RK4 step of integrator_step with both bodies free.
 *
 * operator_torque(t) gives the external leader torque in N·m; held torques stay
 * constant over the step. The rigid constraint is re-imposed by assignment.
 */
template <typename TorqueFn>
PlantState step(const PlantState& s, const PlantModel& m, TorqueFn&& operator_torque)
{
    const double h = m.integrator_step();
    const double t = s.time;
    auto eval = [&](double tt, double th_l, double om_l, double th_f, double om_f) {
        const auto [a_l, a_f] = accelerations(m, th_l, om_l, th_f, om_f, s, operator_torque(tt));
        return StateRates{om_l, a_l, om_f, a_f};
    };
    const StateRates k1 = eval(t, s.theta_l, s.omega_l, s.theta_f, s.omega_f);
    const StateRates k2 = eval(t + 0.5 * h, s.theta_l + 0.5 * h * k1.theta_l, s.omega_l + 0.5 * h * k1.omega_l,
                               s.theta_f + 0.5 * h * k1.theta_f, s.omega_f + 0.5 * h * k1.omega_f);
    const StateRates k3 = eval(t + 0.5 * h, s.theta_l + 0.5 * h * k2.theta_l, s.omega_l + 0.5 * h * k2.omega_l,
                               s.theta_f + 0.5 * h * k2.theta_f, s.omega_f + 0.5 * h * k2.omega_f);
    const StateRates k4 = eval(t + h, s.theta_l + h * k3.theta_l, s.omega_l + h * k3.omega_l, s.theta_f + h * k3.theta_f,
                               s.omega_f + h * k3.omega_f);
    PlantState next = s;
    next.theta_l += h / 6.0 * (k1.theta_l + 2.0 * k2.theta_l + 2.0 * k3.theta_l + k4.theta_l);
    next.omega_l += h / 6.0 * (k1.omega_l + 2.0 * k2.omega_l + 2.0 * k3.omega_l + k4.omega_l);
    if (m.rigid()) {
        next.theta_f = next.theta_l;
        next.omega_f = next.omega_l;
    } else {
        next.theta_f += h / 6.0 * (k1.theta_f + 2.0 * k2.theta_f + 2.0 * k3.theta_f + k4.theta_f);
        next.omega_f += h / 6.0 * (k1.omega_f + 2.0 * k2.omega_f + 2.0 * k3.omega_f + k4.omega_f);
    }
    detail::advance_clock(next, m);
    detail::check_finite_state(next);
    return next;
}

/**
 * @brief One RK4 step with the leader prescribed by trajectory(t).
 *
 * Only the follower is integrated; the leader is read from the analytic
 * trajectory at every stage time, and in rigid mode the follower is too.
 */
template <typename Trajectory>
PlantState step_kinematic(const PlantState& s, const PlantModel& m, Trajectory&& trajectory)
{
    const double h = m.integrator_step();
    PlantState next = s;
    detail::advance_clock(next, m);
    const auto leader_end = trajectory(next.time);
    if (m.rigid()) {
        next.theta_l = next.theta_f = leader_end.angle;
        next.omega_l = next.omega_f = leader_end.velocity;
        return next;
    }
    const auto follower_acc = [&](double tt, double th_f, double om_f) {
        const auto lead = trajectory(tt);
        return accelerations(m, lead.angle, lead.velocity, th_f, om_f, s, 0.0).second;
    };
    const double t = s.time;
    const double mid = t + 0.5 * h;
    const double v1 = s.omega_f;
    const double a1 = follower_acc(t, s.theta_f, v1);
    const double v2 = s.omega_f + 0.5 * h * a1;
    const double a2 = follower_acc(mid, s.theta_f + 0.5 * h * v1, v2);
    const double v3 = s.omega_f + 0.5 * h * a2;
    const double a3 = follower_acc(mid, s.theta_f + 0.5 * h * v2, v3);
    const double v4 = s.omega_f + h * a3;
    const double a4 = follower_acc(next.time, s.theta_f + h * v3, v4);
    next.theta_f = s.theta_f + h / 6.0 * (v1 + 2.0 * v2 + 2.0 * v3 + v4);
    next.omega_f = s.omega_f + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    next.theta_l = leader_end.angle;
    next.omega_l = leader_end.velocity;
    detail::check_finite_state(next);
    return next;
}

/// Sensed sample for one control tick (rad, rad/s, rad/s^2).
struct SensorSample {
    double theta_l = 0.0;
    double theta_f = 0.0;
    double omega_l = 0.0;  ///< backward difference of sensed angles
    double omega_f = 0.0;
    double alpha_f = 0.0;  ///< second backward difference, for the inertia environment
};

/// Encoder quantization: floor onto the 2 pi / counts_per_rev grid.
inline double quantize_angle(double angle, int counts_per_rev)
{
    const double resolution = 2.0 * std::numbers::pi / counts_per_rev;
    return std::floor(angle / resolution) * resolution;
}

/**
 * @brief Simulated sensing chain.
 *
 * Optional encoder quantization, then additive Gaussian noise, then backward
 * differences against the previous sensed angles held in the state. On the
 * very first sample there is no history and the differenced velocities are 0.
 */
inline SensorSample measure(const PlantState& s, const PlantConfig& cfg, NoiseStream& noise)
{
    SensorSample out;
    const double angle_std = units::deg_to_rad(cfg.noise.angle_deg);
    auto sense = [&](double angle) {
        const double q = cfg.quantize_encoders ? quantize_angle(angle, cfg.encoder_counts_per_rev) : angle;
        return q + noise.gaussian(angle_std);
    };
    out.theta_l = sense(s.theta_l);
    out.theta_f = sense(s.theta_f);
    if (s.has_previous) {
        out.omega_l = (out.theta_l - s.prev_theta_l) * cfg.control_rate_hz;
        out.omega_f = (out.theta_f - s.prev_theta_f) * cfg.control_rate_hz;
        out.alpha_f = (out.omega_f - s.prev_omega_f) * cfg.control_rate_hz;
    }
    return out;
}

namespace detail {

/// Shared 1 kHz loop: sense, compute held torques, log, integrate decimation substeps.
template <typename Driver>
TimeSeriesLog run_control_loop(const PlantModel& m, double duration, std::uint64_t noise_stream, Driver& driver)
{
    const auto& cfg = m.cfg;
    const auto ticks = static_cast<std::int64_t>(std::llround(duration * cfg.control_rate_hz));
    NoiseStream noise(cfg.seed, noise_stream);
    FirstOrderLowPass filter_l(cfg.derivative_filter_cutoff_hz, cfg.control_rate_hz);
    FirstOrderLowPass filter_f(cfg.derivative_filter_cutoff_hz, cfg.control_rate_hz);
    const double torque_std_nm = units::mnm_to_nm(cfg.noise.torque_mnm);

    PlantState state = driver.initial_state();
    TimeSeriesLog log;
    log.reserve(static_cast<std::size_t>(ticks + 1));

    for (std::int64_t k = 0;; ++k) {
        const SensorSample sensed = measure(state, cfg, noise);
        if (m.electromechanical()) {
            const ControllerSample cs{sensed.theta_l, filter_l.update(sensed.omega_l), sensed.theta_f,
                                      filter_f.update(sensed.omega_f)};
            const PdCommand cmd = pd_bilateral(cs, cfg.gains);
            state.leader_cmd = clamp_torque(cmd.leader, cfg.leader_motor_limit);
            state.follower_cmd = clamp_torque(cmd.follower, cfg.follower_motor_limit);
        }
        state.env_hold = render_environment(cfg.environment, {sensed.theta_f, sensed.omega_f, sensed.alpha_f});
        state.has_previous = true;
        state.prev_theta_l = sensed.theta_l;
        state.prev_theta_f = sensed.theta_f;
        state.prev_omega_f = sensed.omega_f;

        const double t_k = static_cast<double>(k) / cfg.control_rate_hz;
        const double t_op = driver.operator_torque(state, t_k);
        log.time_s.push_back(t_k);
        log.theta_l_deg.push_back(units::rad_to_deg(sensed.theta_l));
        log.theta_f_deg.push_back(units::rad_to_deg(sensed.theta_f));
        log.omega_l_deg_s.push_back(units::rad_to_deg(state.omega_l));
        log.omega_f_deg_s.push_back(units::rad_to_deg(state.omega_f));
        log.t_op_mnm.push_back(units::nm_to_mnm(t_op + noise.gaussian(torque_std_nm)));
        log.t_env_mnm.push_back(units::nm_to_mnm(state.env_hold + noise.gaussian(torque_std_nm)));
        log.t_l_cmd_mnm.push_back(units::nm_to_mnm(state.leader_cmd));
        log.t_f_cmd_mnm.push_back(units::nm_to_mnm(state.follower_cmd));

        if (k == ticks) {
            break;
        }
        for (int j = 0; j < cfg.decimation; ++j) {
            state = driver.advance(state);
        }
        // Re-anchor the clock on the control grid so rounding never accumulates.
        state.tick = (k + 1) * cfg.decimation;
        state.time = static_cast<double>(k + 1) / cfg.control_rate_hz;
    }
    return log;
}

template <typename Trajectory>
struct KinematicDriver {
    const PlantModel& m;
    Trajectory trajectory;
    double duration;

    TrajectorySample at(double t) const { return trajectory(std::clamp(t, 0.0, duration)); }

    PlantState initial_state() const
    {
        PlantState s;
        const auto lead = at(0.0);
        s.theta_l = s.theta_f = lead.angle;
        s.omega_l = s.omega_f = lead.velocity;
        return s;
    }

    PlantState advance(const PlantState& s) const
    {
        return step_kinematic(s, m, [this](double t) { return at(t); });
    }

    /// Leader torque balance solved for the operator torque that realizes the prescribed motion.
    double operator_torque(const PlantState& s, double t) const
    {
        const auto lead = at(t);
        const auto& c = m.cfg;
        if (m.rigid()) {
            return (c.leader_inertia + c.follower_inertia) * lead.acceleration +
                   (c.leader_viscous + c.follower_viscous) * lead.velocity - s.env_hold - s.leader_cmd - s.follower_cmd;
        }
        const double tau = transmission_torque(m.law, lead.angle - s.theta_f, lead.velocity - s.omega_f);
        return c.leader_inertia * lead.acceleration + c.leader_viscous * lead.velocity + tau - s.leader_cmd;
    }
};

template <typename TorqueFn>
struct TorqueDriver {
    const PlantModel& m;
    TorqueFn torque;
    PlantState initial;

    PlantState initial_state() const
    {
        PlantState s = initial;
        if (m.rigid()) {
            s.theta_f = s.theta_l;
            s.omega_f = s.omega_l;
        }
        return s;
    }
    PlantState advance(const PlantState& s) const { return step(s, m, torque); }
    double operator_torque(const PlantState&, double t) const { return torque(t); }
};

} // namespace detail

/**
 * @brief Drive the leader along a prescribed trajectory and log the run at the control rate.
 *
 * The operator torque column is the leader constraint residual
 * T_op = J_l a_l + b_l w_l + tau - T_l_cmd. The follower starts co-located
 * and co-moving with the leader. Sample count is duration * rate + 1.
 */
template <typename Trajectory>
TimeSeriesLog simulate_kinematic(const PlantConfig& cfg, Trajectory trajectory, double duration,
                                 std::uint64_t noise_stream = 0)
{
    const PlantModel model(cfg);
    detail::KinematicDriver<Trajectory> driver{model, std::move(trajectory), duration};
    return detail::run_control_loop(model, duration, noise_stream, driver);
}

inline TimeSeriesLog simulate_kinematic(const PlantConfig& cfg, const ExcitationSpec& excitation,
                                        std::uint64_t noise_stream = 0)
{
    excitation.validate();
    return simulate_kinematic(cfg, [excitation](double t) { return excitation.eval(t); }, excitation.duration_s(),
                              noise_stream);
}

/// Both bodies free; the leader is pushed by operator_torque(t) in N·m.
template <typename TorqueFn>
TimeSeriesLog simulate_torque(const PlantConfig& cfg, TorqueFn operator_torque, double duration,
                              const PlantState& initial = {}, std::uint64_t noise_stream = 0)
{
    const PlantModel model(cfg);
    detail::TorqueDriver<TorqueFn> driver{model, std::move(operator_torque), initial};
    return detail::run_control_loop(model, duration, noise_stream, driver);
}

} // namespace telesim
