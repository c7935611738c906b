#pragma once

// Test-side audits of the plant integrator.

#include <algorithm>
#include <cmath>
#include <vector>

#include "telesim/plant.hpp"

namespace audit {

struct EnergyBalance {
    double injected = 0.0;           ///< integral of T_op w_l
    double injected_positive = 0.0;  ///< integral of max(T_op w_l, 0)
    double dissipated = 0.0;
    double stored_change = 0.0;
    double min_damper_power = 0.0;

    double residual() const { return std::abs(stored_change - (injected - dissipated)); }
    double relative_residual() const { return residual() / injected_positive; }
};

/**
 * Energy bookkeeping over a kinematically driven run with no controller or
 * environment torques (mechanical transmission, free space). The operator torque
 * is recomputed here from the leader balance J_l a_l + b_l w_l + tau.
 */
inline EnergyBalance energy_audit(const telesim::PlantConfig& cfg, const telesim::ExcitationSpec& exc)
{
    using namespace telesim;
    const PlantModel m(cfg);
    const double k = (cfg.transmission == TransmissionKind::elastic || cfg.transmission == TransmissionKind::combined)
                         ? cfg.elastic_stiffness()
                         : 0.0;
    double c = 0.0;
    if (cfg.transmission == TransmissionKind::damped || cfg.transmission == TransmissionKind::combined) {
        c += cfg.damper_coefficient;
    }
    if (cfg.transmission == TransmissionKind::elastic || cfg.transmission == TransmissionKind::combined) {
        c += cfg.elastic_parallel_damping;
    }
    const double duration = exc.duration_s();
    const auto traj = [&](double t) { return exc.eval(std::clamp(t, 0.0, duration)); };

    auto stored = [&](const PlantState& s) {
        const double d = s.theta_l - s.theta_f;
        return 0.5 * cfg.leader_inertia * s.omega_l * s.omega_l + 0.5 * cfg.follower_inertia * s.omega_f * s.omega_f +
               0.5 * k * d * d;
    };
    auto input_power = [&](const PlantState& s) {
        const auto lead = traj(s.time);
        const double tau = k * (lead.angle - s.theta_f) + c * (lead.velocity - s.omega_f);
        const double t_op = cfg.leader_inertia * lead.acceleration + cfg.leader_viscous * lead.velocity + tau;
        return t_op * lead.velocity;
    };
    auto damper_power = [&](const PlantState& s) {
        const double dw = s.omega_l - s.omega_f;
        return c * dw * dw;
    };
    auto loss_power = [&](const PlantState& s) {
        return cfg.leader_viscous * s.omega_l * s.omega_l + cfg.follower_viscous * s.omega_f * s.omega_f + damper_power(s);
    };

    PlantState s;
    const auto start = traj(0.0);
    s.theta_l = s.theta_f = start.angle;
    s.omega_l = s.omega_f = start.velocity;
    EnergyBalance out;
    const double e0 = stored(s);
    const double h = cfg.integrator_step_s;
    const auto steps = static_cast<long>(std::llround(duration / h));
    double p_prev = input_power(s);
    double l_prev = loss_power(s);
    out.min_damper_power = damper_power(s);
    for (long i = 0; i < steps; ++i) {
        s = step_kinematic(s, m, traj);
        const double p = input_power(s);
        const double l = loss_power(s);
        out.injected += 0.5 * h * (p + p_prev);
        out.injected_positive += 0.5 * h * (std::max(p, 0.0) + std::max(p_prev, 0.0));
        out.dissipated += 0.5 * h * (l + l_prev);
        out.min_damper_power = std::min(out.min_damper_power, damper_power(s));
        p_prev = p;
        l_prev = l;
    }
    out.stored_change = stored(s) - e0;
    return out;
}

inline telesim::TimeSeriesLog run_with_step(telesim::PlantConfig cfg, const telesim::ExcitationSpec& exc, double h)
{
    cfg.integrator_step_s = h;
    return telesim::simulate_kinematic(telesim::validate_config(cfg), exc);
}

/// Max follower-angle deviation (deg) between two runs on the same control grid.
inline double max_follower_error(const telesim::TimeSeriesLog& a, const telesim::TimeSeriesLog& b)
{
    double err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        err = std::max(err, std::abs(a.theta_f_deg[i] - b.theta_f_deg[i]));
    }
    return err;
}

/// Observed convergence orders log2(e(h) / e(h/2)) over successive halvings, errors against a run at h_ref.
inline std::vector<double> convergence_orders(const telesim::PlantConfig& cfg, const telesim::ExcitationSpec& exc,
                                              const std::vector<double>& steps, double h_ref)
{
    const auto reference = run_with_step(cfg, exc, h_ref);
    std::vector<double> errors;
    for (double h : steps) {
        errors.push_back(max_follower_error(run_with_step(cfg, exc, h), reference));
    }
    std::vector<double> orders;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        orders.push_back(std::log2(errors[i] / errors[i + 1]));
    }
    return orders;
}

} // namespace audit
