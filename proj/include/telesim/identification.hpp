#pragma once

#include <vector>

#include "telesim/config.hpp"
#include "telesim/excitation.hpp"
#include "telesim/plant.hpp"
#include "telesim/sysid.hpp"

namespace telesim {

struct IdentificationRun {
    IdentResult result;
    TimeSeriesLog estimation_log;
    TimeSeriesLog validation_log;
};

/**
 * @brief Two-run protocol, simulation, fit and analysis for one configuration.
 *
 * Input channel is the logged operator torque (mNm), output the leader angle
 * (deg). The model is fitted on the estimation run; the headline fit and the
 * residual whiteness test use the validation run, with the initial state
 * re-estimated there.
 */
inline IdentificationRun run_identification_logged(const PlantConfig& cfg, const ExcitationSpec& excitation)
{
    const PlantConfig valid = validate_config(cfg);
    const TwoRunProtocol protocol = protocol_two_chirps(excitation);
    IdentificationRun run;
    run.estimation_log = simulate_kinematic(valid, protocol.estimation.excitation, protocol.estimation.noise_stream);
    run.validation_log = simulate_kinematic(valid, protocol.validation.excitation, protocol.validation.noise_stream);

    const double dt = 1.0 / valid.control_rate_hz;
    const auto& id = valid.identification;
    const SecondOrderFit fit = fit_second_order(run.estimation_log.t_op_mnm, run.estimation_log.theta_l_deg, dt,
                                                {id.svf_cutoff_rad_s, id.refine, 100});
    IdentResult& r = run.result;
    r.tf = fit.tf;
    r.ls_estimate = fit.ls_estimate;
    r.refinement_enabled = fit.refinement_enabled;
    r.refined = fit.refined;
    r.warning = fit.warning;

    const auto est_pred = predict_with_initial_state(fit.tf, run.estimation_log.t_op_mnm, run.estimation_log.theta_l_deg, dt);
    r.fit_estimation = nrmse_fit(run.estimation_log.theta_l_deg, est_pred);
    const auto val_pred = predict_with_initial_state(fit.tf, run.validation_log.t_op_mnm, run.validation_log.theta_l_deg, dt);
    r.fit_validation = nrmse_fit(run.validation_log.theta_l_deg, val_pred);

    std::vector<double> residuals(val_pred.size());
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        residuals[i] = run.validation_log.theta_l_deg[i] - val_pred[i];
    }
    r.whiteness = whiteness_test(residuals, id.whiteness_lags, id.confidence);
    r.derived = tf_analyze(fit.tf);
    return run;
}

inline IdentResult run_identification(const PlantConfig& cfg, const ExcitationSpec& excitation)
{
    return run_identification_logged(cfg, excitation).result;
}

inline IdentResult run_identification(const PlantConfig& cfg, const ChirpSpec& chirp)
{
    return run_identification(cfg, make_chirp(chirp));
}

inline IdentResult run_identification(const PlantConfig& cfg) { return run_identification(cfg, cfg.excitation); }

} // namespace telesim
