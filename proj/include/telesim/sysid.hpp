#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <nlohmann/json.hpp>

#include "telesim/lti.hpp"

namespace telesim {

/**
 * @brief Continuous-time model (b1 s + b0) / (s^2 + a1 s + a0).
 *
 * Input torque in mNm, output angle in deg.
 */
struct TransferFunction2 {
    double b1 = 0.0;
    double b0 = 0.0;
    double a1 = 0.0;
    double a0 = 0.0;

    bool stable() const { return a1 > 0.0 && a0 > 0.0; }

    /// Observer canonical realization: x1' = -a1 x1 + x2 + b1 u, x2' = -a0 x1 + b0 u, y = x1.
    Eigen::Matrix2d a_matrix() const { return (Eigen::Matrix2d() << -a1, 1.0, -a0, 0.0).finished(); }
    Eigen::Vector2d b_vector() const { return {b1, b0}; }

    std::complex<double> eval(std::complex<double> s) const { return (b1 * s + b0) / (s * s + a1 * s + a0); }

    bool operator==(const TransferFunction2&) const = default;
};

class UnidentifiableData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * NRMSE fit in percent: 100 (1 - ||y - y_hat|| / ||y - mean(y)||).
 * 100 means a perfect prediction; the value is unbounded below.
 */
inline double nrmse_fit(std::span<const double> y, std::span<const double> y_hat)
{
    if (y.empty() || y.size() != y_hat.size()) {
        throw std::invalid_argument("nrmse_fit: series must be non-empty and of equal length");
    }
    double mean = 0.0;
    for (double v : y) {
        mean += v;
    }
    mean /= static_cast<double>(y.size());
    double err = 0.0;
    double spread = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        err += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
        spread += (y[i] - mean) * (y[i] - mean);
    }
    if (spread == 0.0) {
        throw std::invalid_argument("nrmse_fit: undefined for a constant reference series");
    }
    return 100.0 * (1.0 - std::sqrt(err) / std::sqrt(spread));
}

namespace detail {

/// Least squares through column-scaled Householder QR.
inline Eigen::VectorXd scaled_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b)
{
    Eigen::VectorXd scale = a.colwise().norm().transpose();
    for (Eigen::Index i = 0; i < scale.size(); ++i) {
        if (scale(i) == 0.0 || !std::isfinite(scale(i))) {
            scale(i) = 1.0;
        }
    }
    const Eigen::MatrixXd scaled = a * scale.cwiseInverse().asDiagonal();
    const Eigen::VectorXd z = scaled.colPivHouseholderQr().solve(b);
    return z.cwiseQuotient(scale);
}

/// Forced response of the observer-form model plus the two unit initial-state responses.
struct ResponseBasis {
    std::vector<double> from_b1;
    std::vector<double> from_b0;
    std::vector<double> from_x1;
    std::vector<double> from_x2;
};

inline ResponseBasis response_basis(double a1, double a0, std::span<const double> u, double dt)
{
    const Eigen::Matrix2d a = (Eigen::Matrix2d() << -a1, 1.0, -a0, 0.0).finished();
    const auto m1 = lti::FohModel2::make(a, {1.0, 0.0}, dt);
    const auto m0 = lti::FohModel2::make(a, {0.0, 1.0}, dt);
    ResponseBasis basis;
    basis.from_b1 = lti::simulate_first_state(m1, u, Eigen::Vector2d::Zero());
    basis.from_b0 = lti::simulate_first_state(m0, u, Eigen::Vector2d::Zero());
    basis.from_x1 = lti::free_response_first_state(m1.phi, {1.0, 0.0}, u.size());
    basis.from_x2 = lti::free_response_first_state(m1.phi, {0.0, 1.0}, u.size());
    return basis;
}

/// For fixed denominator, the output is linear in (b1, b0, x1(0), x2(0)); solve for them.
struct ProjectedFit {
    double cost = std::numeric_limits<double>::infinity();
    double b1 = 0.0;
    double b0 = 0.0;
    Eigen::Vector2d x0 = Eigen::Vector2d::Zero();
    Eigen::VectorXd residual;
};

inline ProjectedFit project_numerator(double a1, double a0, std::span<const double> u, std::span<const double> y, double dt)
{
    const auto basis = response_basis(a1, a0, u, dt);
    const auto n = static_cast<Eigen::Index>(y.size());
    Eigen::MatrixXd g(n, 4);
    Eigen::VectorXd target(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        g(k, 0) = basis.from_b1[i];
        g(k, 1) = basis.from_b0[i];
        g(k, 2) = basis.from_x1[i];
        g(k, 3) = basis.from_x2[i];
        target(k) = y[i];
    }
    ProjectedFit out;
    if (!g.allFinite()) {
        return out;
    }
    const Eigen::VectorXd c = scaled_least_squares(g, target);
    out.b1 = c(0);
    out.b0 = c(1);
    out.x0 = {c(2), c(3)};
    out.residual = target - g * c;
    out.cost = out.residual.squaredNorm();
    if (!std::isfinite(out.cost)) {
        out.cost = std::numeric_limits<double>::infinity();
    }
    return out;
}

} // namespace detail

/// Simulated output for a given initial observer state (first-order hold between samples).
inline std::vector<double> simulate_tf(const TransferFunction2& tf, std::span<const double> u, double dt,
                                       const Eigen::Vector2d& x0 = Eigen::Vector2d::Zero())
{
    const auto m = lti::FohModel2::make(tf.a_matrix(), tf.b_vector(), dt);
    return lti::simulate_first_state(m, u, x0);
}

/**
 * @brief Model output with the initial state fitted to the measured series.
 *
 * The two initial-state components enter linearly, so they are solved by
 * least squares against y - forced response.
 */
inline std::vector<double> predict_with_initial_state(const TransferFunction2& tf, std::span<const double> u,
                                                      std::span<const double> y, double dt)
{
    if (u.size() != y.size()) {
        throw std::invalid_argument("predict: u and y differ in length");
    }
    const auto m = lti::FohModel2::make(tf.a_matrix(), tf.b_vector(), dt);
    std::vector<double> forced = lti::simulate_first_state(m, u, Eigen::Vector2d::Zero());
    const auto h1 = lti::free_response_first_state(m.phi, {1.0, 0.0}, u.size());
    const auto h2 = lti::free_response_first_state(m.phi, {0.0, 1.0}, u.size());
    const auto n = static_cast<Eigen::Index>(y.size());
    Eigen::MatrixXd h(n, 2);
    Eigen::VectorXd r(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        h(k, 0) = h1[i];
        h(k, 1) = h2[i];
        r(k) = y[i] - forced[i];
    }
    if (!h.allFinite() || !r.allFinite()) {
        return forced;
    }
    const Eigen::VectorXd x0 = detail::scaled_least_squares(h, r);
    for (std::size_t i = 0; i < forced.size(); ++i) {
        forced[i] += x0(0) * h1[i] + x0(1) * h2[i];
    }
    return forced;
}

struct FitOptions {
    double svf_cutoff_rad_s = 25.0;
    bool refine = true;
    int max_iterations = 100;
};

struct SecondOrderFit {
    TransferFunction2 tf;                  ///< refined when refinement ran and succeeded, else the LS estimate
    TransferFunction2 ls_estimate;         ///< state-variable-filter least squares
    Eigen::Vector2d initial_state = Eigen::Vector2d::Zero();
    bool refinement_enabled = true;
    bool refined = false;
    std::optional<std::string> warning;   ///< set when refinement was abandoned
    int iterations = 0;
};

namespace detail {

/**
 * Critically damped state-variable filter F(s) = lambda^2 / (s + lambda)^2.
 * Returns F x, s F x and s^2 F x sampled on the input grid.
 */
struct SvfOutputs {
    std::vector<double> d0, d1, d2;
};

inline SvfOutputs state_variable_filter(std::span<const double> x, double lambda, double dt)
{
    const Eigen::Matrix2d a = (Eigen::Matrix2d() << 0.0, 1.0, -lambda * lambda, -2.0 * lambda).finished();
    const auto m = lti::FohModel2::make(a, {0.0, lambda * lambda}, dt);
    const auto states = lti::simulate_states(m, x, Eigen::Vector2d::Zero());
    SvfOutputs out;
    out.d0.resize(x.size());
    out.d1.resize(x.size());
    out.d2.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        out.d0[k] = states[k](0);
        out.d1[k] = states[k](1);
        out.d2[k] = lambda * lambda * (x[k] - states[k](0)) - 2.0 * lambda * states[k](1);
    }
    return out;
}

inline TransferFunction2 svf_least_squares(std::span<const double> u, std::span<const double> y, double dt, double lambda)
{
    const auto yf = state_variable_filter(y, lambda, dt);
    const auto uf = state_variable_filter(u, lambda, dt);
    // Filter start-up and initial-condition terms decay like exp(-lambda t).
    auto skip = static_cast<std::size_t>(std::ceil(12.0 / (lambda * dt)));
    skip = std::min(skip, y.size() / 2);
    const auto rows = static_cast<Eigen::Index>(y.size() - skip);
    Eigen::MatrixXd phi(rows, 4);
    Eigen::VectorXd target(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto k = skip + static_cast<std::size_t>(r);
        phi(r, 0) = -yf.d1[k];
        phi(r, 1) = -yf.d0[k];
        phi(r, 2) = uf.d1[k];
        phi(r, 3) = uf.d0[k];
        target(r) = yf.d2[k];
    }
    const Eigen::VectorXd norms = phi.colwise().norm().transpose();
    if (!phi.allFinite() || !target.allFinite() || (norms.array() == 0.0).any()) {
        throw UnidentifiableData("unidentifiable data: regressor has an empty or non-finite column");
    }
    const Eigen::MatrixXd scaled = phi * norms.cwiseInverse().asDiagonal();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) < 1e-8 * sv(0)) {
        throw UnidentifiableData("unidentifiable data: regressor is rank deficient (condition " +
                                 std::to_string(sv(0) / sv(sv.size() - 1)) + ")");
    }
    const Eigen::VectorXd theta = scaled_least_squares(phi, target);
    return {theta(2), theta(3), theta(0), theta(1)};
}

} // namespace detail

/**
 * @brief Fit (b1 s + b0)/(s^2 + a1 s + a0) to sampled input u and output y.
 *
 * Two stages:
 *  1. Linear least squares on state-variable-filtered derivatives,
 *     y'' + a1 y' + a0 y = b1 u' + b0 u, which gives a consistent start.
 *  2. Output-error refinement: Gauss-Newton with Levenberg damping over the
 *     denominator (a1, a0), with the numerator and the initial state solved
 *     exactly at every iterate (variable projection). The cost is the squared
 *     error of the simulated output.
 *
 * Throws UnidentifiableData when the regressor is rank deficient. A failed
 * refinement falls back to the least-squares estimate and sets a warning.
 */
inline SecondOrderFit fit_second_order(std::span<const double> u, std::span<const double> y, double dt,
                                       const FitOptions& options = {})
{
    if (u.size() != y.size()) {
        throw std::invalid_argument("fit_second_order: u and y differ in length");
    }
    if (u.size() < 100) {
        throw std::invalid_argument("fit_second_order: need at least 100 samples");
    }
    if (!(dt > 0.0) || !(options.svf_cutoff_rad_s > 0.0)) {
        throw std::invalid_argument("fit_second_order: dt and svf cutoff must be positive");
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!std::isfinite(u[i]) || !std::isfinite(y[i])) {
            throw std::invalid_argument("fit_second_order: non-finite sample");
        }
    }

    SecondOrderFit fit;
    fit.refinement_enabled = options.refine;
    fit.ls_estimate = detail::svf_least_squares(u, y, dt, options.svf_cutoff_rad_s);
    fit.tf = fit.ls_estimate;
    if (!options.refine) {
        fit.initial_state = detail::project_numerator(fit.tf.a1, fit.tf.a0, u, y, dt).x0;
        return fit;
    }

    Eigen::Vector2d a(fit.ls_estimate.a1, fit.ls_estimate.a0);
    detail::ProjectedFit current = detail::project_numerator(a(0), a(1), u, y, dt);
    if (!std::isfinite(current.cost)) {
        fit.warning = "refinement skipped: least-squares model output is not finite";
        return fit;
    }

    const auto n = current.residual.size();
    double damping = 1e-3;
    for (int it = 0; it < options.max_iterations; ++it) {
        fit.iterations = it + 1;
        Eigen::MatrixXd jac(n, 2);
        bool jac_ok = true;
        for (int p = 0; p < 2; ++p) {
            const double h = 1e-6 * std::max(std::abs(a(p)), 1.0);
            Eigen::Vector2d plus = a, minus = a;
            plus(p) += h;
            minus(p) -= h;
            const auto rp = detail::project_numerator(plus(0), plus(1), u, y, dt);
            const auto rm = detail::project_numerator(minus(0), minus(1), u, y, dt);
            if (!std::isfinite(rp.cost) || !std::isfinite(rm.cost)) {
                jac_ok = false;
                break;
            }
            jac.col(p) = (rp.residual - rm.residual) / (2.0 * h);
        }
        if (!jac_ok) {
            break;
        }
        const Eigen::Matrix2d jtj = jac.transpose() * jac;
        const Eigen::Vector2d grad = jac.transpose() * current.residual;
        bool improved = false;
        for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
            Eigen::Matrix2d lhs = jtj;
            lhs.diagonal() += damping * jtj.diagonal().cwiseMax(1e-300);
            const Eigen::Vector2d delta = lhs.ldlt().solve(-grad);
            if (!delta.allFinite()) {
                damping *= 10.0;
                continue;
            }
            const Eigen::Vector2d trial = a + delta;
            auto candidate = detail::project_numerator(trial(0), trial(1), u, y, dt);
            if (candidate.cost < current.cost) {
                const double rel_gain = (current.cost - candidate.cost) / std::max(current.cost, 1e-300);
                const double rel_step = delta.norm() / std::max(a.norm(), 1e-12);
                a = trial;
                current = std::move(candidate);
                damping = std::max(damping / 3.0, 1e-12);
                improved = true;
                if (rel_gain < 1e-14 || rel_step < 1e-12) {
                    it = options.max_iterations;
                }
            } else {
                damping *= 4.0;
            }
        }
        if (!improved) {
            break;
        }
    }

    if (!std::isfinite(current.cost)) {
        fit.warning = "refinement diverged; returning the least-squares estimate";
        return fit;
    }
    fit.tf = {current.b1, current.b0, a(0), a(1)};
    fit.initial_state = current.x0;
    fit.refined = true;
    return fit;
}

/// Ljung-Box aggregate whiteness test plus the per-lag autocorrelation band.
struct WhitenessReport {
    int lags = 20;
    double confidence = 0.95;
    double statistic = 0.0;  ///< Q = N (N + 2) sum r_k^2 / (N - k)
    double threshold = 0.0;  ///< chi-square quantile, `lags` degrees of freedom
    double band = 0.0;       ///< per-lag two-sided band z / sqrt(N)
    std::vector<double> autocorrelations;
    int lags_outside_band = 0;
    bool pass = true;
};

inline WhitenessReport whiteness_test(std::span<const double> residuals, int lags = 20, double confidence = 0.95)
{
    if (lags <= 0 || !(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("whiteness_test: lags must be positive and confidence in (0, 1)");
    }
    const std::size_t n = residuals.size();
    if (n <= static_cast<std::size_t>(10 * lags)) {
        throw std::invalid_argument("whiteness_test: need more than 10 * lags samples");
    }
    WhitenessReport rep;
    rep.lags = lags;
    rep.confidence = confidence;
    const double nd = static_cast<double>(n);
    rep.threshold = boost::math::quantile(boost::math::chi_squared(lags), confidence);
    const double z = boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * confidence);
    rep.band = z / std::sqrt(nd);

    double mean = 0.0;
    for (double e : residuals) {
        mean += e;
    }
    mean /= nd;
    std::vector<double> centered(n);
    double c0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        centered[i] = residuals[i] - mean;
        c0 += centered[i] * centered[i];
    }
    rep.autocorrelations.assign(static_cast<std::size_t>(lags), 0.0);
    if (!(c0 > 0.0)) {
        return rep;  // a perfect model leaves nothing to correlate
    }
    double q = 0.0;
    for (int k = 1; k <= lags; ++k) {
        double ck = 0.0;
        for (std::size_t i = 0; i + static_cast<std::size_t>(k) < n; ++i) {
            ck += centered[i] * centered[i + static_cast<std::size_t>(k)];
        }
        const double r = ck / c0;
        rep.autocorrelations[static_cast<std::size_t>(k - 1)] = r;
        q += r * r / (nd - k);
        if (std::abs(r) > rep.band) {
            ++rep.lags_outside_band;
        }
    }
    rep.statistic = nd * (nd + 2.0) * q;
    rep.pass = rep.statistic < rep.threshold;
    return rep;
}

struct TfSummary {
    std::optional<double> dc_gain;            ///< deg/mNm, b0/a0
    std::optional<double> natural_frequency;  ///< rad/s, sqrt(a0)
    std::optional<double> damping_ratio;      ///< a1 / (2 sqrt(a0))
    bool stable = false;
};

inline TfSummary tf_analyze(const TransferFunction2& tf)
{
    TfSummary s;
    s.stable = tf.stable();
    if (tf.a0 != 0.0) {
        s.dc_gain = tf.b0 / tf.a0;
    }
    if (tf.a0 > 0.0) {
        s.natural_frequency = std::sqrt(tf.a0);
        s.damping_ratio = tf.a1 / (2.0 * std::sqrt(tf.a0));
    }
    return s;
}

struct BodePoint {
    double omega = 0.0;         ///< rad/s
    double magnitude_db = 0.0;
    double phase_deg = 0.0;     ///< unwrapped along the grid
};

inline std::vector<double> log_grid(double lo, double hi, std::size_t points)
{
    if (!(lo > 0.0) || !(hi > lo) || points < 2) {
        throw std::invalid_argument("log_grid: need 0 < lo < hi and at least two points");
    }
    std::vector<double> grid(points);
    const double step = std::log10(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = lo * std::pow(10.0, step * static_cast<double>(i));
    }
    grid.back() = hi;
    return grid;
}

inline std::vector<BodePoint> tf_bode(const TransferFunction2& tf, std::span<const double> omegas)
{
    std::vector<BodePoint> out;
    out.reserve(omegas.size());
    double previous = 0.0;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double w = omegas[i];
        if (!(w > 0.0)) {
            throw std::invalid_argument("tf_bode: frequencies must be positive");
        }
        const std::complex<double> jw(0.0, w);
        const std::complex<double> num = tf.b1 * jw + tf.b0;
        const std::complex<double> den = jw * jw + tf.a1 * jw + tf.a0;
        double phase = (std::arg(num) - std::arg(den)) * 180.0 / std::numbers::pi;
        if (i > 0) {
            while (phase - previous > 180.0) {
                phase -= 360.0;
            }
            while (phase - previous < -180.0) {
                phase += 360.0;
            }
        }
        previous = phase;
        out.push_back({w, 20.0 * std::log10(std::abs(num) / std::abs(den)), phase});
    }
    return out;
}

struct StepPoint {
    double time = 0.0;
    double value = 0.0;
};

/// Unit-step (1 mNm) response by RK4 on the controllable canonical realization.
inline std::vector<StepPoint> tf_step(const TransferFunction2& tf, double horizon, double dt)
{
    if (!tf.stable()) {
        throw std::domain_error("tf_step: transfer function is not stable");
    }
    if (!(horizon > 0.0) || !(dt > 0.0)) {
        throw std::invalid_argument("tf_step: horizon and dt must be positive");
    }
    // x1' = x2, x2' = -a0 x1 - a1 x2 + u, y = b0 x1 + b1 x2
    const auto rate = [&](double x1, double x2) { return std::pair{x2, -tf.a0 * x1 - tf.a1 * x2 + 1.0}; };
    const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
    std::vector<StepPoint> out;
    out.reserve(steps + 1);
    double x1 = 0.0, x2 = 0.0;
    out.push_back({0.0, 0.0});
    for (std::size_t k = 1; k <= steps; ++k) {
        const auto [k1a, k1b] = rate(x1, x2);
        const auto [k2a, k2b] = rate(x1 + 0.5 * dt * k1a, x2 + 0.5 * dt * k1b);
        const auto [k3a, k3b] = rate(x1 + 0.5 * dt * k2a, x2 + 0.5 * dt * k2b);
        const auto [k4a, k4b] = rate(x1 + dt * k3a, x2 + dt * k3b);
        x1 += dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        x2 += dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        out.push_back({static_cast<double>(k) * dt, tf.b0 * x1 + tf.b1 * x2});
    }
    return out;
}

/// Complete outcome of one identification run.
struct IdentResult {
    TransferFunction2 tf;
    TransferFunction2 ls_estimate;
    bool refinement_enabled = true;
    bool refined = false;
    std::optional<std::string> warning;
    double fit_estimation = 0.0;  ///< percent
    double fit_validation = 0.0;  ///< percent
    WhitenessReport whiteness;
    TfSummary derived;
};

inline nlohmann::json to_json(const TransferFunction2& tf)
{
    return {{"b1", tf.b1}, {"b0", tf.b0}, {"a1", tf.a1}, {"a0", tf.a0}, {"input_unit", "mNm"}, {"output_unit", "deg"}};
}

inline nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

inline nlohmann::json to_json(const TfSummary& s)
{
    return {{"dc_gain_deg_per_mNm", optional_json(s.dc_gain)},
            {"natural_frequency_rad_s", optional_json(s.natural_frequency)},
            {"damping_ratio", optional_json(s.damping_ratio)},
            {"stable", s.stable}};
}

inline nlohmann::json to_json(const WhitenessReport& w)
{
    return {{"lags", w.lags},
            {"confidence", w.confidence},
            {"statistic", w.statistic},
            {"threshold", w.threshold},
            {"band", w.band},
            {"autocorrelations", w.autocorrelations},
            {"lags_outside_band", w.lags_outside_band},
            {"pass", w.pass}};
}

inline nlohmann::json to_json(const IdentResult& r)
{
    return {{"tf", to_json(r.tf)},
            {"ls_estimate", to_json(r.ls_estimate)},
            {"refinement_enabled", r.refinement_enabled},
            {"refined", r.refined},
            {"warning", r.warning ? nlohmann::json(*r.warning) : nlohmann::json(nullptr)},
            {"fit_estimation_percent", r.fit_estimation},
            {"fit_validation_percent", r.fit_validation},
            {"whiteness", to_json(r.whiteness)},
            {"derived", to_json(r.derived)}};
}

/// Reads either a bare {"b1","b0","a1","a0"} object or any document with such an object under "tf".
inline TransferFunction2 tf_from_json(const nlohmann::json& doc)
{
    const nlohmann::json& node = (doc.is_object() && doc.contains("tf")) ? doc.at("tf") : doc;
    if (!node.is_object()) {
        throw std::invalid_argument("transfer function document must be an object");
    }
    TransferFunction2 tf;
    for (const auto& [key, field] : {std::pair{"b1", &tf.b1}, {"b0", &tf.b0}, {"a1", &tf.a1}, {"a0", &tf.a0}}) {
        if (!node.contains(key) || !node.at(key).is_number()) {
            throw std::invalid_argument(std::string("transfer function field \"") + key + "\" missing or not a number");
        }
        *field = node.at(key).get<double>();
    }
    return tf;
}

} // namespace telesim
