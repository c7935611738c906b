#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "support/oracles.hpp"
#include "telesim/sysid.hpp"

using namespace telesim;

namespace {

constexpr double kDt = 1e-3;

const TransferFunction2 kRigidSpring{-2.04, 163.26, 4.19, 195.11};
const TransferFunction2 kEmFreespace{-2.7, 174.31, 6.08, 48.88};

struct Dataset {
    std::vector<double> u;
    std::vector<double> y;
};

Dataset chirp_data(const TransferFunction2& tf, double amplitude = 10.0)
{
    const auto u_fn = [amplitude](double t) { return oracle::chirp_torque(t, amplitude); };
    return {oracle::sample(u_fn, 20.0, kDt), oracle::tf_response(tf, u_fn, 20.0, kDt)};
}

void expect_coefficients_near(const TransferFunction2& got, const TransferFunction2& want, double rel)
{
    EXPECT_LT(oracle::rel_err(got.b1, want.b1), rel) << "b1 " << got.b1 << " vs " << want.b1;
    EXPECT_LT(oracle::rel_err(got.b0, want.b0), rel) << "b0 " << got.b0 << " vs " << want.b0;
    EXPECT_LT(oracle::rel_err(got.a1, want.a1), rel) << "a1 " << got.a1 << " vs " << want.a1;
    EXPECT_LT(oracle::rel_err(got.a0, want.a0), rel) << "a0 " << got.a0 << " vs " << want.a0;
}

} // namespace

TEST(FitMetric, PerfectPredictionScoresHundred)
{
    const std::vector<double> y{1.0, 3.0, -2.0, 5.0};
    EXPECT_DOUBLE_EQ(nrmse_fit(y, y), 100.0);
}

TEST(FitMetric, MeanPredictionScoresZero)
{
    const std::vector<double> y{1.0, 3.0, -2.0, 6.0};
    const std::vector<double> m(4, 2.0);
    EXPECT_NEAR(nrmse_fit(y, m), 0.0, 1e-12);
}

TEST(FitMetric, HandEvaluatedCase)
{
    const std::vector<double> y{0.0, 1.0, 2.0};
    const std::vector<double> yh{0.0, 1.0, 3.0};
    EXPECT_NEAR(nrmse_fit(y, yh), 100.0 * (1.0 - 1.0 / std::sqrt(2.0)), 1e-12);
    EXPECT_NEAR(nrmse_fit(y, yh), 29.29, 5e-3);
}

TEST(FitMetric, DegenerateInputsThrow)
{
    const std::vector<double> c(5, 1.0);
    EXPECT_THROW(nrmse_fit(c, c), std::invalid_argument);
    const std::vector<double> a{1.0, 2.0};
    const std::vector<double> b{1.0};
    EXPECT_THROW(nrmse_fit(a, b), std::invalid_argument);
}

TEST(FitMetric, NoiseOnPredictionLowersFit)
{
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n01;
    std::vector<double> y(2000), yh(2000);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = std::sin(0.01 * static_cast<double>(i)) + 0.3 * std::cos(0.07 * static_cast<double>(i));
        yh[i] = 0.9 * y[i];
    }
    const double clean = nrmse_fit(y, yh);
    double mean_noisy = 0.0;
    int lowered = 0;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
        rng.seed(static_cast<std::uint64_t>(s));
        std::vector<double> noisy = yh;
        for (double& v : noisy) {
            v += 0.05 * n01(rng);
        }
        const double f = nrmse_fit(y, noisy);
        mean_noisy += f / seeds;
        lowered += f <= clean;
    }
    EXPECT_LT(mean_noisy, clean);
    EXPECT_GE(lowered, seeds * 99 / 100);
}

TEST(Lti, FirstOrderHoldIsExactForPiecewiseLinearInput)
{
    // Ramp input; reference by fine RK4 on the same ramp.
    const TransferFunction2 tf{1.5, 40.0, 3.0, 90.0};
    const auto u_fn = [](double t) { return 2.0 * t; };
    const auto u = oracle::sample(u_fn, 2.0, kDt);
    const auto want = oracle::tf_response(tf, u_fn, 2.0, kDt, 50);
    const auto got = simulate_tf(tf, u, kDt);
    for (std::size_t i = 0; i < got.size(); ++i) {
        ASSERT_NEAR(got[i], want[i], 1e-10) << i;
    }
}

TEST(Identification, RecoversPublishedRigidSpringModel)
{
    const auto d = chirp_data(kRigidSpring);
    const auto fit = fit_second_order(d.u, d.y, kDt);
    EXPECT_TRUE(fit.refined);
    expect_coefficients_near(fit.tf, kRigidSpring, 0.01);
}

TEST(Identification, LeastSquaresAloneIsClose)
{
    const auto d = chirp_data(kRigidSpring);
    const auto fit = fit_second_order(d.u, d.y, kDt, {25.0, false, 100});
    EXPECT_FALSE(fit.refined);
    EXPECT_FALSE(fit.refinement_enabled);
    expect_coefficients_near(fit.tf, kRigidSpring, 0.05);
}

TEST(Identification, ConstantDataIsUnidentifiable)
{
    const std::vector<double> u(5000, 1.0), y(5000, 2.0);
    EXPECT_THROW(fit_second_order(u, y, kDt), UnidentifiableData);
}

TEST(Identification, SpringWithSmallInertiaHasUnitDcGain)
{
    // J theta'' + c theta' + K theta = u with K = 1 mNm/deg, in deg / mNm.
    const double j = 0.002, c = 0.02, k = 1.0;
    const TransferFunction2 truth{0.0, 1.0 / j, c / j, k / j};
    const auto d = chirp_data(truth);
    const auto fit = fit_second_order(d.u, d.y, kDt);
    ASSERT_TRUE(tf_analyze(fit.tf).dc_gain.has_value());
    EXPECT_NEAR(*tf_analyze(fit.tf).dc_gain, 1.0, 5e-3);
}

TEST(Identification, RandomStableModelsAreRecovered)
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> logu(std::log(0.1), std::log(300.0));
    const int cases = 40;
    for (int i = 0; i < cases; ++i) {
        const TransferFunction2 truth{std::exp(logu(rng)), std::exp(logu(rng)), std::exp(logu(rng)), std::exp(logu(rng))};
        const auto d = chirp_data(truth);
        const auto fit = fit_second_order(d.u, d.y, kDt);
        SCOPED_TRACE("case " + std::to_string(i));
        expect_coefficients_near(fit.tf, truth, 0.01);
    }
}

TEST(Identification, InputScalingRescalesNumeratorOnly)
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n01;
    auto d = chirp_data(kRigidSpring);
    for (double& v : d.y) {
        v += 0.05 * n01(rng);
    }
    std::vector<double> u_nm(d.u.size());
    for (std::size_t i = 0; i < d.u.size(); ++i) {
        u_nm[i] = d.u[i] * 1e-3;
    }
    const auto a = fit_second_order(d.u, d.y, kDt);
    const auto b = fit_second_order(u_nm, d.y, kDt);
    EXPECT_NEAR(b.tf.b1, 1e3 * a.tf.b1, 1e-6 * std::abs(1e3 * a.tf.b1));
    EXPECT_NEAR(b.tf.b0, 1e3 * a.tf.b0, 1e-6 * std::abs(1e3 * a.tf.b0));
    EXPECT_NEAR(b.tf.a1, a.tf.a1, 1e-6 * a.tf.a1);
    EXPECT_NEAR(b.tf.a0, a.tf.a0, 1e-6 * a.tf.a0);

    const auto pa = predict_with_initial_state(a.tf, d.u, d.y, kDt);
    const auto pb = predict_with_initial_state(b.tf, u_nm, d.y, kDt);
    EXPECT_NEAR(nrmse_fit(d.y, pa), nrmse_fit(d.y, pb), 1e-6);
    std::vector<double> ra(pa.size()), rb(pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        ra[i] = d.y[i] - pa[i];
        rb[i] = d.y[i] - pb[i];
    }
    EXPECT_EQ(whiteness_test(ra).pass, whiteness_test(rb).pass);
}

TEST(Whiteness, ZeroResidualsPass)
{
    const std::vector<double> r(10000, 0.0);
    EXPECT_TRUE(whiteness_test(r).pass);
}

TEST(Whiteness, ThresholdAndBandFollowTheDistributions)
{
    std::vector<double> r(10000);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n01;
    for (double& v : r) {
        v = n01(rng);
    }
    const auto rep = whiteness_test(r, 20, 0.95);
    EXPECT_NEAR(rep.threshold, 31.4104, 1e-3);  // chi-square 0.95 quantile, 20 dof
    EXPECT_NEAR(rep.band, 1.959964 / 100.0, 1e-7);
    EXPECT_EQ(rep.autocorrelations.size(), 20u);
}

TEST(Whiteness, PassRateOnWhiteNoiseIsCalibrated)
{
    std::normal_distribution<double> n01;
    std::vector<double> r(10000);
    int passes = 0;
    const int seeds = 300;
    for (int s = 0; s < seeds; ++s) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(s) + 1000);
        for (double& v : r) {
            v = n01(rng);
        }
        passes += whiteness_test(r).pass;
    }
    const double rate = static_cast<double>(passes) / seeds;
    // 95% expected; binomial sd at n = 300 is 1.3%.
    EXPECT_GT(rate, 0.90);
    EXPECT_LT(rate, 0.99);
}

TEST(Whiteness, SinusoidFails)
{
    std::vector<double> r(10000);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = std::sin(2.0 * std::numbers::pi * 0.5 * static_cast<double>(i) * kDt);
    }
    const auto rep = whiteness_test(r);
    EXPECT_FALSE(rep.pass);
    EXPECT_EQ(rep.lags_outside_band, 20);
}

TEST(Whiteness, TooFewSamplesThrow)
{
    const std::vector<double> r(200, 1.0);
    EXPECT_THROW(whiteness_test(r, 20), std::invalid_argument);
}

TEST(Analysis, PublishedRigidSpringQuantities)
{
    const auto s = tf_analyze(kRigidSpring);
    EXPECT_NEAR(*s.dc_gain, 0.8368, 5e-5);
    EXPECT_NEAR(*s.natural_frequency, 13.97, 5e-3);
    EXPECT_NEAR(*s.damping_ratio, 0.150, 5e-4);
    EXPECT_TRUE(s.stable);
}

TEST(Analysis, CriticallyDampedUnitSystem)
{
    const auto s = tf_analyze({0.0, 1.0, 2.0, 1.0});
    EXPECT_DOUBLE_EQ(*s.dc_gain, 1.0);
    EXPECT_DOUBLE_EQ(*s.natural_frequency, 1.0);
    EXPECT_DOUBLE_EQ(*s.damping_ratio, 1.0);
}

TEST(Analysis, StabilityRequiresPositiveDenominator)
{
    EXPECT_FALSE(tf_analyze({0.0, 1.0, -1.0, 2.0}).stable);
    EXPECT_FALSE(tf_analyze({0.0, 1.0, 1.0, -2.0}).stable);
    EXPECT_FALSE(tf_analyze({0.0, 1.0, 1.0, -2.0}).natural_frequency.has_value());
    EXPECT_FALSE(tf_analyze({0.0, 1.0, 1.0, 0.0}).dc_gain.has_value());
}

TEST(Bode, LowFrequencyMagnitudeIsDcGain)
{
    const auto p = tf_bode(kRigidSpring, std::vector<double>{1e-4});
    EXPECT_NEAR(p[0].magnitude_db, 20.0 * std::log10(163.26 / 195.11), 1e-4);
}

TEST(Bode, HighFrequencySlopeIsMinusTwentyPerDecade)
{
    const auto p = tf_bode(kRigidSpring, std::vector<double>{1e5, 1e6});
    EXPECT_NEAR(p[1].magnitude_db - p[0].magnitude_db, -20.0, 1e-2);
}

TEST(Bode, PhaseAtUndampedNaturalFrequency)
{
    const double w = std::sqrt(kEmFreespace.a0);
    const auto p = tf_bode(kEmFreespace, std::vector<double>{w});
    const double want = std::arg(std::complex<double>(kEmFreespace.b0, kEmFreespace.b1 * w)) * 180.0 / std::numbers::pi - 90.0;
    EXPECT_NEAR(p[0].phase_deg, want, 1e-9);
}

TEST(Bode, PhaseIsUnwrappedAlongTheGrid)
{
    const auto grid = log_grid(0.05, 100.0, 200);
    EXPECT_EQ(grid.size(), 200u);
    EXPECT_DOUBLE_EQ(grid.front(), 0.05);
    EXPECT_DOUBLE_EQ(grid.back(), 100.0);
    const auto p = tf_bode(kRigidSpring, grid);
    for (std::size_t i = 1; i < p.size(); ++i) {
        EXPECT_LT(std::abs(p[i].phase_deg - p[i - 1].phase_deg), 180.0);
    }
    // Right-half-plane zero: phase heads to -270 deg.
    EXPECT_LT(p.back().phase_deg, -180.0);
}

TEST(Step, StartsAtZero)
{
    for (const auto& e : oracle::table_one()) {
        EXPECT_EQ(tf_step(e.tf, 1.0, 1e-3).front().value, 0.0) << e.name;
    }
}

TEST(Step, CriticallyDampedClosedForm)
{
    const auto r = tf_step({0.0, 1.0, 2.0, 1.0}, 15.0, 1e-3);
    for (const auto& p : r) {
        ASSERT_NEAR(p.value, 1.0 - (1.0 + p.time) * std::exp(-p.time), 1e-4);
    }
}

TEST(Step, FinalValueMatchesDcGainForPublishedModels)
{
    for (const auto& e : oracle::table_one()) {
        const auto s = tf_analyze(e.tf);
        const double horizon = 10.0 / (*s.damping_ratio * *s.natural_frequency);
        const auto r = tf_step(e.tf, horizon, 1e-3);
        EXPECT_LT(oracle::rel_err(r.back().value, *s.dc_gain), 5e-3) << e.name;
    }
    const auto r = tf_step(kRigidSpring, 10.0 / (0.150 * 13.97), 1e-3);
    EXPECT_NEAR(r.back().value, 0.8368, 0.8368 * 5e-3);
}

TEST(Step, UnstableModelThrows) { EXPECT_THROW(tf_step({0.0, 1.0, -1.0, 2.0}, 1.0, 1e-3), std::domain_error); }

TEST(Serialization, TransferFunctionRoundTrips)
{
    for (const auto& e : oracle::table_one()) {
        const auto back = tf_from_json(nlohmann::json::parse(to_json(e.tf).dump()));
        EXPECT_EQ(back, e.tf);
        EXPECT_EQ(tf_analyze(back).dc_gain, tf_analyze(e.tf).dc_gain);
        EXPECT_EQ(tf_analyze(back).damping_ratio, tf_analyze(e.tf).damping_ratio);
    }
    EXPECT_THROW(tf_from_json(nlohmann::json{{"b1", 1.0}}), std::invalid_argument);
}
