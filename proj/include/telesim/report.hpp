#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "telesim/identification.hpp"

namespace telesim {

/// Per-cycle follower/leader peak-to-peak ratio over the whole-cycle windows of a chirp.
struct TrackingProfile {
    std::vector<double> cycle_start_s;
    std::vector<double> ratio;
    double max_abs_slip_deg = 0.0;  ///< max |theta_f - theta_l| over the run

    double first() const { return ratio.empty() ? std::numeric_limits<double>::quiet_NaN() : ratio.front(); }
    double last() const { return ratio.empty() ? std::numeric_limits<double>::quiet_NaN() : ratio.back(); }
    double max() const { return ratio.empty() ? 0.0 : *std::max_element(ratio.begin(), ratio.end()); }
};

inline TrackingProfile tracking_profile(const TimeSeriesLog& log, const ChirpSpec& chirp)
{
    TrackingProfile out;
    for (std::size_t i = 0; i < log.size(); ++i) {
        out.max_abs_slip_deg = std::max(out.max_abs_slip_deg, std::abs(log.theta_f_deg[i] - log.theta_l_deg[i]));
    }
    const auto bounds = chirp.cycle_boundaries();
    std::size_t i = 0;
    for (std::size_t c = 0; c + 1 < bounds.size(); ++c) {
        double lmin = std::numeric_limits<double>::infinity(), lmax = -lmin;
        double fmin = lmin, fmax = -lmin;
        while (i < log.size() && log.time_s[i] < bounds[c]) {
            ++i;
        }
        std::size_t j = i;
        for (; j < log.size() && log.time_s[j] <= bounds[c + 1]; ++j) {
            lmin = std::min(lmin, log.theta_l_deg[j]);
            lmax = std::max(lmax, log.theta_l_deg[j]);
            fmin = std::min(fmin, log.theta_f_deg[j]);
            fmax = std::max(fmax, log.theta_f_deg[j]);
        }
        if (j > i + 1 && lmax > lmin) {
            out.cycle_start_s.push_back(bounds[c]);
            out.ratio.push_back((fmax - fmin) / (lmax - lmin));
        }
    }
    return out;
}

/// Relative gap |g_a - g_b| / |g_b|; infinite when either gain is undefined or g_b is zero.
inline double dc_gain_gap(const TfSummary& a, const TfSummary& b)
{
    if (!a.dc_gain || !b.dc_gain || *b.dc_gain == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return std::abs(*a.dc_gain - *b.dc_gain) / std::abs(*b.dc_gain);
}

/// "(b1·s + b0)/(s² + a1·s + a0)" with two-decimal coefficients.
inline std::string format_tf(const TransferFunction2& tf)
{
    auto term = [](double v, const char* suffix, bool leading) {
        char buf[64];
        if (leading) {
            std::snprintf(buf, sizeof buf, "%.2f%s", v, suffix);
        } else {
            std::snprintf(buf, sizeof buf, " %c %.2f%s", v < 0.0 ? '-' : '+', std::abs(v), suffix);
        }
        return std::string(buf);
    };
    return "(" + term(tf.b1, "·s", true) + term(tf.b0, "", false) + ")/(s²" + term(tf.a1, "·s", false) +
           term(tf.a0, "", false) + ")";
}

struct SweepCell {
    TransmissionKind transmission = TransmissionKind::rigid;
    EnvironmentKind environment = EnvironmentKind::freespace;
    bool ok = false;
    std::string error;
    IdentResult result;
    std::optional<TrackingProfile> tracking;
};

struct Finding {
    std::string id;
    std::string description;
    bool pass = false;
    std::string detail;
};

struct SweepReport {
    std::vector<SweepCell> cells;
    std::vector<Finding> findings;
    bool quantize_encoders = false;
    MeasurementNoise noise{};
    std::uint64_t seed = 1;

    bool all_cells_ok() const
    {
        return std::all_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.ok; });
    }

    const SweepCell* find(TransmissionKind t, EnvironmentKind e) const
    {
        for (const auto& c : cells) {
            if (c.transmission == t && c.environment == e) {
                return &c;
            }
        }
        return nullptr;
    }
};

inline constexpr TransmissionKind kSweepTransmissions[] = {TransmissionKind::rigid, TransmissionKind::damped,
                                                           TransmissionKind::elastic, TransmissionKind::combined,
                                                           TransmissionKind::electromechanical};
inline constexpr EnvironmentKind kSweepEnvironments[] = {EnvironmentKind::freespace, EnvironmentKind::spring};

inline SweepCell run_sweep_cell(PlantConfig cfg, TransmissionKind t, EnvironmentKind e)
{
    SweepCell cell;
    cell.transmission = t;
    cell.environment = e;
    try {
        cfg.transmission = t;
        cfg.environment.kind = e;
        auto run = run_identification_logged(cfg, cfg.excitation);
        cell.result = std::move(run.result);
        if (cfg.excitation.kind != ExcitationKind::step) {
            cell.tracking = tracking_profile(run.estimation_log, cfg.excitation.chirp);
        }
        cell.ok = true;
    } catch (const std::exception& ex) {
        cell.error = ex.what();
    }
    return cell;
}

namespace detail {

inline std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

} // namespace detail

/// Ordinal checks comparing the sweep cells; skipped checks are omitted when their cells are missing.
inline std::vector<Finding> evaluate_findings(const SweepReport& rep)
{
    using T = TransmissionKind;
    using E = EnvironmentKind;
    std::vector<Finding> out;
    auto cell = [&](T t, E e) -> const SweepCell* {
        const auto* c = rep.find(t, e);
        return (c && c->ok) ? c : nullptr;
    };

    if (!rep.cells.empty()) {
        Finding f{"fit_quality", "validation fit >= 99% in every cell", true, ""};
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& c : rep.cells) {
            if (!c.ok) {
                f.pass = false;
                continue;
            }
            worst = std::min(worst, c.result.fit_validation);
            if (!(c.result.fit_validation >= 99.0)) {
                f.pass = false;
                f.detail += std::string(f.detail.empty() ? "" : "; ") + to_string(c.transmission) + ":" +
                            to_string(c.environment) + detail::fmt(" %.2f%%", c.result.fit_validation);
            }
        }
        if (f.detail.empty()) {
            f.detail = "worst cell" + detail::fmt(" %.3f%%", worst);
        }
        out.push_back(std::move(f));
    }
    if (const auto *fs = cell(T::electromechanical, E::freespace), *sp = cell(T::electromechanical, E::spring); fs && sp) {
        const double gap = dc_gain_gap(fs->result.derived, sp->result.derived);
        out.push_back({"em_masking", "electromechanical: free-space and spring DC gains differ by < 10%", gap < 0.10,
                       "relative gap" + detail::fmt(" %.4g", gap)});
    }
    if (const auto *fs = cell(T::rigid, E::freespace), *sp = cell(T::rigid, E::spring); fs && sp) {
        const double gap = dc_gain_gap(fs->result.derived, sp->result.derived);
        out.push_back({"rigid_contrast", "rigid: free-space and spring DC gains differ by > 100%", gap > 1.0,
                       "relative gap" + detail::fmt(" %.4g", gap)});
    }
    if (const auto* c = cell(T::damped, E::spring); c && c->tracking) {
        const auto& tr = *c->tracking;
        out.push_back({"damped_tracking", "damped + spring: tracking ratio is higher in the last cycle than the first",
                       tr.last() > tr.first(),
                       "first" + detail::fmt(" %.4f", tr.first()) + ", last" + detail::fmt(" %.4f", tr.last())});
    }
    if (const auto* c = cell(T::elastic, E::spring); c && c->tracking) {
        out.push_back({"elastic_compliance", "elastic + spring: tracking ratio < 0.1 in every cycle", c->tracking->max() < 0.1,
                       "max ratio" + detail::fmt(" %.4f", c->tracking->max())});
    }
    if (const auto* c = cell(T::rigid, E::spring); c && c->tracking) {
        out.push_back({"rigid_tracking", "rigid: follower reproduces the leader exactly",
                       c->tracking->max_abs_slip_deg == 0.0,
                       "max slip" + detail::fmt(" %.3g deg", c->tracking->max_abs_slip_deg)});
    }
    return out;
}

/**
 * @brief Identify every requested (transmission, environment) cell of the grid.
 *
 * Cells run concurrently; results are stored in grid order so the output does
 * not depend on scheduling. An empty filter runs all ten cells.
 */
inline SweepReport run_sweep(const PlantConfig& base,
                             const std::optional<std::pair<TransmissionKind, EnvironmentKind>>& only = std::nullopt)
{
    const PlantConfig cfg = validate_config(base);
    std::vector<std::pair<TransmissionKind, EnvironmentKind>> grid;
    for (auto t : kSweepTransmissions) {
        for (auto e : kSweepEnvironments) {
            if (!only || (only->first == t && only->second == e)) {
                grid.emplace_back(t, e);
            }
        }
    }
    std::vector<std::future<SweepCell>> jobs;
    jobs.reserve(grid.size());
    for (const auto& [t, e] : grid) {
        jobs.push_back(std::async(std::launch::async, run_sweep_cell, cfg, t, e));
    }
    SweepReport rep;
    rep.quantize_encoders = cfg.quantize_encoders;
    rep.noise = cfg.noise;
    rep.seed = cfg.seed;
    for (auto& j : jobs) {
        rep.cells.push_back(j.get());
    }
    rep.findings = evaluate_findings(rep);
    return rep;
}

inline nlohmann::json to_json(const TrackingProfile& tr)
{
    return {{"cycle_start_s", tr.cycle_start_s}, {"ratio", tr.ratio}, {"max_abs_slip_deg", tr.max_abs_slip_deg}};
}

inline nlohmann::json to_json(const SweepReport& rep)
{
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : rep.cells) {
        nlohmann::json jc{{"transmission", to_string(c.transmission)},
                          {"environment", to_string(c.environment)},
                          {"status", c.ok ? "ok" : "failed"}};
        if (c.ok) {
            jc["result"] = to_json(c.result);
            jc["tf_string"] = format_tf(c.result.tf);
            jc["tracking"] = c.tracking ? to_json(*c.tracking) : nlohmann::json(nullptr);
        } else {
            jc["error"] = c.error;
        }
        cells.push_back(std::move(jc));
    }
    nlohmann::json findings = nlohmann::json::array();
    for (const auto& f : rep.findings) {
        findings.push_back({{"id", f.id}, {"description", f.description}, {"pass", f.pass}, {"detail", f.detail}});
    }
    return {{"quantize_encoders", rep.quantize_encoders},
            {"measurement_noise_std", {{"angle_deg", rep.noise.angle_deg}, {"torque_mNm", rep.noise.torque_mnm}}},
            {"seed", rep.seed},
            {"all_cells_ok", rep.all_cells_ok()},
            {"cells", cells},
            {"findings", findings}};
}

inline std::string to_markdown(const SweepReport& rep)
{
    std::ostringstream md;
    md << "# Transfer functions at the leader-operator interface\n\n";
    md << "Input: operator torque (mNm). Output: leader angle (deg). Fit: validation NRMSE %.\n\n";
    if (rep.quantize_encoders) {
        md << "Encoder quantization enabled.\n\n";
    }
    if (rep.noise.angle_deg > 0.0 || rep.noise.torque_mnm > 0.0) {
        md << "Measurement noise: angle std " << rep.noise.angle_deg << " deg, torque std " << rep.noise.torque_mnm
           << " mNm (seed " << rep.seed << ").\n\n";
    }
    md << "| Transmission | FreeSpace | Virtual Spring |\n|---|---|---|\n";
    for (auto t : kSweepTransmissions) {
        bool any = false;
        std::string row = std::string("| ") + to_string(t) + " |";
        for (auto e : kSweepEnvironments) {
            const auto* c = rep.find(t, e);
            if (!c) {
                row += " – |";
                continue;
            }
            any = true;
            if (c->ok) {
                row += " " + format_tf(c->result.tf) + detail::fmt(" (fit %.2f%%)", c->result.fit_validation) + " |";
            } else {
                row += " FAILED: " + c->error + " |";
            }
        }
        if (any) {
            md << row << "\n";
        }
    }
    md << "\n## Findings\n\n";
    for (const auto& f : rep.findings) {
        md << "- [" << (f.pass ? "PASS" : "FAIL") << "] " << f.description << " (" << f.detail << ")\n";
    }
    return md.str();
}

} // namespace telesim
