#pragma once

#include <array>
#include <charconv>
#include <cstddef>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

namespace telesim {

/**
 * @brief Uniformly sampled record of one run at the control rate.
 *
 * Reporting units: angles in deg, velocities in deg/s, torques in mNm.
 */
struct TimeSeriesLog {
    std::vector<double> time_s;
    std::vector<double> theta_l_deg;
    std::vector<double> theta_f_deg;
    std::vector<double> omega_l_deg_s;
    std::vector<double> omega_f_deg_s;
    std::vector<double> t_op_mnm;     ///< operator torque at the leader
    std::vector<double> t_env_mnm;    ///< rendered environment torque
    std::vector<double> t_l_cmd_mnm;  ///< leader motor command
    std::vector<double> t_f_cmd_mnm;  ///< follower motor command

    static constexpr std::array<const char*, 9> kColumns{
        "time_s",        "theta_l_deg", "theta_f_deg", "omega_l_deg_s", "omega_f_deg_s",
        "T_op_mNm",      "T_env_mNm",   "T_l_cmd_mNm", "T_f_cmd_mNm"};

    std::size_t size() const { return time_s.size(); }

    void reserve(std::size_t n)
    {
        for (auto* c : columns()) {
            c->reserve(n);
        }
    }

    std::array<std::vector<double>*, 9> columns()
    {
        return {&time_s, &theta_l_deg, &theta_f_deg, &omega_l_deg_s, &omega_f_deg_s,
                &t_op_mnm, &t_env_mnm, &t_l_cmd_mnm, &t_f_cmd_mnm};
    }

    std::array<const std::vector<double>*, 9> columns() const
    {
        return {&time_s, &theta_l_deg, &theta_f_deg, &omega_l_deg_s, &omega_f_deg_s,
                &t_op_mnm, &t_env_mnm, &t_l_cmd_mnm, &t_f_cmd_mnm};
    }

    bool operator==(const TimeSeriesLog&) const = default;
};

/// Shortest round-trip decimal representation; locale independent.
inline std::string format_double(double v)
{
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) {
        return "nan";
    }
    return std::string(buf.data(), end);
}

inline void write_csv(std::ostream& out, const TimeSeriesLog& log)
{
    const auto cols = log.columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        out << (c ? "," : "") << TimeSeriesLog::kColumns[c];
    }
    out << '\n';
    for (std::size_t i = 0; i < log.size(); ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out << (c ? "," : "") << format_double((*cols[c])[i]);
        }
        out << '\n';
    }
}

} // namespace telesim
