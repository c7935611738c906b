#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace telesim::lti {

/**
 * @brief Exact discretization of x' = A x + B u for a piecewise-linear input.
 *
 * With u interpolated linearly between samples (first-order hold),
 *   x[k+1] = Phi x[k] + gamma_u u[k] + gamma_du (u[k+1] - u[k]).
 * Built from exp of the augmented generator [[A, B, 0], [0, 0, 1/T], [0, 0, 0]].
 */
struct FohModel2 {
    Eigen::Matrix2d phi;
    Eigen::Vector2d gamma_u;
    Eigen::Vector2d gamma_du;

    static FohModel2 make(const Eigen::Matrix2d& a, const Eigen::Vector2d& b, double dt)
    {
        Eigen::Matrix4d gen = Eigen::Matrix4d::Zero();
        gen.topLeftCorner<2, 2>() = a;
        gen.block<2, 1>(0, 2) = b;
        gen(2, 3) = 1.0 / dt;
        const Eigen::Matrix4d e = (gen * dt).exp();
        return {e.topLeftCorner<2, 2>(), e.block<2, 1>(0, 2), e.block<2, 1>(0, 3)};
    }
};

/// Run the discretized model; states[k] is the full state at sample k.
inline std::vector<Eigen::Vector2d> simulate_states(const FohModel2& m, std::span<const double> u,
                                                    const Eigen::Vector2d& x0)
{
    std::vector<Eigen::Vector2d> states(u.size());
    if (u.empty()) {
        return states;
    }
    Eigen::Vector2d x = x0;
    states[0] = x;
    for (std::size_t k = 0; k + 1 < u.size(); ++k) {
        x = m.phi * x + m.gamma_u * u[k] + m.gamma_du * (u[k + 1] - u[k]);
        states[k + 1] = x;
    }
    return states;
}

/// First state component only; avoids storing the full trajectory.
inline std::vector<double> simulate_first_state(const FohModel2& m, std::span<const double> u, const Eigen::Vector2d& x0)
{
    std::vector<double> y(u.size());
    Eigen::Vector2d x = x0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        y[k] = x(0);
        if (k + 1 < u.size()) {
            x = m.phi * x + m.gamma_u * u[k] + m.gamma_du * (u[k + 1] - u[k]);
        }
    }
    return y;
}

/// Free response x[k+1] = Phi x[k], first component.
inline std::vector<double> free_response_first_state(const Eigen::Matrix2d& phi, const Eigen::Vector2d& x0, std::size_t n)
{
    std::vector<double> y(n);
    Eigen::Vector2d x = x0;
    for (std::size_t k = 0; k < n; ++k) {
        y[k] = x(0);
        x = phi * x;
    }
    return y;
}

} // namespace telesim::lti
