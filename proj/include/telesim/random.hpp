#pragma once

#include <cstdint>
#include <random>

namespace telesim {

/**
 * @brief Seeded Gaussian noise source.
 *
 * A (seed, stream) pair fully determines the sequence, so two runs with the
 * same config reproduce bit-identical noise, and different streams of the
 * same seed are independent realizations.
 */
class NoiseStream {
public:
    NoiseStream(std::uint64_t seed, std::uint64_t stream)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x7e1e5u};
        engine_.seed(seq);
    }

    /// Zero-mean sample; returns exactly 0 for std == 0 without consuming the engine.
    double gaussian(double stddev)
    {
        if (stddev == 0.0) {
            return 0.0;
        }
        return stddev * normal_(engine_);
    }

    double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace telesim
