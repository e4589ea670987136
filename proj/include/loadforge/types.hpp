#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace loadforge {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Per-period current waveforms: column t holds the N samples of period t (amperes).
class CurrentMatrix {
public:
    /// Throws InvalidInput unless N >= 2, T >= 1 and every value is finite.
    explicit CurrentMatrix(Matrix values);

    Index samples_per_period() const noexcept { return values_.rows(); }
    Index num_periods() const noexcept { return values_.cols(); }
    const Matrix& values() const noexcept { return values_; }

private:
    Matrix values_;
};

/// Uniformly sampled active power (watts). Timestamps are epoch seconds.
class PowerSeries {
public:
    PowerSeries(double start, double interval, std::vector<double> watts);

    double start() const noexcept { return start_; }
    double interval() const noexcept { return interval_; }
    double timestamp(std::size_t i) const noexcept {
        return start_ + static_cast<double>(i) * interval_;
    }
    std::size_t size() const noexcept { return watts_.size(); }
    const std::vector<double>& watts() const noexcept { return watts_; }

private:
    double start_;
    double interval_;
    std::vector<double> watts_;
};

/// Regular time grid shared by generators: `length` steps of `interval` seconds from `start`.
struct Timeline {
    double start = 0.0;
    double interval = 30.0;
    std::size_t length = 0;

    double at(std::size_t i) const noexcept { return start + static_cast<double>(i) * interval; }
};

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; derives independent child seeds from a parent seed.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept;

/// Uniform draw in [0, 1) from the top 53 bits of one engine output.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace loadforge
