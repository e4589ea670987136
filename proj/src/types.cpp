#include "loadforge/types.hpp"

#include <cmath>
#include <string>

#include "loadforge/errors.hpp"

namespace loadforge {

CurrentMatrix::CurrentMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 2) {
        throw InvalidInput("current matrix needs at least 2 samples per period, got " +
                           std::to_string(values_.rows()));
    }
    if (values_.cols() < 1) {
        throw InvalidInput("current matrix needs at least one period");
    }
    if (!values_.allFinite()) {
        throw InvalidInput("current matrix contains non-finite values");
    }
}

PowerSeries::PowerSeries(double start, double interval, std::vector<double> watts)
    : start_(start), interval_(interval), watts_(std::move(watts)) {
    if (!std::isfinite(start_)) {
        throw InvalidInput("power series start timestamp is not finite");
    }
    if (!(interval_ > 0.0) || !std::isfinite(interval_)) {
        throw InvalidInput("power series sample interval must be positive");
    }
    for (std::size_t i = 0; i < watts_.size(); ++i) {
        if (!std::isfinite(watts_[i])) {
            throw InvalidInput("power series value " + std::to_string(i) + " is not finite");
        }
    }
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
    std::uint64_t z = parent + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace loadforge
