#pragma once

#include <span>
#include <utility>
#include <vector>

#include "loadforge/types.hpp"

namespace loadforge {

/// Mean active power per period: p(t) = (1/N) sum_n v0(n) I(n, t).
/// Period t is stamped start + t * interval.
PowerSeries power_from_current(const CurrentMatrix& current, const Vector& v0,
                               double start = 0.0, double interval = 30.0);

/// First difference p(t) - p(t-1); with `normalize`, rescaled to zero mean and unit
/// (population) standard deviation.
PowerSeries derivative(const PowerSeries& p, bool normalize = false);

/// Block-mean aggregation onto an integer multiple of the sample interval.
/// A trailing partial block is dropped.
PowerSeries resample(const PowerSeries& p, double new_interval);

/// Pearson correlation of (x_t, x_{t+lag}) over the overlapping window. Lag 0 gives 1.
/// NaN when either window has zero variance.
double autocorrelation(const PowerSeries& p, double lag_seconds);

/// E[(x - mu)^4] / E[(x - mu)^2]^2 with population moments. NaN for constant input.
double kurtosis(std::span<const double> x);

/// Differential entropy (nats) from a histogram plug-in estimate. Bin width follows
/// Freedman-Diaconis on the sample clipped to its [0.1%, 99.9%] quantile range.
double entropy(std::span<const double> x);

/// Laplace scale MLE: mean absolute deviation around the sample median.
double laplace_scale(std::span<const double> x);

/// Per-period total harmonic distortion in percent, from one-sided DFT magnitudes with
/// bin 1 as the fundamental and DC excluded. All-zero periods yield NaN.
std::vector<double> thd(const CurrentMatrix& current);

/// Linear-interpolated sample quantile (q in [0, 1]).
double quantile(std::span<const double> x, double q);

struct MetricReport {
    double base_interval = 0.0;  // sampling of the series the distribution metrics use
    double kurtosis = 0.0;
    double entropy = 0.0;
    double laplace_scale = 0.0;
    /// (resample interval in seconds, 1-day-lag autocorrelation of the normalized derivative)
    std::vector<std::pair<double, double>> acf_1day;
    std::vector<double> thd_percent;  // empty for power-only input
};

/// Distribution metrics on the normalized derivative at the finest interval, plus the
/// 1-day autocorrelation of the normalized derivative at every requested interval.
MetricReport compute_metrics(const PowerSeries& p, std::span<const double> intervals);

}  // namespace loadforge
