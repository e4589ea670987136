#include "loadforge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#include <fftw3.h>

#include "loadforge/errors.hpp"

namespace loadforge {

namespace {

constexpr double kDay = 86400.0;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t steps_for(double seconds, double interval, const char* what) {
    const double ratio = seconds / interval;
    const double rounded = std::round(ratio);
    if (!(rounded >= 0.0) || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, rounded)) {
        throw InvalidInput(std::string(what) + " must be a nonnegative multiple of the sample interval");
    }
    return static_cast<std::size_t>(rounded);
}

double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class RealFft {
public:
    explicit RealFft(int n) : n_(n) {
        in_ = fftw_alloc_real(static_cast<std::size_t>(n));
        out_ = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
    }
    ~RealFft() {
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            fftw_destroy_plan(plan_);
        }
        fftw_free(in_);
        fftw_free(out_);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    double* input() { return in_; }
    void execute() { fftw_execute(plan_); }
    double power(int bin) const { return out_[bin][0] * out_[bin][0] + out_[bin][1] * out_[bin][1]; }
    int bins() const { return n_ / 2 + 1; }

private:
    int n_;
    double* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

}  // namespace

PowerSeries power_from_current(const CurrentMatrix& current, const Vector& v0, double start,
                               double interval) {
    if (v0.size() != current.samples_per_period()) {
        throw InvalidInput("power_from_current: voltage waveform has " + std::to_string(v0.size()) +
                           " samples, current has " + std::to_string(current.samples_per_period()));
    }
    const Vector p = current.values().transpose() * v0 / static_cast<double>(v0.size());
    return PowerSeries(start, interval, std::vector<double>(p.data(), p.data() + p.size()));
}

PowerSeries derivative(const PowerSeries& p, bool normalize) {
    if (p.size() < 2) {
        throw InvalidInput("derivative: need at least two samples");
    }
    const auto& w = p.watts();
    std::vector<double> d(w.size() - 1);
    for (std::size_t i = 1; i < w.size(); ++i) d[i - 1] = w[i] - w[i - 1];

    if (normalize) {
        const double mu = mean_of(d);
        double ss = 0.0;
        for (double v : d) ss += (v - mu) * (v - mu);
        const double sd = std::sqrt(ss / static_cast<double>(d.size()));
        if (!(sd > 0.0)) {
            throw InvalidInput("derivative: cannot normalize a constant derivative");
        }
        for (double& v : d) v = (v - mu) / sd;
    }
    return PowerSeries(p.timestamp(1), p.interval(), std::move(d));
}

PowerSeries resample(const PowerSeries& p, double new_interval) {
    const std::size_t factor = steps_for(new_interval, p.interval(), "resample interval");
    if (factor == 0) {
        throw InvalidInput("resample: interval must be positive");
    }
    if (factor == 1) return p;
    const auto& w = p.watts();
    const std::size_t blocks = w.size() / factor;
    std::vector<double> out(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < factor; ++i) s += w[b * factor + i];
        out[b] = s / static_cast<double>(factor);
    }
    return PowerSeries(p.start(), static_cast<double>(factor) * p.interval(), std::move(out));
}

double autocorrelation(const PowerSeries& p, double lag_seconds) {
    const std::size_t lag = steps_for(lag_seconds, p.interval(), "autocorrelation lag");
    const auto& x = p.watts();
    if (lag == 0) return 1.0;
    if (lag + 2 > x.size()) {
        throw InvalidInput("autocorrelation: lag must be shorter than the series span");
    }
    const std::size_t n = x.size() - lag;
    const std::span<const double> head(x.data(), n);
    const std::span<const double> tail(x.data() + lag, n);
    const double mh = mean_of(head);
    const double mt = mean_of(tail);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = head[i] - mh;
        const double b = tail[i] - mt;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) return kNaN;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double kurtosis(std::span<const double> x) {
    if (x.empty()) throw InvalidInput("kurtosis: empty sample");
    const double mu = mean_of(x);
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d2 = (v - mu) * (v - mu);
        m2 += d2;
        m4 += d2 * d2;
    }
    const auto n = static_cast<double>(x.size());
    m2 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) return kNaN;
    return m4 / (m2 * m2);
}

double quantile(std::span<const double> x, double q) {
    if (x.empty()) throw InvalidInput("quantile: empty sample");
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double entropy(std::span<const double> x) {
    if (x.size() < 2) throw InvalidInput("entropy: need at least two samples");
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    auto q = [&](double p) {
        const double pos = p * static_cast<double>(s.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, s.size() - 1);
        return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
    };
    const double lo = q(0.001);
    const double hi = q(0.999);
    const auto first = std::lower_bound(s.begin(), s.end(), lo);
    const auto last = std::upper_bound(s.begin(), s.end(), hi);
    const std::span<const double> kept(s.data() + (first - s.begin()),
                                       static_cast<std::size_t>(last - first));
    const double range = hi - lo;
    if (!(range > 0.0) || kept.empty()) return -std::numeric_limits<double>::infinity();

    const auto n = static_cast<double>(kept.size());
    double width = 2.0 * (q(0.75) - q(0.25)) / std::cbrt(n);
    if (!(width > 0.0)) width = range / std::ceil(std::sqrt(n));
    const auto bins = static_cast<std::size_t>(std::max(1.0, std::ceil(range / width)));
    width = range / static_cast<double>(bins);

    std::vector<std::size_t> counts(bins, 0);
    for (double v : kept) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        counts[std::min(b, bins - 1)]++;
    }
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log(p / width);
    }
    return h;
}

double laplace_scale(std::span<const double> x) {
    if (x.empty()) throw InvalidInput("laplace_scale: empty sample");
    std::vector<double> s(x.begin(), x.end());
    const std::size_t mid = s.size() / 2;
    std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(mid), s.end());
    double median = s[mid];
    if (s.size() % 2 == 0) {
        const double below = *std::max_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (median + below);
    }
    double acc = 0.0;
    for (double v : x) acc += std::abs(v - median);
    return acc / static_cast<double>(x.size());
}

std::vector<double> thd(const CurrentMatrix& current) {
    const auto n = static_cast<int>(current.samples_per_period());
    const Matrix& data = current.values();
    RealFft fft(n);
    std::vector<double> out(static_cast<std::size_t>(current.num_periods()));
    for (Index t = 0; t < data.cols(); ++t) {
        std::copy(data.col(t).data(), data.col(t).data() + n, fft.input());
        fft.execute();
        double harmonics = 0.0;
        for (int h = 2; h < fft.bins(); ++h) harmonics += fft.power(h);
        const double all = harmonics + fft.power(1);
        out[static_cast<std::size_t>(t)] = all > 0.0 ? 100.0 * std::sqrt(harmonics / all) : kNaN;
    }
    return out;
}

MetricReport compute_metrics(const PowerSeries& p, std::span<const double> intervals) {
    if (intervals.empty()) throw InvalidInput("compute_metrics: no resampling interval given");
    std::vector<double> sorted(intervals.begin(), intervals.end());
    std::sort(sorted.begin(), sorted.end());

    MetricReport report;
    report.base_interval = sorted.front();
    const PowerSeries base = derivative(resample(p, sorted.front()), true);
    report.kurtosis = kurtosis(base.watts());
    report.entropy = entropy(base.watts());
    report.laplace_scale = laplace_scale(base.watts());

    for (double interval : sorted) {
        const PowerSeries d = derivative(resample(p, interval), true);
        const std::size_t lag = steps_for(kDay, d.interval(), "one-day lag");
        const double acf = lag + 2 <= d.size() ? autocorrelation(d, kDay) : kNaN;
        report.acf_1day.emplace_back(interval, acf);
    }
    return report;
}

}  // namespace loadforge
