#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>

#include "loadforge/errors.hpp"
#include "loadforge/simulate.hpp"
#include "loadforge/stats.hpp"
#include "oracles.hpp"

using namespace loadforge;

namespace {

constexpr double kPi = std::numbers::pi;

PowerSeries series(std::vector<double> w, double interval = 30.0) { return PowerSeries(0.0, interval, std::move(w)); }

Matrix single_period(const std::function<double(double)>& f, Index n) {
    Matrix m(n, 1);
    for (Index i = 0; i < n; ++i) m(i, 0) = f(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n));
    return m;
}

double mean(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

}  // namespace

TEST(PowerFromCurrent, OhmicLoad) {
    const Vector v0 = voltage_waveform(230.0, 200);
    Matrix i(200, 3);
    for (Index t = 0; t < 3; ++t) i.col(t) = v0 / 52.9;
    const PowerSeries series_out = power_from_current(CurrentMatrix(i), v0);
    for (double p : series_out.watts()) EXPECT_NEAR(p, 1000.0, 1e-6);
}

TEST(PowerFromCurrent, ZeroCurrent) {
    const Vector v0 = voltage_waveform(230.0, 50);
    const PowerSeries series_out = power_from_current(CurrentMatrix(Matrix::Zero(50, 4)), v0);
    for (double p : series_out.watts()) EXPECT_EQ(p, 0.0);
}

TEST(PowerFromCurrent, QuadratureCurrentCarriesNoPower) {
    const Vector v0 = voltage_waveform(230.0, 200);
    const Matrix i = single_period([](double th) { return 10.0 * std::cos(th); }, 200);
    EXPECT_NEAR(power_from_current(CurrentMatrix(i), v0).watts()[0], 0.0, 1e-9);
}

TEST(PowerFromCurrent, TimestampsFollowCadence) {
    const Vector v0 = voltage_waveform(230.0, 8);
    const PowerSeries p = power_from_current(CurrentMatrix(Matrix::Ones(8, 3)), v0, 100.0, 30.0);
    EXPECT_EQ(p.timestamp(2), 160.0);
    EXPECT_THROW(power_from_current(CurrentMatrix(Matrix::Ones(8, 3)), voltage_waveform(230.0, 9)), InvalidInput);
}

TEST(Derivative, ConstantGivesZeros) {
    const PowerSeries series_out = derivative(series({4, 4, 4, 4}));
    for (double d : series_out.watts()) EXPECT_EQ(d, 0.0);
}

TEST(Derivative, FirstDifference) {
    const PowerSeries d = derivative(series({0, 1, 3, 6}));
    EXPECT_EQ(d.watts(), (std::vector<double>{1, 2, 3}));
}

TEST(Derivative, NormalizedHasZeroMeanUnitStd) {
    const auto x = oracle::gaussian_samples(5.0, 5000, 1);
    const auto d = derivative(series(x), true).watts();
    const double mu = mean(d);
    double var = 0.0;
    for (double v : d) var += (v - mu) * (v - mu);
    var /= d.size();
    EXPECT_LE(std::abs(mu), 1e-12);
    EXPECT_LE(std::abs(std::sqrt(var) - 1.0), 1e-12);
}

TEST(Derivative, NeedsTwoSamples) { EXPECT_THROW(derivative(series({1.0})), InvalidInput); }

TEST(Resample, SameIntervalIsIdentity) {
    const std::vector<double> w{1, 5, 2, 8};
    EXPECT_EQ(resample(series(w), 30.0).watts(), w);
}

TEST(Resample, BlockMeans) {
    const PowerSeries r = resample(series({1, 3, 5, 7}), 60.0);
    EXPECT_EQ(r.watts(), (std::vector<double>{2, 6}));
    EXPECT_EQ(r.interval(), 60.0);
}

TEST(Resample, DropsTrailingPartialBlockAndPreservesMean) {
    const std::vector<double> w{1, 2, 3, 4, 5, 6, 100};
    const PowerSeries r = resample(series(w), 90.0);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_NEAR(mean(r.watts()), mean(std::vector<double>(w.begin(), w.begin() + 6)), 1e-12);
}

TEST(Resample, RejectsNonMultiple) { EXPECT_THROW(resample(series({1, 2, 3}), 45.0), InvalidInput); }

TEST(Resample, CommutesWithDerivativeOfBlockMeans) {
    const auto x = oracle::gaussian_samples(1.0, 1200, 2);
    const PowerSeries lhs = derivative(resample(series(x), 3600.0));
    std::vector<double> blocks;
    for (std::size_t b = 0; b + 120 <= x.size(); b += 120)
        blocks.push_back(std::accumulate(x.begin() + b, x.begin() + b + 120, 0.0) / 120.0);
    for (std::size_t i = 0; i < lhs.size(); ++i) EXPECT_NEAR(lhs.watts()[i], blocks[i + 1] - blocks[i], 1e-12);
}

TEST(Autocorrelation, DailyPeriodicSeries) {
    std::vector<double> w(2880 * 3);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sin(2.0 * kPi * (i % 2880) / 2880.0) + 0.1 * (((i % 2880) * 7) % 13);
    EXPECT_NEAR(autocorrelation(series(w), 86400.0), 1.0, 1e-9);
}

TEST(Autocorrelation, WhiteNoiseIsUncorrelated) {
    const auto x = oracle::gaussian_samples(1.0, 100000, 3);
    EXPECT_LE(std::abs(autocorrelation(series(x), 300.0)), 0.02);
    EXPECT_LE(std::abs(autocorrelation(series(x), 86400.0)), 0.02);
}

TEST(Autocorrelation, LagZeroIsExactlyOne) {
    EXPECT_EQ(autocorrelation(series(oracle::gaussian_samples(1.0, 100, 4)), 0.0), 1.0);
}

TEST(Autocorrelation, RejectsBadLags) {
    const PowerSeries p = series({1, 2, 3, 4});
    EXPECT_THROW(autocorrelation(p, 45.0), InvalidInput);
    EXPECT_THROW(autocorrelation(p, 120.0), InvalidInput);
}

TEST(Kurtosis, GaussianIsThree) { EXPECT_NEAR(kurtosis(oracle::gaussian_samples(2.0, 1000000, 5)), 3.0, 0.05); }

TEST(Kurtosis, LaplaceIsSix) { EXPECT_NEAR(kurtosis(oracle::laplace_samples(1.0, 1000000, 6)), 6.0, 0.2); }

TEST(Kurtosis, SymmetricTwoPointIsOne) {
    std::vector<double> x(1000);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = i % 2 ? 1.0 : -1.0;
    EXPECT_NEAR(kurtosis(x), 1.0, 1e-12);
}

TEST(Entropy, LaplaceMatchesClosedForm) {
    const double b = 1.5;
    EXPECT_NEAR(entropy(oracle::laplace_samples(b, 1000000, 7)), std::log(2.0 * b * std::numbers::e), 0.1);
}

TEST(Entropy, UniformUnitIntervalIsZero) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(1000000);
    for (auto& v : x) v = u(rng);
    EXPECT_NEAR(entropy(x), 0.0, 0.05);
}

TEST(Entropy, ScalingShiftsByLogScale) {
    auto x = oracle::gaussian_samples(1.0, 200000, 9);
    const double h = entropy(x);
    for (auto& v : x) v *= 7.0;
    EXPECT_NEAR(entropy(x) - h, std::log(7.0), 0.05);
}

TEST(LaplaceScale, RecoversGeneratorScale) {
    EXPECT_NEAR(laplace_scale(oracle::laplace_samples(2.0, 100000, 10)), 2.0, 0.04);
}

TEST(LaplaceScale, ConstantIsZeroAndScalingIsExact) {
    EXPECT_EQ(laplace_scale(std::vector<double>(10, 3.0)), 0.0);
    auto x = oracle::laplace_samples(1.0, 1001, 11);
    const double b = laplace_scale(x);
    for (auto& v : x) v *= 4.0;
    EXPECT_NEAR(laplace_scale(x), 4.0 * b, 1e-12 * b);
}

TEST(Thd, PureSineIsZero) {
    const Matrix m = single_period([](double th) { return std::sin(th); }, 200);
    EXPECT_NEAR(thd(CurrentMatrix(m))[0], 0.0, 1e-9);
}

TEST(Thd, EqualThirdHarmonic) {
    const Matrix m = single_period([](double th) { return std::sin(th) + std::sin(3.0 * th + 0.4); }, 200);
    EXPECT_NEAR(thd(CurrentMatrix(m))[0], 100.0 / std::sqrt(2.0), 1e-6);
}

TEST(Thd, SquareWaveMatchesTruncatedSeries) {
    const Index n = 200;
    Matrix m(n, 1);
    for (Index i = 0; i < n; ++i) m(i, 0) = i < n / 2 ? 1.0 : -1.0;
    const double value = thd(CurrentMatrix(m))[0];
    EXPECT_NEAR(value, oracle::square_wave_thd(static_cast<int>(n / 2)), 0.5);
    EXPECT_NEAR(value, 43.5, 0.5);
}

TEST(Thd, ZeroPeriodIsUndefined) {
    Matrix m = Matrix::Zero(16, 2);
    m.col(1) = single_period([](double th) { return std::sin(th); }, 16);
    const auto v = thd(CurrentMatrix(m));
    EXPECT_TRUE(std::isnan(v[0]));
    EXPECT_NEAR(v[1], 0.0, 1e-9);
}

TEST(Thd, InvariantToAmplitudeAndCircularShift) {
    const Index n = 128;
    const Matrix base = single_period([](double th) { return std::sin(th) + 0.3 * std::sin(5 * th) + 0.1 * std::cos(2 * th); }, n);
    Matrix variants(n, 3);
    variants.col(0) = base.col(0);
    variants.col(1) = 25.0 * base.col(0);
    for (Index i = 0; i < n; ++i) variants(i, 2) = base((i + 17) % n, 0);
    const auto v = thd(CurrentMatrix(variants));
    EXPECT_NEAR(v[1], v[0], 1e-9);
    EXPECT_NEAR(v[2], v[0], 1e-9);
}

TEST(Metrics, InvariantToConstantOffset) {
    auto x = oracle::laplace_samples(1.0, 20000, 12);
    std::partial_sum(x.begin(), x.end(), x.begin());
    const std::vector<double> intervals{30.0};
    const MetricReport a = compute_metrics(series(x), intervals);
    for (auto& v : x) v += 1234.5;
    const MetricReport b = compute_metrics(series(x), intervals);
    EXPECT_NEAR(a.kurtosis, b.kurtosis, 1e-6);
    EXPECT_NEAR(a.entropy, b.entropy, 1e-6);
    EXPECT_NEAR(a.laplace_scale, b.laplace_scale, 1e-6);
}

TEST(Metrics, ReportsOneAcfPerInterval) {
    std::vector<double> w(2880 * 4);
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1000.0 * std::sin(2.0 * kPi * (i % 2880) / 2880.0) + g(rng);
    const std::vector<double> intervals{3600.0, 30.0};
    const MetricReport r = compute_metrics(series(w), intervals);
    ASSERT_EQ(r.acf_1day.size(), 2u);
    EXPECT_EQ(r.base_interval, 30.0);
    EXPECT_EQ(r.acf_1day[0].first, 30.0);
    EXPECT_EQ(r.acf_1day[1].first, 3600.0);
    EXPECT_GT(r.acf_1day[1].second, 0.9);
    for (const auto& [i, v] : r.acf_1day) {
        EXPECT_GE(v, -1.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Quantile, LinearInterpolation) {
    const std::vector<double> x{4, 1, 3, 2};
    EXPECT_EQ(quantile(x, 0.0), 1.0);
    EXPECT_EQ(quantile(x, 1.0), 4.0);
    EXPECT_NEAR(quantile(x, 0.5), 2.5, 1e-12);
}
