// Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "loadforge/cli.hpp"
#include "loadforge/factorize.hpp"
#include "loadforge/genmodel.hpp"
#include "loadforge/io.hpp"
#include "loadforge/library.hpp"
#include "loadforge/manifest.hpp"
#include "loadforge/nnls.hpp"
#include "loadforge/simulate.hpp"
#include "loadforge/stats.hpp"
#include "oracles.hpp"

using namespace loadforge;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Random harmonic waveforms whose fundamental sits near the mains phase.
Matrix random_signatures(Index n, Index k, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix s(n, k);
    for (Index c = 0; c < k; ++c) {
        const double a1 = 1.0 + std::abs(g(rng));
        const double ph = 0.5 * g(rng);
        for (Index i = 0; i < n; ++i) {
            const double w = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
            s(i, c) = a1 * std::sin(w + ph);
        }
        for (int h = 2; h <= 7; ++h) {
            const double amp = 0.6 * g(rng) / h;
            const double hp = g(rng);
            for (Index i = 0; i < n; ++i) {
                const double w = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
                s(i, c) += amp * std::sin(h * w + hp);
            }
        }
    }
    return s;
}

// Planted I = S A with A >= 0, plus optional Gaussian noise at `noise_db` below the signal.
CurrentMatrix planted(Index n, Index t, Index k, std::uint64_t seed, double noise_db = -1.0) {
    std::mt19937_64 rng(seed);
    const Matrix s = random_signatures(n, k, rng);
    const Matrix a = oracle::random_nonnegative(k, t, rng) * 5.0;
    Matrix i = s * a;
    if (noise_db > 0.0) {
        const double rms = std::sqrt(i.squaredNorm() / static_cast<double>(i.size()));
        const double sd = rms * std::pow(10.0, -noise_db / 20.0);
        std::normal_distribution<double> g(0.0, sd);
        for (Index j = 0; j < i.size(); ++j) i.data()[j] += g(rng);
    }
    return CurrentMatrix(std::move(i));
}

// 1. Lawson-Hanson against exact support enumeration and projected gradient.
Outcome nnls_optimality() {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> dim(1, 10);
    double solver_seconds = 0.0;
    double worst_enum = 0.0, worst_pg = 0.0, worst_kkt = 0.0;
    int failures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Index m = dim(rng), k = dim(rng);
        const Matrix M = oracle::random_matrix(m, k, rng);
        const Vector b = oracle::random_matrix(m, 1, rng).col(0);
        const auto t0 = Clock::now();
        const Vector x = nnls(M, b);
        solver_seconds += seconds_since(t0);

        const double f = oracle::objective(M, b, x);
        const double scale = std::max(1.0, b.squaredNorm());
        // KKT: x >= 0, gradient >= 0, complementary slackness.
        const Vector grad = M.transpose() * (M * x - b);
        const double gtol = 1e-8 * std::max(1.0, (M.transpose() * b).cwiseAbs().maxCoeff());
        double kkt = std::max(0.0, -x.minCoeff());
        for (Index j = 0; j < k; ++j) {
            kkt = std::max(kkt, std::max(0.0, -grad(j)) / gtol);
            if (x(j) > 0.0) kkt = std::max(kkt, std::abs(grad(j)) / gtol);
        }
        const double d_enum = std::abs(f - oracle::objective(M, b, oracle::nnls_enumerate(M, b))) / scale;
        const double d_pg =
            std::abs(f - oracle::objective(M, b, oracle::nnls_projected_gradient(M, b, 50000))) / scale;
        worst_enum = std::max(worst_enum, d_enum);
        worst_pg = std::max(worst_pg, d_pg);
        worst_kkt = std::max(worst_kkt, kkt);
        if (kkt > 1.0 || d_enum > 1e-6 || d_pg > 1e-6) ++failures;
    }
    return {failures == 0 && solver_seconds < 30.0,
            fmt("1000 instances, %d failing, max |df| enum %.2e pg %.2e, kkt ratio %.2e, solver %.2f s", failures,
                worst_enum, worst_pg, worst_kkt, solver_seconds)};
}

// 2. Planted recovery and monotone objective.
Outcome snmf_recovery() {
    double worst_snr = std::numeric_limits<double>::infinity();
    int worst_iters = 0;
    bool monotone = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const CurrentMatrix i = planted(200, 500, 3, 100 + seed);
        SolverOptions opts;
        opts.max_iters = 200;
        opts.seed = seed;
        const FactorModel m = snmf(i, 3, opts);
        const auto& tr = m.report.objective_trace;
        for (std::size_t h = 1; h < tr.size(); ++h) monotone = monotone && tr[h] <= tr[h - 1];
        worst_snr = std::min(worst_snr, reconstruction_snr(i, m));
        worst_iters = std::max(worst_iters, m.report.iterations);
    }
    return {monotone && worst_snr >= 50.0 && worst_iters <= 200,
            fmt("5 seeds, min SNR %.1f dB, max sweeps %d, monotone %s", worst_snr, worst_iters,
                monotone ? "yes" : "no")};
}

// 3. Power of a normalized model equals the activation column sums.
Outcome power_identity() {
    double worst = 0.0;
    auto check = [&](const CurrentMatrix& data, Index k, std::uint64_t seed) {
        const Vector v0 = voltage_waveform(230.0, data.samples_per_period());
        SolverOptions opts;
        opts.seed = seed;
        const FactorModel m = train_category(data, k, v0, opts);
        const PowerSeries p = power_from_current(CurrentMatrix(m.reconstruct()), v0);
        const Vector sums = m.activations.colwise().sum().transpose();
        for (Index t = 0; t < sums.size(); ++t) {
            const double denom = std::max(std::abs(sums(t)), 1e-12 * sums.cwiseAbs().maxCoeff());
            worst = std::max(worst, std::abs(p.watts()[static_cast<std::size_t>(t)] - sums(t)) / denom);
        }
    };
    for (std::uint64_t seed = 1; seed <= 5; ++seed) check(planted(200, 300, 3, 300 + seed, 40.0), 3, seed);
    // A simulated class D device with measurement noise.
    BuildingSpec b = library::shed_buildings(86400.0, 128)[6];
    b.categories.resize(1);
    const SimulatedDataset ds = synthesize_building(b, 9);
    check(ds.total, 2, 9);
    return {worst <= 1e-6, fmt("6 trained models, max relative deviation %.2e", worst)};
}

// 4. select_k recovers the planted rank.
Outcome select_k_rank() {
    int hits = 0;
    int trials = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Index rank = 1 + trial % 3;
        const CurrentMatrix i = planted(64, 200, rank, 4000 + static_cast<std::uint64_t>(trial), 70.0);
        SolverOptions opts;
        opts.seed = static_cast<std::uint64_t>(trial);
        hits += select_k(i, 50.0, 6, opts).k() == rank;
        ++trials;
    }
    return {hits >= 95, fmt("%d/%d trials returned the planted rank (ranks 1-3, 70 dB noise floor)", hits, trials)};
}

// 5. Metric calibration against closed forms.
Outcome metrics_calibration() {
    const double k = kurtosis(oracle::gaussian_samples(1.0, 1'000'000, 5));
    const double b = 2.0;
    const double h = entropy(oracle::laplace_samples(b, 1'000'000, 6));
    const double h_true = std::log(2.0 * b * std::numbers::e);
    const double scale = laplace_scale(oracle::laplace_samples(b, 100'000, 7));
    const Index n = 200;
    Matrix sine(n, 10);
    for (Index t = 0; t < 10; ++t)
        for (Index i = 0; i < n; ++i)
            sine(i, t) = (1.0 + t) * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / n);
    double worst_thd = 0.0;
    for (double v : thd(CurrentMatrix(sine))) worst_thd = std::max(worst_thd, v);
    const bool pass = std::abs(k - 3.0) <= 0.05 && std::abs(h - h_true) <= 0.1 &&
                      std::abs(scale / b - 1.0) <= 0.02 && worst_thd <= 1e-9;
    return {pass, fmt("kurtosis %.4f, entropy %.4f vs %.4f, laplace scale %.4f vs %.1f, sine THD %.1e %%", k, h,
                      h_true, scale, b, worst_thd)};
}

// 6. Hourly Markov chain sampled for 30 days and re-estimated.
Outcome markov_round_trip() {
    TransitionTable truth(24);
    for (std::size_t hr = 0; hr < 24; ++hr) {
        truth.set(hr, 0, 0.1 + 0.3 * static_cast<double>(hr % 3));
        truth.set(hr, 1, 0.9 - 0.2 * static_cast<double>(hr % 4));
    }
    const TimePartition part = TimePartition::hourly();
    const Timeline tl{1514764800.0, 30.0, 30 * 2880};
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto est = infer_transitions(sample_onoff(truth, part, tl, seed), tl, part);
        for (std::size_t hr = 0; hr < 24; ++hr)
            for (int j = 0; j < 2; ++j)
                for (int i = 0; i < 2; ++i)
                    worst = std::max(worst, std::abs(est.gamma(hr, i, j) - truth.gamma(hr, i, j)));
    }
    return {worst <= 0.05, fmt("5 seeds x 30 days, max |gamma error| %.4f", worst)};
}

// 7. AR(1) lag-1 autocorrelation.
Outcome arma_sanity() {
    ArmaParams ar;
    ar.phi = {0.9};
    ar.sigma_w = 1.0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto path = sample_arma(ar, 100'000, seed);
        const double r = autocorrelation(PowerSeries(0.0, 1.0, path), 1.0);
        worst = std::max(worst, std::abs(r - 0.9));
    }
    return {worst <= 0.02, fmt("5 paths of 1e5 steps, max |acf(1) - 0.9| %.4f", worst)};
}

// 8. Dirichlet split preserves the total and has mean 1/K.
Outcome dirichlet_mixture() {
    const ActivationTemplate tpl = library::template_profile("office", 1000.0);
    const TimePartition part = TimePartition::halfminute_daytype();
    const Timeline tl{1514764800.0, 30.0, 2 * 2880};
    const ArmaParams arma = ArmaParams::defaults();
    const std::vector<double> alpha{2.0, 2.0, 2.0};
    const auto total = sample_complex_activation(tpl, arma, part, tl, 17);
    const Matrix split = sample_multisig_activation(tpl, arma, alpha, part, tl, 17, true);
    double worst_sum = 0.0;
    for (Index t = 0; t < split.cols(); ++t) {
        const double ref = total[static_cast<std::size_t>(t)];
        const double err = std::abs(split.col(t).sum() - ref);
        worst_sum = std::max(worst_sum, ref > 0.0 ? err / ref : err);
    }

    double worst_mean = 0.0;
    for (const auto& [k, a] : std::vector<std::pair<int, double>>{{2, 1.0}, {3, 1.0}, {4, 0.5}, {5, 3.0}}) {
        Rng rng(derive_seed(99, static_cast<std::uint64_t>(k)));
        const std::vector<double> sym(static_cast<std::size_t>(k), a);
        Vector mean = Vector::Zero(k);
        for (int d = 0; d < 10'000; ++d) {
            const Vector delta = sample_dirichlet(sym, rng);
            worst_sum = std::max(worst_sum, std::abs(delta.sum() - 1.0));
            mean += delta;
        }
        mean /= 10'000.0;
        worst_mean = std::max(worst_mean, (mean.array() - 1.0 / k).abs().maxCoeff());
    }
    // The split divides by the component sum, so the identity holds to rounding.
    return {worst_sum <= 1e-12 && worst_mean <= 0.02,
            fmt("max relative row-sum error %.1e, max |mean delta - 1/K| %.4f", worst_sum, worst_mean)};
}

// 9. Commercial and residential statistics.
Outcome realism() {
    const double span = 14 * 86400.0;
    const std::vector<double> intervals{30.0, 3600.0};
    auto specs = library::shed_buildings(span);
    double kmin = 1e300, kmax = 0.0, acf_min = 1e300, acf_mean = 0.0, res_min = 1e300;
    int runs = 0;
    bool pass = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        for (const auto& spec : specs) {
            const MetricReport r = compute_metrics(synthesize_building(spec, seed).total_power(), intervals);
            const double acf = r.acf_1day.back().second;
            kmin = std::min(kmin, r.kurtosis);
            kmax = std::max(kmax, r.kurtosis);
            acf_min = std::min(acf_min, acf);
            acf_mean += acf;
            ++runs;
            pass = pass && r.kurtosis >= 3.0 && r.kurtosis <= 20.0 && acf >= 0.4;
        }
        const MetricReport res =
            compute_metrics(synthesize_building(library::residential_building(span), seed).total_power(), intervals);
        res_min = std::min(res_min, res.kurtosis);
        pass = pass && res.kurtosis >= 30.0;
    }
    return {pass, fmt("commercial kurtosis [%.2f, %.2f], hourly acf(1 day) min %.3f mean %.3f; residential "
                      "kurtosis min %.1f (5 seeds, 14 days)",
                      kmin, kmax, acf_min, acf_mean / runs, res_min)};
}

// 10. Byte-identical regeneration through the command line.
Outcome determinism() {
    const auto dir = oracle::scratch_dir("acceptance_determinism");
    std::size_t files = 0, mismatches = 0;
    for (const char* preset : {"shed", "residential"}) {
        for (const char* run : {"a", "b"}) {
            const std::string out = (dir / (std::string(preset) + "_" + run)).string();
            const char* argv[] = {"loadforge", "generate", "--preset", preset, "--span-days", "1",
                                  "--seed", "31", "--out", out.c_str()};
            std::ostringstream sink;
            if (cli::main(10, argv, sink, sink) != 0) return {false, std::string("generate failed: ") + sink.str()};
        }
        const auto a = dir / (std::string(preset) + "_a");
        const auto b = dir / (std::string(preset) + "_b");
        for (const auto& entry : std::filesystem::recursive_directory_iterator(a)) {
            if (!entry.is_regular_file()) continue;
            const auto rel = std::filesystem::relative(entry.path(), a);
            ++files;
            if (!std::filesystem::exists(b / rel) || io::read_file(entry.path()) != io::read_file(b / rel)) ++mismatches;
        }
    }
    return {files > 0 && mismatches == 0, fmt("%zu files compared byte for byte, %zu differ", files, mismatches)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"nnls optimality", nnls_optimality},
        {"snmf planted recovery", snmf_recovery},
        {"normalized power identity", power_identity},
        {"select_k rank recovery", select_k_rank},
        {"metric calibration", metrics_calibration},
        {"markov round trip", markov_round_trip},
        {"arma lag-1 acf", arma_sanity},
        {"dirichlet mixture", dirichlet_mixture},
        {"statistical realism", realism},
        {"deterministic regeneration", determinism},
    };
    int failed = 0;
    for (std::size_t c = 0; c < criteria.size(); ++c) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[c].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c + 1, criteria[c].first.c_str(),
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
