#include "loadforge/genmodel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "loadforge/errors.hpp"

namespace loadforge {

namespace {

constexpr std::uint64_t kNoiseStream = 0;
constexpr std::uint64_t kMixStream = 1;

void check_template_fits(const ActivationTemplate& tpl, const TimePartition& part) {
    tpl.validate();
    if (tpl.values.size() != part.size()) {
        throw InvalidInput("activation template has " + std::to_string(tpl.values.size()) +
                           " entries but the " + part.name() + " partition has " +
                           std::to_string(part.size()) + " subsets");
    }
}

// Draws the next state by inverting the cumulative distribution `probs`.
template <typename Probs>
int next_state(const Probs& probs, Index count, double u) {
    double cum = 0.0;
    for (Index s = 0; s < count - 1; ++s) {
        cum += probs(s);
        if (u < cum) return static_cast<int>(s);
    }
    return static_cast<int>(count - 1);
}

}  // namespace

Timeline timeline_of(const PowerSeries& p) { return Timeline{p.start(), p.interval(), p.size()}; }

std::vector<std::uint8_t> threshold_onoff(const PowerSeries& p, double threshold) {
    std::vector<std::uint8_t> out(p.size());
    const auto& w = p.watts();
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] > threshold ? 1 : 0;
    return out;
}

TransitionTable::TransitionTable(std::size_t subsets)
    : on_(subsets, {0.5, 0.5}), smoothed_(subsets, {false, false}) {
    if (subsets == 0) throw InvalidInput("transition table needs at least one subset");
}

double TransitionTable::gamma(std::size_t tau, int next, int prev) const {
    const double p_on = on_.at(tau).at(static_cast<std::size_t>(prev));
    return next == 1 ? p_on : 1.0 - p_on;
}

void TransitionTable::set(std::size_t tau, int prev, double p_on) {
    if (!(p_on >= 0.0 && p_on <= 1.0)) {
        throw InvalidInput("transition probability must lie in [0, 1]");
    }
    on_.at(tau).at(static_cast<std::size_t>(prev)) = p_on;
}

bool TransitionTable::smoothed(std::size_t tau, int prev) const {
    return smoothed_.at(tau).at(static_cast<std::size_t>(prev));
}

void TransitionTable::mark_smoothed(std::size_t tau, int prev, bool flag) {
    smoothed_.at(tau).at(static_cast<std::size_t>(prev)) = flag;
}

TransitionTable infer_transitions(std::span<const std::uint8_t> states, const Timeline& timeline,
                                  const TimePartition& part) {
    if (states.size() != timeline.length) {
        throw InvalidInput("infer_transitions: state series and timeline lengths differ");
    }
    if (states.size() < 2) {
        throw InvalidInput("infer_transitions: need at least two samples");
    }
    const double span = static_cast<double>(states.size()) * timeline.interval;
    if (span < part.cycle_seconds()) {
        throw InvalidInput("infer_transitions: series spans " + std::to_string(span) +
                           " s, shorter than one " + part.name() + " partition cycle");
    }

    // counts[tau][prev][next]
    std::vector<std::array<std::array<std::size_t, 2>, 2>> counts(part.size());
    for (auto& c : counts) c = {{{0, 0}, {0, 0}}};
    for (std::size_t t = 1; t < states.size(); ++t) {
        if (states[t] > 1 || states[t - 1] > 1) {
            throw InvalidInput("infer_transitions: states must be 0 or 1");
        }
        counts[part.subset(timeline.at(t))][states[t - 1]][states[t]]++;
    }

    TransitionTable table(part.size());
    for (std::size_t tau = 0; tau < part.size(); ++tau) {
        for (int prev = 0; prev < 2; ++prev) {
            const auto& c = counts[tau][static_cast<std::size_t>(prev)];
            const std::size_t den = c[0] + c[1];
            if (den == 0) {
                table.set(tau, prev, 0.5);
                table.mark_smoothed(tau, prev, true);
            } else {
                table.set(tau, prev, static_cast<double>(c[1]) / static_cast<double>(den));
            }
        }
    }
    return table;
}

std::vector<std::uint8_t> sample_onoff(const TransitionTable& table, const TimePartition& part,
                                       const Timeline& timeline, std::uint64_t seed,
                                       std::uint8_t initial) {
    if (table.size() != part.size()) {
        throw InvalidInput("sample_onoff: transition table does not cover the partition");
    }
    if (initial > 1) throw InvalidInput("sample_onoff: initial state must be 0 or 1");
    std::vector<std::uint8_t> out(timeline.length);
    if (out.empty()) return out;
    Rng rng(seed);
    out[0] = initial;
    for (std::size_t t = 1; t < out.size(); ++t) {
        const std::size_t tau = part.subset(timeline.at(t));
        const int prev = out[t - 1];
        Eigen::Vector2d probs(table.gamma(tau, 0, prev), table.gamma(tau, 1, prev));
        out[t] = static_cast<std::uint8_t>(next_state(probs, 2, uniform01(rng)));
    }
    return out;
}

void ActivationTemplate::validate() const {
    if (values.empty()) throw InvalidInput("activation template is empty");
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0) {
            throw InvalidInput("activation template values must be finite and nonnegative");
        }
    }
}

ActivationTemplate learn_template(const PowerSeries& p, const TimePartition& part) {
    ActivationTemplate tpl;
    tpl.values.assign(part.size(), 0.0);
    tpl.counts.assign(part.size(), 0);
    const auto& w = p.watts();
    for (std::size_t t = 0; t < w.size(); ++t) {
        const std::size_t tau = part.subset(p.timestamp(t));
        tpl.values[tau] += w[t];
        tpl.counts[tau]++;
    }
    for (std::size_t tau = 0; tau < tpl.values.size(); ++tau) {
        if (tpl.counts[tau] > 0) {
            tpl.values[tau] = std::max(0.0, tpl.values[tau] / static_cast<double>(tpl.counts[tau]));
        }
    }
    return tpl;
}

void ArmaParams::validate() const {
    if (!std::isfinite(sigma_w) || sigma_w < 0.0) {
        throw InvalidInput("ARMA innovation std must be finite and nonnegative");
    }
    for (double v : phi) {
        if (!std::isfinite(v)) throw InvalidInput("ARMA AR coefficient is not finite");
    }
    for (double v : theta) {
        if (!std::isfinite(v)) throw InvalidInput("ARMA MA coefficient is not finite");
    }
    if (phi.empty()) return;
    // Roots of 1 - sum phi_i z^i outside the unit circle <=> companion eigenvalues inside it.
    const auto p = static_cast<Index>(phi.size());
    Matrix companion = Matrix::Zero(p, p);
    for (Index i = 0; i < p; ++i) companion(0, i) = phi[static_cast<std::size_t>(i)];
    for (Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Matrix> es(companion, false);
    const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
    if (!(radius < 1.0)) {
        throw InvalidInput("ARMA AR polynomial is not stationary (spectral radius " +
                           std::to_string(radius) + ")");
    }
}

double ArmaParams::marginal_std() const {
    validate();
    // psi weights of the MA(infinity) representation.
    std::vector<double> psi{1.0};
    double sum = 1.0;
    for (std::size_t j = 1; j < 100000; ++j) {
        double v = j <= theta.size() ? theta[j - 1] : 0.0;
        for (std::size_t i = 1; i <= std::min(j, phi.size()); ++i) v += phi[i - 1] * psi[j - i];
        psi.push_back(v);
        sum += v * v;
        if (j > theta.size() + phi.size() && v * v < 1e-18 * sum) break;
    }
    return sigma_w * std::sqrt(sum);
}

ArmaParams ArmaParams::with_marginal_std(std::vector<double> phi, std::vector<double> theta,
                                         double target_std) {
    ArmaParams unit{std::move(phi), std::move(theta), 1.0};
    const double s = unit.marginal_std();
    unit.sigma_w = target_std / s;
    return unit;
}

ArmaParams ArmaParams::defaults() { return with_marginal_std({0.9}, {0.3}, 0.05); }

std::vector<double> sample_arma(const ArmaParams& params, std::size_t length, std::uint64_t seed) {
    params.validate();
    const std::size_t p = params.phi.size();
    const std::size_t q = params.theta.size();
    const std::size_t burn = 10 * (p + q + 1);
    const std::size_t total = burn + length;

    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> eps(total, 0.0);
    std::vector<double> w(total, 0.0);
    for (std::size_t t = 0; t < total; ++t) {
        w[t] = params.sigma_w * gauss(rng);
        double v = w[t];
        for (std::size_t i = 1; i <= p && i <= t; ++i) v += params.phi[i - 1] * eps[t - i];
        for (std::size_t j = 1; j <= q && j <= t; ++j) v += params.theta[j - 1] * w[t - j];
        eps[t] = v;
    }
    return std::vector<double>(eps.begin() + static_cast<std::ptrdiff_t>(burn), eps.end());
}

std::vector<double> sample_complex_activation(const ActivationTemplate& tpl, const ArmaParams& params,
                                              const TimePartition& part, const Timeline& timeline,
                                              std::uint64_t seed) {
    check_template_fits(tpl, part);
    const auto eps = sample_arma(params, timeline.length, derive_seed(seed, kNoiseStream));
    std::vector<double> out(timeline.length);
    for (std::size_t t = 0; t < out.size(); ++t) {
        out[t] = tpl.values[part.subset(timeline.at(t))] * std::exp(eps[t]);
    }
    return out;
}

Vector sample_dirichlet(std::span<const double> alpha, Rng& rng) {
    if (alpha.empty()) throw InvalidInput("Dirichlet parameter vector is empty");
    const auto k = static_cast<Index>(alpha.size());
    Vector draw(k);
    double sum = 0.0;
    for (Index i = 0; i < k; ++i) {
        const double a = alpha[static_cast<std::size_t>(i)];
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw InvalidInput("Dirichlet parameters must be positive and finite");
        }
        std::gamma_distribution<double> g(a, 1.0);
        draw(i) = g(rng);
        sum += draw(i);
    }
    if (!(sum > 0.0)) {
        // Every gamma draw underflowed; fall back to a uniformly chosen vertex.
        draw.setZero();
        draw(static_cast<Index>(rng() % static_cast<std::uint64_t>(k))) = 1.0;
        return draw;
    }
    return draw / sum;
}

Matrix sample_multisig_activation(const ActivationTemplate& tpl, const ArmaParams& params,
                                  std::span<const double> alpha, const TimePartition& part,
                                  const Timeline& timeline, std::uint64_t seed, bool redraw_daily) {
    check_template_fits(tpl, part);
    const auto base = sample_complex_activation(tpl, params, part, timeline, seed);
    Rng mix(derive_seed(seed, kMixStream));
    Vector delta = sample_dirichlet(alpha, mix);
    const auto k = static_cast<Index>(alpha.size());

    Matrix out(k, static_cast<Index>(timeline.length));
    std::int64_t day = timeline.length ? DayCalendar::day_index(timeline.at(0)) : 0;
    for (std::size_t t = 0; t < timeline.length; ++t) {
        if (redraw_daily) {
            const std::int64_t today = DayCalendar::day_index(timeline.at(t));
            if (today != day) {
                day = today;
                delta = sample_dirichlet(alpha, mix);
            }
        }
        for (Index c = 0; c < k; ++c) out(c, static_cast<Index>(t)) = base[t] * delta(c);
    }
    return out;
}

SignatureTemplate SignatureTemplate::with_default_sigma(Matrix templ) {
    const double rms = templ.size() ? std::sqrt(templ.squaredNorm() / static_cast<double>(templ.size())) : 0.0;
    return SignatureTemplate{std::move(templ), 0.01 * rms};
}

Matrix sample_signature(const SignatureTemplate& tpl, std::uint64_t seed) {
    if (!(tpl.sigma >= 0.0) || !std::isfinite(tpl.sigma)) {
        throw InvalidInput("signature sigma must be finite and nonnegative");
    }
    Matrix out = tpl.templ;
    if (tpl.sigma == 0.0) return out;
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, tpl.sigma);
    for (Index c = 0; c < out.cols(); ++c)
        for (Index n = 0; n < out.rows(); ++n) out(n, c) += gauss(rng);
    return out;
}

void MultiStateTable::validate() const {
    if (transitions.empty()) throw InvalidInput("multi-state table is empty");
    const Index s = transitions.front().rows();
    if (s < 2) throw InvalidInput("multi-state table needs the off state plus at least one state");
    for (const auto& m : transitions) {
        if (m.rows() != s || m.cols() != s) {
            throw InvalidInput("multi-state transition matrices must all be square and equally sized");
        }
        if (!m.allFinite() || (m.array() < 0.0).any() || (m.array() > 1.0).any()) {
            throw InvalidInput("multi-state transition entries must lie in [0, 1]");
        }
        for (Index r = 0; r < s; ++r) {
            if (std::abs(m.row(r).sum() - 1.0) > 1e-9) {
                throw InvalidInput("multi-state transition matrix is not row-stochastic");
            }
        }
    }
}

Matrix sample_multistate_activation(const MultiStateTable& table, std::span<const double> magnitudes,
                                    const TimePartition& part, const Timeline& timeline,
                                    std::uint64_t seed) {
    table.validate();
    const Index states = table.states();
    if (static_cast<Index>(magnitudes.size()) != states - 1) {
        throw InvalidInput("multi-state magnitudes must list one value per non-off state");
    }
    if (table.transitions.size() != part.size()) {
        throw InvalidInput("multi-state table does not cover the partition");
    }
    for (double m : magnitudes) {
        if (!(m >= 0.0) || !std::isfinite(m)) {
            throw InvalidInput("multi-state magnitudes must be finite and nonnegative");
        }
    }

    Matrix out = Matrix::Zero(states - 1, static_cast<Index>(timeline.length));
    Rng rng(seed);
    int state = 0;
    for (std::size_t t = 1; t < timeline.length; ++t) {
        const Matrix& m = table.transitions[part.subset(timeline.at(t))];
        state = next_state(m.row(state), states, uniform01(rng));
        if (state > 0) out(state - 1, static_cast<Index>(t)) = magnitudes[static_cast<std::size_t>(state - 1)];
    }
    return out;
}

}  // namespace loadforge
