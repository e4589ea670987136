#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "loadforge/partition.hpp"
#include "loadforge/types.hpp"

namespace loadforge {

/// Time grid matching a power series.
Timeline timeline_of(const PowerSeries& p);

/// x(t) = 1 iff p(t) > threshold.
std::vector<std::uint8_t> threshold_onoff(const PowerSeries& p, double threshold = 20.0);

/// Time-of-day indexed transition probabilities of a 2-state chain:
/// gamma(tau, i, j) = P[a(t) = i | a(t-1) = j].
class TransitionTable {
public:
    /// Every subset starts at gamma = 1/2.
    explicit TransitionTable(std::size_t subsets);

    std::size_t size() const noexcept { return on_.size(); }
    double gamma(std::size_t tau, int next, int prev) const;
    /// Sets gamma(tau, 1, prev) = p_on and gamma(tau, 0, prev) = 1 - p_on.
    void set(std::size_t tau, int prev, double p_on);
    /// True when (tau, prev) was never observed and carries the smoothed 1/2.
    bool smoothed(std::size_t tau, int prev) const;
    void mark_smoothed(std::size_t tau, int prev, bool flag);

private:
    std::vector<std::array<double, 2>> on_;
    std::vector<std::array<bool, 2>> smoothed_;
};

/// Count-based estimate of gamma per subset. The denominator is the number of steps in
/// the subset whose previous state is j; unseen (tau, j) pairs get (0 + 1) / (0 + 2).
TransitionTable infer_transitions(std::span<const std::uint8_t> states, const Timeline& timeline,
                                  const TimePartition& part);

/// a(t) ~ Bernoulli(gamma_tau(1, a(t-1))) from `initial` at t = 0.
std::vector<std::uint8_t> sample_onoff(const TransitionTable& table, const TimePartition& part,
                                       const Timeline& timeline, std::uint64_t seed,
                                       std::uint8_t initial = 0);

/// Mean power per subset of a partition.
struct ActivationTemplate {
    std::vector<double> values;  // watts, >= 0
    std::vector<std::size_t> counts;  // samples behind each value (0 = never observed)
    std::string device;

    void validate() const;
};

/// a_hat(tau) = mean of p(t) over t in S_tau. Negative means (meter offsets) clamp to 0.
ActivationTemplate learn_template(const PowerSeries& p, const TimePartition& part);

struct ArmaParams {
    std::vector<double> phi;    // AR coefficients
    std::vector<double> theta;  // MA coefficients
    double sigma_w = 0.0;       // innovation standard deviation

    /// Throws InvalidInput unless the AR polynomial is stationary and sigma_w >= 0.
    void validate() const;
    /// Standard deviation of the stationary process.
    double marginal_std() const;

    /// ARMA(1,1), phi = 0.9, theta = 0.3, sigma_w giving a marginal std of 0.05.
    static ArmaParams defaults();
    static ArmaParams with_marginal_std(std::vector<double> phi, std::vector<double> theta,
                                        double target_std);
};

/// eps(t) = sum phi_i eps(t-i) + w(t) + sum theta_j w(t-j), w ~ N(0, sigma_w^2),
/// after discarding 10 (p + q + 1) burn-in samples.
std::vector<double> sample_arma(const ArmaParams& params, std::size_t length, std::uint64_t seed);

/// a(t) = a_hat(tau(t)) * exp(eps(t)).
std::vector<double> sample_complex_activation(const ActivationTemplate& tpl, const ArmaParams& params,
                                              const TimePartition& part, const Timeline& timeline,
                                              std::uint64_t seed);

/// One Dirichlet(alpha) draw.
Vector sample_dirichlet(std::span<const double> alpha, Rng& rng);

/// a(k, t) = a_hat(tau(t)) * exp(eps(t)) * delta(k), delta ~ Dirichlet(alpha) drawn once
/// per span (or once per calendar day with `redraw_daily`). Uses the same eps path as
/// sample_complex_activation for the same seed.
Matrix sample_multisig_activation(const ActivationTemplate& tpl, const ArmaParams& params,
                                  std::span<const double> alpha, const TimePartition& part,
                                  const Timeline& timeline, std::uint64_t seed,
                                  bool redraw_daily = false);

struct SignatureTemplate {
    Matrix templ;  // N x K
    double sigma = 0.0;

    /// sigma = 1% of the template RMS.
    static SignatureTemplate with_default_sigma(Matrix templ);
};

/// s(n, k) ~ N(template(n, k), sigma^2), i.i.d.
Matrix sample_signature(const SignatureTemplate& tpl, std::uint64_t seed);

/// Chain over {off, 1..K}: one row-stochastic (K+1) x (K+1) matrix per subset,
/// entry (from, to).
struct MultiStateTable {
    std::vector<Matrix> transitions;

    Index states() const { return transitions.empty() ? 0 : transitions.front().rows(); }
    void validate() const;
};

/// Activation rows for states 1..K; at most one row is nonzero per period, carrying the
/// magnitude of the active state.
Matrix sample_multistate_activation(const MultiStateTable& table, std::span<const double> magnitudes,
                                    const TimePartition& part, const Timeline& timeline,
                                    std::uint64_t seed);

}  // namespace loadforge
