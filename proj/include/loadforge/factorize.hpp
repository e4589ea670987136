#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loadforge/nnls.hpp"
#include "loadforge/types.hpp"

namespace loadforge {

// Orientation used throughout: I (N x T) ~= S (N x K) * A (K x T), A >= 0.

struct SolverOptions {
    double rel_tol = 1e-8;    // stop when the relative objective decrease per sweep falls below
    int max_iters = 500;      // full sweeps (signature step + activation step)
    std::uint64_t seed = 0;   // drives the random initialization
    double ridge = 1e-10;     // Gram regularization, relative to its trace
    NnlsOptions nnls;
};

/// How a fit went. `objective_trace` holds ||I - S A||^2 after every half-step,
/// signature step first, so entries 2i and 2i+1 belong to sweep i.
struct FitReport {
    std::vector<double> objective_trace;
    int iterations = 0;
    bool converged = false;
    std::vector<Index> pruned;  // requested component indices dropped for an all-zero activation row
    bool below_target = false;  // set by select_k when no k reached the target
};

struct FactorModel {
    Matrix signatures;   // N x K
    Matrix activations;  // K x T, elementwise >= 0
    FitReport report;

    Index k() const noexcept { return signatures.cols(); }
    Matrix reconstruct() const { return signatures * activations; }
};

/// Ordered per-category signature matrices sharing one waveform length.
class SignatureBank {
public:
    struct Entry {
        std::string category_id;
        Matrix signatures;
    };

    void add(std::string category_id, Matrix signatures);

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    Index samples_per_period() const noexcept { return samples_; }
    Index total_components() const noexcept;
    /// Row offset of each category inside the stacked activation matrix.
    std::vector<Index> offsets() const;
    /// [S_1, S_2, ..., S_C]
    Matrix concatenated() const;

private:
    std::vector<Entry> entries_;
    Index samples_ = 0;
};

/// Exact least-squares signatures for fixed activations: S = I A^T (A A^T + lambda)^-1.
Matrix solve_signatures(const CurrentMatrix& current, const Matrix& activations, double ridge = 1e-10);

/// Alternating signature / nonnegative activation solves from a seeded start.
FactorModel snmf(const CurrentMatrix& current, Index k, const SolverOptions& opts = {});

/// Rescales every (signature, activation) pair so (1/N) sum_n s(n,k) v0(n) = 1.
void normalize_model(FactorModel& model, const Vector& v0);

/// Signature-only variant of normalize_model.
Matrix normalize_signatures(const Matrix& signatures, const Vector& v0);

/// Single-category training: snmf followed by normalization against v0.
FactorModel train_category(const CurrentMatrix& current, Index k, const Vector& v0,
                           const SolverOptions& opts = {});

/// Activations of every bank component for each period, with the bank held fixed.
Matrix infer_activations(const CurrentMatrix& current, const SignatureBank& bank,
                         const NnlsOptions& opts = {});

/// 10 log10(sum recon^2 / sum (I - recon)^2). +inf for an exact fit, -inf for a zero
/// reconstruction of nonzero data.
double reconstruction_snr(const CurrentMatrix& current, const Matrix& reconstruction);
double reconstruction_snr(const CurrentMatrix& current, const FactorModel& model);

/// Smallest k in [1, k_max] whose fit reaches `snr_target` dB; otherwise the k_max fit
/// with `report.below_target` set.
FactorModel select_k(const CurrentMatrix& current, double snr_target, Index k_max,
                     const SolverOptions& opts = {});

}  // namespace loadforge
