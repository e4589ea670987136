#include "loadforge/factorize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>

#include "loadforge/errors.hpp"

namespace loadforge {

namespace {

// Per-period squared residual ||I_t - S a_t||^2. The explicit k-ordered accumulation
// makes the values independent of how many all-zero activation rows are present.
Vector column_residuals(const Matrix& data, const Matrix& sig, const Matrix& act) {
    const Index n = data.rows();
    const Index k = sig.cols();
    Vector out(data.cols());
    for (Index t = 0; t < data.cols(); ++t) {
        double acc = 0.0;
        for (Index i = 0; i < n; ++i) {
            double fit = 0.0;
            for (Index c = 0; c < k; ++c) fit += sig(i, c) * act(c, t);
            const double r = data(i, t) - fit;
            acc += r * r;
        }
        out(t) = acc;
    }
    return out;
}

double total(const Vector& v) {
    double s = 0.0;
    for (Index i = 0; i < v.size(); ++i) s += v(i);
    return s;
}

Matrix initial_activations(const Matrix& data, Index k, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    // Nonnegative part of Gaussian rows; roughly half the entries start at zero, which keeps
    // the fit away from dense mixtures of the underlying components.
    Matrix act(k, data.cols());
    for (Index t = 0; t < data.cols(); ++t)
        for (Index c = 0; c < k; ++c) act(c, t) = std::max(0.0, gauss(rng));
    for (Index c = 0; c < k; ++c) {
        if (act.row(c).maxCoeff() <= 0.0) act(c, static_cast<Index>(c % data.cols())) = 1.0;
    }
    const double scale = act.norm();
    const double target = data.norm();
    if (scale > 0.0 && target > 0.0) act *= target / scale;
    return act;
}

// S A = (S M)(M^-1 A) for any M keeping M^-1 A >= 0, so a fit can land on a mixture of
// the underlying components (often one whose signature draws negative power). Moving every
// activation row towards the boundary of the feasible cone picks the least mixed
// representative: a_i -= c a_j and s_j += c s_i with the largest c keeping a_i >= 0.
// The product S A is unchanged up to rounding.
void sharpen(Matrix& sig, Matrix& act, std::vector<Index>& origin, std::vector<Index>& pruned) {
    const Index k = act.rows();
    if (k < 2) return;
    for (int round = 0; round < 100; ++round) {
        bool moved = false;
        for (Index i = 0; i < k; ++i) {
            for (Index j = 0; j < k; ++j) {
                if (i == j) continue;
                double c = std::numeric_limits<double>::infinity();
                for (Index t = 0; t < act.cols(); ++t)
                    if (act(j, t) > 0.0) c = std::min(c, act(i, t) / act(j, t));
                if (!std::isfinite(c) || c * act.row(j).norm() <= 1e-12 * act.row(i).norm()) continue;
                act.row(i) = (act.row(i) - c * act.row(j)).cwiseMax(0.0);
                sig.col(j) += c * sig.col(i);
                moved = true;
            }
        }
        if (!moved) break;
    }

    std::vector<Index> keep;
    for (Index c = 0; c < k; ++c) {
        if (act.row(c).maxCoeff() > 0.0) {
            keep.push_back(c);
        } else {
            pruned.push_back(origin[static_cast<std::size_t>(c)]);
        }
    }
    if (static_cast<Index>(keep.size()) == k) return;
    Matrix s2(sig.rows(), static_cast<Index>(keep.size()));
    Matrix a2(static_cast<Index>(keep.size()), act.cols());
    std::vector<Index> o2;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        s2.col(static_cast<Index>(i)) = sig.col(keep[i]);
        a2.row(static_cast<Index>(i)) = act.row(keep[i]);
        o2.push_back(origin[static_cast<std::size_t>(keep[i])]);
    }
    sig = std::move(s2);
    act = std::move(a2);
    origin = std::move(o2);
}

}  // namespace

void SignatureBank::add(std::string category_id, Matrix signatures) {
    if (signatures.cols() < 1 || signatures.rows() < 2) {
        throw InvalidInput("signature bank: category '" + category_id + "' has an empty signature matrix");
    }
    if (!entries_.empty() && signatures.rows() != samples_) {
        throw InvalidInput("signature bank: category '" + category_id + "' has " +
                           std::to_string(signatures.rows()) + " samples per period, expected " +
                           std::to_string(samples_));
    }
    samples_ = signatures.rows();
    entries_.push_back({std::move(category_id), std::move(signatures)});
}

Index SignatureBank::total_components() const noexcept {
    Index k = 0;
    for (const auto& e : entries_) k += e.signatures.cols();
    return k;
}

std::vector<Index> SignatureBank::offsets() const {
    std::vector<Index> out;
    Index at = 0;
    for (const auto& e : entries_) {
        out.push_back(at);
        at += e.signatures.cols();
    }
    return out;
}

Matrix SignatureBank::concatenated() const {
    Matrix out(samples_, total_components());
    Index at = 0;
    for (const auto& e : entries_) {
        out.middleCols(at, e.signatures.cols()) = e.signatures;
        at += e.signatures.cols();
    }
    return out;
}

Matrix solve_signatures(const CurrentMatrix& current, const Matrix& activations, double ridge) {
    const Matrix& data = current.values();
    if (activations.cols() != data.cols() || activations.rows() < 1) {
        throw InvalidInput("solve_signatures: activation matrix must be K x T with T = " +
                           std::to_string(data.cols()));
    }
    Matrix gram = activations * activations.transpose();
    const double trace = gram.trace();
    if (!(trace > 0.0) || !std::isfinite(trace)) {
        throw DegenerateActivations("solve_signatures: activation matrix is identically zero", 0);
    }
    gram.diagonal().array() += ridge * trace;

    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) {
        Index worst = 0;
        activations.rowwise().squaredNorm().minCoeff(&worst);
        throw DegenerateActivations("solve_signatures: activation Gram not invertible, component " +
                                        std::to_string(worst),
                                    worst);
    }
    Matrix sig = llt.solve(activations * data.transpose()).transpose();
    if (!sig.allFinite()) {
        Index worst = 0;
        activations.rowwise().squaredNorm().minCoeff(&worst);
        throw DegenerateActivations("solve_signatures: non-finite signatures, component " +
                                        std::to_string(worst),
                                    worst);
    }
    return sig;
}

FactorModel snmf(const CurrentMatrix& current, Index k, const SolverOptions& opts) {
    const Matrix& data = current.values();
    if (k < 1 || k > std::min(data.rows(), data.cols())) {
        throw InvalidInput("snmf: k must lie in [1, min(N, T)], got " + std::to_string(k));
    }

    Matrix act = initial_activations(data, k, opts.seed);
    Matrix sig = Matrix::Zero(data.rows(), k);
    std::vector<Index> origin(static_cast<std::size_t>(k));
    for (Index c = 0; c < k; ++c) origin[static_cast<std::size_t>(c)] = c;

    FactorModel model;
    auto& trace = model.report.objective_trace;

    Vector resid;
    double current_obj = std::numeric_limits<double>::infinity();
    double sweep_start = current_obj;

    for (int iter = 0; iter < opts.max_iters; ++iter) {
        // Signature half-step; keep the previous signatures if rounding made things worse.
        Matrix candidate = solve_signatures(current, act, opts.ridge);
        Vector cand_resid = column_residuals(data, candidate, act);
        const double cand_obj = total(cand_resid);
        if (cand_obj <= current_obj) {
            sig = std::move(candidate);
            resid = std::move(cand_resid);
            current_obj = cand_obj;
        }
        trace.push_back(current_obj);

        // Activation half-step: one NNLS per period, never accepting a worse column.
        const Matrix gram = sig.transpose() * sig;
        const Matrix rhs = sig.transpose() * data;
        Matrix next(act.rows(), act.cols());
        for (Index t = 0; t < data.cols(); ++t) {
            try {
                next.col(t) = nnls_gram(gram, rhs.col(t), opts.nnls);
            } catch (const ConvergenceError& e) {
                next.col(t) = e.best_iterate();
            }
        }
        const Vector next_resid = column_residuals(data, sig, next);
        for (Index t = 0; t < data.cols(); ++t) {
            if (next_resid(t) <= resid(t)) {
                act.col(t) = next.col(t);
                resid(t) = next_resid(t);
            }
        }
        current_obj = total(resid);
        trace.push_back(current_obj);

        // Prune components whose activation row collapsed to zero.
        std::vector<Index> keep;
        for (Index c = 0; c < act.rows(); ++c) {
            if (act.row(c).maxCoeff() > 0.0) {
                keep.push_back(c);
            } else {
                model.report.pruned.push_back(origin[static_cast<std::size_t>(c)]);
            }
        }
        if (keep.empty()) {
            throw DegenerateActivations("snmf: every component has an all-zero activation row",
                                        origin.front());
        }
        if (static_cast<Index>(keep.size()) < act.rows()) {
            Matrix s2(sig.rows(), static_cast<Index>(keep.size()));
            Matrix a2(static_cast<Index>(keep.size()), act.cols());
            std::vector<Index> o2;
            for (std::size_t i = 0; i < keep.size(); ++i) {
                s2.col(static_cast<Index>(i)) = sig.col(keep[i]);
                a2.row(static_cast<Index>(i)) = act.row(keep[i]);
                o2.push_back(origin[static_cast<std::size_t>(keep[i])]);
            }
            sig = std::move(s2);
            act = std::move(a2);
            origin = std::move(o2);
        }

        model.report.iterations = iter + 1;
        if (current_obj == 0.0) {
            model.report.converged = true;
            break;
        }
        if (std::isfinite(sweep_start) &&
            (sweep_start - current_obj) <= opts.rel_tol * sweep_start) {
            model.report.converged = true;
            break;
        }
        sweep_start = current_obj;
    }

    sharpen(sig, act, origin, model.report.pruned);
    model.signatures = std::move(sig);
    model.activations = std::move(act);
    return model;
}

Matrix normalize_signatures(const Matrix& signatures, const Vector& v0) {
    if (v0.size() != signatures.rows()) {
        throw InvalidInput("normalize: voltage waveform length " + std::to_string(v0.size()) +
                           " does not match " + std::to_string(signatures.rows()) + " samples");
    }
    const double n = static_cast<double>(signatures.rows());
    Matrix out = signatures;
    for (Index c = 0; c < signatures.cols(); ++c) {
        const double proj = signatures.col(c).dot(v0) / n;
        const double floor = 1e-12 * signatures.col(c).norm() * v0.norm() / n;
        if (!(proj > floor)) {
            // A non-positive projection would need a negative activation to carry power.
            throw NormalizationError("normalize: signature " + std::to_string(c) +
                                         " has no positive projection on the voltage",
                                     c);
        }
        out.col(c) /= proj;
    }
    return out;
}

void normalize_model(FactorModel& model, const Vector& v0) {
    const Matrix normalized = normalize_signatures(model.signatures, v0);
    const double n = static_cast<double>(model.signatures.rows());
    for (Index c = 0; c < model.k(); ++c) {
        const double proj = model.signatures.col(c).dot(v0) / n;
        model.activations.row(c) *= proj;
    }
    model.signatures = normalized;
}

FactorModel train_category(const CurrentMatrix& current, Index k, const Vector& v0,
                           const SolverOptions& opts) {
    if (v0.size() != current.samples_per_period()) {
        throw InvalidInput("train_category: voltage waveform length does not match N");
    }
    FactorModel model = snmf(current, k, opts);
    normalize_model(model, v0);
    return model;
}

Matrix infer_activations(const CurrentMatrix& current, const SignatureBank& bank,
                         const NnlsOptions& opts) {
    if (bank.entries().empty()) {
        throw InvalidInput("infer_activations: empty signature bank");
    }
    if (bank.samples_per_period() != current.samples_per_period()) {
        throw InvalidInput("infer_activations: bank has " + std::to_string(bank.samples_per_period()) +
                           " samples per period, data has " +
                           std::to_string(current.samples_per_period()));
    }
    const Matrix sig = bank.concatenated();
    const Matrix gram = sig.transpose() * sig;
    const Matrix rhs = sig.transpose() * current.values();
    return nnls_gram_columns(gram, rhs, opts);
}

double reconstruction_snr(const CurrentMatrix& current, const Matrix& reconstruction) {
    const Matrix& data = current.values();
    if (reconstruction.rows() != data.rows() || reconstruction.cols() != data.cols()) {
        throw InvalidInput("reconstruction_snr: shape mismatch");
    }
    const double signal = reconstruction.squaredNorm();
    const double noise = (data - reconstruction).squaredNorm();
    if (noise == 0.0) return std::numeric_limits<double>::infinity();
    if (signal == 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(signal / noise);
}

double reconstruction_snr(const CurrentMatrix& current, const FactorModel& model) {
    return reconstruction_snr(current, model.reconstruct());
}

FactorModel select_k(const CurrentMatrix& current, double snr_target, Index k_max,
                     const SolverOptions& opts) {
    if (!std::isfinite(snr_target)) {
        throw InvalidInput("select_k: SNR target must be finite");
    }
    const Index limit = std::min(current.samples_per_period(), current.num_periods());
    if (k_max < 1 || k_max > limit) {
        throw InvalidInput("select_k: k_max must lie in [1, min(N, T)]");
    }
    FactorModel fit;
    for (Index k = 1; k <= k_max; ++k) {
        fit = snmf(current, k, opts);
        if (reconstruction_snr(current, fit) >= snr_target) return fit;
    }
    fit.report.below_target = true;
    return fit;
}

}  // namespace loadforge
