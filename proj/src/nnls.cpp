#include "loadforge/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "loadforge/errors.hpp"

namespace loadforge {

namespace {

std::vector<Index> members(const std::vector<char>& passive) {
    std::vector<Index> out;
    for (std::size_t i = 0; i < passive.size(); ++i) {
        if (passive[i]) out.push_back(static_cast<Index>(i));
    }
    return out;
}

// Unconstrained least squares restricted to the passive set; entries outside stay zero.
Vector solve_passive(const Matrix& gram, const Vector& mtb, const std::vector<Index>& set) {
    const auto n = static_cast<Index>(set.size());
    Matrix sub(n, n);
    Vector rhs(n);
    for (Index a = 0; a < n; ++a) {
        rhs(a) = mtb(set[a]);
        for (Index b = 0; b < n; ++b) sub(a, b) = gram(set[a], set[b]);
    }
    Vector z = Vector::Zero(gram.rows());
    if (n == 0) return z;
    Eigen::LDLT<Matrix> ldlt(sub);
    const Vector sol = ldlt.solve(rhs);
    for (Index a = 0; a < n; ++a) z(set[a]) = sol(a);
    return z;
}

// Squared distance of column j from the span of the passive columns, via the Schur complement.
double schur_residual(const Matrix& gram, const std::vector<Index>& set, Index j) {
    const auto n = static_cast<Index>(set.size());
    if (n == 0) return gram(j, j);
    Matrix sub(n, n);
    Vector col(n);
    for (Index a = 0; a < n; ++a) {
        col(a) = gram(set[a], j);
        for (Index b = 0; b < n; ++b) sub(a, b) = gram(set[a], set[b]);
    }
    Eigen::LDLT<Matrix> ldlt(sub);
    return gram(j, j) - col.dot(ldlt.solve(col));
}

}  // namespace

Vector nnls_gram(const Matrix& gram, const Vector& mtb, const NnlsOptions& opts) {
    const Index k = gram.rows();
    if (k < 1 || gram.cols() != k || mtb.size() != k) {
        throw InvalidInput("nnls: Gram matrix must be square and match the right-hand side");
    }
    if (!gram.allFinite() || !mtb.allFinite()) {
        throw InvalidInput("nnls: non-finite input");
    }

    Vector x = Vector::Zero(k);
    const double scale = mtb.cwiseAbs().maxCoeff();
    if (scale == 0.0) return x;
    const double tol = opts.tol_factor * scale;
    const int max_inner = opts.max_iter_factor * static_cast<int>(k);
    // Bound on additions to the passive set; Lawson-Hanson terminates well inside it.
    const int max_outer = 10 * static_cast<int>(k) + 10;

    std::vector<char> passive(static_cast<std::size_t>(k), 0);
    std::vector<char> blocked(static_cast<std::size_t>(k), 0);
    int inner = 0;
    int outer = 0;

    for (;;) {
        const Vector w = mtb - gram * x;

        Index pick = -1;
        double best = tol;
        for (Index j = 0; j < k; ++j) {
            if (passive[j] || blocked[j]) continue;
            if (w(j) > best) {
                best = w(j);
                pick = j;
            }
        }
        if (pick < 0) return x;

        if (++outer > max_outer) {
            throw ConvergenceError("nnls: active set failed to settle", x);
        }

        auto set = members(passive);
        const double residual = schur_residual(gram, set, pick);
        if (!(residual > 1e-12 * gram(pick, pick))) {
            blocked[pick] = 1;
            continue;
        }

        passive[pick] = 1;
        set = members(passive);
        Vector z = solve_passive(gram, mtb, set);
        if (!(z(pick) > 0.0)) {
            // Numerically unable to move along this coordinate.
            passive[pick] = 0;
            blocked[pick] = 1;
            continue;
        }

        bool removed = false;
        for (;;) {
            Index limiting = -1;
            double alpha = std::numeric_limits<double>::infinity();
            for (Index i : set) {
                if (z(i) <= 0.0) {
                    const double step = x(i) / (x(i) - z(i));
                    if (step < alpha) {
                        alpha = step;
                        limiting = i;
                    }
                }
            }
            if (limiting < 0) break;

            if (++inner > max_inner) {
                throw ConvergenceError(
                    "nnls: exceeded " + std::to_string(max_inner) + " inner iterations", x);
            }
            x += alpha * (z - x);
            x(limiting) = 0.0;
            for (Index i : set) {
                if (x(i) <= 0.0) {
                    x(i) = 0.0;
                    passive[i] = 0;
                }
            }
            passive[limiting] = 0;
            removed = true;
            set = members(passive);
            z = solve_passive(gram, mtb, set);
        }
        x = z;
        if (removed) std::fill(blocked.begin(), blocked.end(), 0);
    }
}

Vector nnls(const Matrix& M, const Vector& b, const NnlsOptions& opts) {
    if (M.rows() < 1 || M.cols() < 1 || b.size() != M.rows()) {
        throw InvalidInput("nnls: design matrix and right-hand side shapes disagree");
    }
    if (!M.allFinite() || !b.allFinite()) {
        throw InvalidInput("nnls: non-finite input");
    }
    const Matrix gram = M.transpose() * M;
    const Vector mtb = M.transpose() * b;
    return nnls_gram(gram, mtb, opts);
}

Matrix nnls_gram_columns(const Matrix& gram, const Matrix& mtb, const NnlsOptions& opts) {
    Matrix out(gram.rows(), mtb.cols());
    for (Index t = 0; t < mtb.cols(); ++t) {
        out.col(t) = nnls_gram(gram, mtb.col(t), opts);
    }
    return out;
}

}  // namespace loadforge
