#pragma once

#include "loadforge/types.hpp"

namespace loadforge {

struct NnlsOptions {
    /// Dual feasibility tolerance, relative to max |M^T b|.
    double tol_factor = 1e-10;
    /// Cap on inner (variable-removal) iterations, as a multiple of the column count.
    int max_iter_factor = 3;
};

/// Lawson-Hanson active-set solve of min ||M x - b|| subject to x >= 0.
///
/// Throws InvalidInput on non-finite or mis-shaped input and ConvergenceError
/// (carrying the last feasible iterate) when the iteration cap is exceeded.
Vector nnls(const Matrix& M, const Vector& b, const NnlsOptions& opts = {});

/// Same solve expressed through the normal equations: `gram` = M^T M, `mtb` = M^T b.
/// Lets many right-hand sides share one Gram matrix.
Vector nnls_gram(const Matrix& gram, const Vector& mtb, const NnlsOptions& opts = {});

/// Column-wise nnls_gram over every column of `mtb` (one independent problem per column).
Matrix nnls_gram_columns(const Matrix& gram, const Matrix& mtb, const NnlsOptions& opts = {});

}  // namespace loadforge
