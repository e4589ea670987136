#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "loadforge/errors.hpp"
#include "loadforge/nnls.hpp"
#include "oracles.hpp"

using namespace loadforge;

namespace {

double kkt_tolerance(const Matrix& M, const Vector& b, const Vector& x) {
    const double scale = (M.transpose() * b).lpNorm<Eigen::Infinity>() +
                         (M.transpose() * M).norm() * x.lpNorm<Eigen::Infinity>() + 1.0;
    return 1e-8 * scale;
}

void expect_kkt(const Matrix& M, const Vector& b, const Vector& x) {
    const Vector grad = M.transpose() * (M * x - b);
    const double tol = kkt_tolerance(M, b, x);
    for (Index i = 0; i < x.size(); ++i) {
        ASSERT_GE(x(i), 0.0);
        if (x(i) > 0.0) {
            EXPECT_LE(std::abs(grad(i)), tol) << "coordinate " << i;
        } else {
            EXPECT_GE(grad(i), -tol) << "coordinate " << i;
        }
    }
}

}  // namespace

TEST(Nnls, IdentityWithNonnegativeTarget) {
    const Vector x = nnls(Matrix::Identity(2, 2), Vector{{3.0, 5.0}});
    EXPECT_NEAR(x(0), 3.0, 1e-12);
    EXPECT_NEAR(x(1), 5.0, 1e-12);
}

TEST(Nnls, IdentityClampsNegativeCoordinate) {
    const Vector x = nnls(Matrix::Identity(2, 2), Vector{{3.0, -5.0}});
    EXPECT_NEAR(x(0), 3.0, 1e-12);
    EXPECT_EQ(x(1), 0.0);
}

TEST(Nnls, TwoByTwoMatchesGridOracle) {
    const Matrix M{{1.0, 1.0}, {1.0, 2.0}};
    const Vector b{{1.0, -1.0}};
    const Vector x = nnls(M, b);
    const Vector ref = oracle::nnls_grid_2d(M, b);
    EXPECT_NEAR(x(0), ref(0), 1e-6);
    EXPECT_NEAR(x(1), ref(1), 1e-6);
    EXPECT_NEAR(oracle::objective(M, b, x), oracle::objective(M, b, ref), 1e-6);
    expect_kkt(M, b, x);
}

TEST(Nnls, RandomInstancesMatchSupportEnumeration) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> dim(1, 8);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix M = oracle::random_matrix(dim(rng), dim(rng), rng);
        const Vector b = oracle::random_matrix(M.rows(), 1, rng);
        const Vector x = nnls(M, b);
        const Vector ref = oracle::nnls_enumerate(M, b);
        EXPECT_NEAR(oracle::objective(M, b, x), oracle::objective(M, b, ref), 1e-9) << "trial " << trial;
        expect_kkt(M, b, x);
    }
}

TEST(Nnls, ZeroRightHandSideGivesZero) {
    std::mt19937_64 rng(3);
    const Matrix M = oracle::random_matrix(5, 4, rng);
    EXPECT_EQ(nnls(M, Vector::Zero(5)), Vector::Zero(4));
}

TEST(Nnls, RejectsNonFiniteInput) {
    Matrix M = Matrix::Identity(2, 2);
    M(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(nnls(M, Vector::Ones(2)), InvalidInput);
    EXPECT_THROW(nnls(Matrix::Identity(2, 2), Vector{{1.0, std::numeric_limits<double>::infinity()}}), InvalidInput);
}

TEST(Nnls, RejectsShapeMismatch) { EXPECT_THROW(nnls(Matrix::Identity(3, 2), Vector::Ones(2)), InvalidInput); }

TEST(Nnls, IterationCapRaisesWithFeasibleIterate) {
    // With no inner iterations allowed, any instance that needs a variable removed must raise.
    std::mt19937_64 rng(5);
    NnlsOptions opts;
    opts.max_iter_factor = 0;
    int raised = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix M = oracle::random_matrix(10, 10, rng);
        const Vector b = oracle::random_matrix(10, 1, rng).col(0);
        try {
            nnls(M, b, opts);
        } catch (const ConvergenceError& e) {
            ++raised;
            EXPECT_EQ(e.best_iterate().size(), 10);
            EXPECT_TRUE((e.best_iterate().array() >= 0.0).all());
        }
    }
    EXPECT_GT(raised, 0);
}

TEST(Nnls, GramFormAgreesWithDirectForm) {
    std::mt19937_64 rng(8);
    const Matrix M = oracle::random_matrix(12, 6, rng);
    const Matrix B = oracle::random_matrix(12, 5, rng);
    const Matrix X = nnls_gram_columns(M.transpose() * M, M.transpose() * B);
    for (Index c = 0; c < B.cols(); ++c) {
        const Vector direct = nnls(M, B.col(c));
        EXPECT_LE((X.col(c) - direct).lpNorm<Eigen::Infinity>(), 1e-9);
    }
}

TEST(Nnls, RankDeficientColumnsStillOptimal) {
    std::mt19937_64 rng(21);
    Matrix M = oracle::random_matrix(6, 4, rng);
    M.col(3) = M.col(0) + M.col(1);
    const Vector b = oracle::random_matrix(6, 1, rng);
    const Vector x = nnls(M, b);
    const Vector ref = oracle::nnls_enumerate(M, b);
    EXPECT_NEAR(oracle::objective(M, b, x), oracle::objective(M, b, ref), 1e-9);
    expect_kkt(M, b, x);
}
