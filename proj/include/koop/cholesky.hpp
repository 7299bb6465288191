#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "koop/matrix.hpp"

namespace koop {

/// Result of the rank-revealing Cholesky factorization of a symmetric PSD
/// matrix A: A ~= L L^T with L of size q x r, r = numerical rank. Column c
/// of L is zero above its pivot row, and the pivot entries
/// L(pivot_rows[c], c) are strictly positive.
struct FullRankCholesky {
    Matrix L;
    Index rank = 0;
    double pivot_tol = 0.0;
    std::vector<Index> pivot_rows;
};

/// Full-rank Cholesky of a symmetric positive semidefinite matrix.
///
/// Left-looking, column by column: at row j the residual diagonal
/// d = A(j,j) - sum_k L(j,k)^2 decides whether row j carries a new pivot
/// column (d > tol) or is skipped (|d| small). Skipped rows contribute no
/// column, so a rank-r input yields a q x r factor. A residual diagonal
/// below -100*tol means the input is not a Gram matrix and is an error.
///
/// The default tolerance is q * eps^(2/3) * max_i A(i,i), with a floor of
/// eps when the diagonal carries no positive entry. Rows are processed in
/// order (no diagonal pivoting), so round-off at dependent rows grows with
/// the condition number of the kept block; the eps^(2/3) margin keeps that
/// noise from registering as rank. A pivot accepted out of noise is fatal
/// downstream: its reciprocal enters (L^T L)^-1 squared.
inline FullRankCholesky full_rank_cholesky(const Matrix& a,
                                           std::optional<double> tol = std::nullopt) {
    require_nonempty(a, "full_rank_cholesky");
    require_finite(a, "full_rank_cholesky");
    const Index q = a.rows();
    if (a.cols() != q) throw DimensionError("full_rank_cholesky: matrix is not square");

    const double scale = a.cwiseAbs().maxCoeff();
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * (1.0 + scale))
        throw DimensionError("full_rank_cholesky: matrix is not symmetric");

    constexpr double eps = std::numeric_limits<double>::epsilon();
    double pivot_tol;
    if (tol) {
        pivot_tol = *tol;
    } else {
        const double max_diag = a.diagonal().maxCoeff();
        const double eps23 = std::cbrt(eps) * std::cbrt(eps);
        pivot_tol = max_diag > 0.0 ? static_cast<double>(q) * eps23 * max_diag : eps;
    }

    Matrix l = Matrix::Zero(q, q);
    std::vector<Index> pivot_rows;
    Index r = 0;
    for (Index j = 0; j < q; ++j) {
        double d = a(j, j);
        if (r > 0) d -= l.row(j).head(r).squaredNorm();
        if (d > pivot_tol) {
            const double pivot = std::sqrt(d);
            l(j, r) = pivot;
            const Index below = q - j - 1;
            if (below > 0) {
                Vector col = a.col(j).tail(below);
                if (r > 0)
                    col.noalias() -= l.block(j + 1, 0, below, r) * l.row(j).head(r).transpose();
                l.col(r).tail(below) = col / pivot;
            }
            pivot_rows.push_back(j);
            ++r;
        } else if (d < -100.0 * pivot_tol) {
            throw NumericError("full_rank_cholesky: matrix is not positive semidefinite "
                               "(residual diagonal " + std::to_string(d) + " at row " +
                               std::to_string(j) + ")");
        }
        // otherwise row j is numerically dependent on earlier rows: skip
    }

    FullRankCholesky out;
    out.L = l.leftCols(r);
    out.rank = r;
    out.pivot_tol = pivot_tol;
    out.pivot_rows = std::move(pivot_rows);
    return out;
}

} // namespace koop
