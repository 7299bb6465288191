#pragma once

#include <limits>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "koop/cholesky.hpp"
#include "koop/matrix.hpp"

namespace koop {

namespace detail {

/// (L^T L)^-1 for a full-column-rank L, via a dense Cholesky solve against
/// the identity. L^T L is r x r SPD by construction.
inline Matrix inv_ltl(const Matrix& l) {
    const Index r = l.cols();
    Matrix t = gram(l, GramSide::left);
    Eigen::LLT<Matrix> llt(t);
    if (llt.info() != Eigen::Success)
        throw NumericError("pinv_cholesky: Cholesky of L^T L failed");
    return llt.solve(Matrix::Identity(r, r));
}

/// Moore-Penrose inverse of a Gram matrix from its full-rank factor:
/// (L L^T)^+ = L (L^T L)^-1 (L^T L)^-1 L^T.
inline Matrix pinv_gram(const FullRankCholesky& f) {
    const Index q = f.L.rows();
    if (f.rank == 0) return Matrix::Zero(q, q);
    Matrix t_inv = inv_ltl(f.L);
    Matrix w = f.L * (t_inv * t_inv);
    return w * f.L.transpose();
}

} // namespace detail

/// Moore-Penrose inverse via full-rank Cholesky factorization of a Gram
/// matrix (Courrieu, "Fast Computation of Moore-Penrose Inverse Matrices",
/// 2008). The Gram matrix is taken on the smaller side, so only a
/// min(p,q) x min(p,q) matrix is ever factored:
///
///   p >= q:  M^+ = L (L^T L)^-1 (L^T L)^-1 L^T M^T,   L L^T = M^T M
///   p <  q:  M^+ = M^T L (L^T L)^-1 (L^T L)^-1 L^T,   L L^T = M M^T
///
/// Forming the Gram matrix squares the condition number of M; for inputs
/// that are too ill-conditioned for that, pinv_svd is the fallback route.
inline Matrix pinv_cholesky(const Matrix& m) {
    require_nonempty(m, "pinv_cholesky");
    require_finite(m, "pinv_cholesky");
    const Index p = m.rows();
    const Index q = m.cols();

    if (p < q) {
        FullRankCholesky f = full_rank_cholesky(gram(m, GramSide::right));
        if (f.rank == 0) return Matrix::Zero(q, p);
        Matrix t_inv = detail::inv_ltl(f.L);
        Matrix z = t_inv * (t_inv * f.L.transpose()); // r x p
        return m.transpose() * (f.L * z);
    }
    FullRankCholesky f = full_rank_cholesky(gram(m, GramSide::left));
    if (f.rank == 0) return Matrix::Zero(q, p);
    Matrix t_inv = detail::inv_ltl(f.L);
    Matrix y = f.L.transpose() * m.transpose();       // r x p
    Matrix z = t_inv * (t_inv * y);                   // r x p
    return f.L * z;
}

/// Moore-Penrose inverse via SVD; singular values at or below
/// rcond * sigma_max are truncated. Default rcond = max(p,q) * eps.
/// This is the baseline the Cholesky route is checked against.
inline Matrix pinv_svd(const Matrix& m, std::optional<double> rcond = std::nullopt) {
    require_nonempty(m, "pinv_svd");
    require_finite(m, "pinv_svd");
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double rc = rcond.value_or(static_cast<double>(std::max(m.rows(), m.cols())) * eps);

    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw NumericError("pinv_svd: SVD did not converge");

    const Vector& s = svd.singularValues();
    const double cutoff = s.size() > 0 ? rc * s(0) : 0.0;
    Vector s_inv = Vector::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff) s_inv(i) = 1.0 / s(i);
    return svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
}

/// Least-squares solve min_X ||A X - B||_F via column-pivoted QR. For
/// rank-deficient A this returns a basic minimizer (zeros in the non-pivot
/// rows), not the minimum-norm one -- the same semantics as a
/// backslash-style solver.
///
/// The back-substitution is truncated at the decomposition's revealed rank;
/// ColPivHouseholderQR::solve itself keeps round-off-level pivots and
/// produces huge, residual-degrading solutions on rank-deficient input.
inline Matrix lstsq_qr(const Matrix& a, const Matrix& b) {
    require_nonempty(a, "lstsq_qr");
    require_nonempty(b, "lstsq_qr");
    if (a.rows() != b.rows())
        throw DimensionError("lstsq_qr: A has " + std::to_string(a.rows()) +
                             " rows, B has " + std::to_string(b.rows()));
    require_finite(a, "lstsq_qr");
    require_finite(b, "lstsq_qr");

    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    const Index rank = qr.rank();
    if (rank == 0) return Matrix::Zero(a.cols(), b.cols());
    Matrix c = b;
    c.applyOnTheLeft(qr.householderQ().setLength(rank).adjoint());
    Matrix z = qr.matrixQR()
                   .topLeftCorner(rank, rank)
                   .triangularView<Eigen::Upper>()
                   .solve(c.topRows(rank));
    Matrix x = Matrix::Zero(a.cols(), b.cols());
    for (Index i = 0; i < rank; ++i) x.row(qr.colsPermutation().indices()(i)) = z.row(i);
    return x;
}

} // namespace koop
