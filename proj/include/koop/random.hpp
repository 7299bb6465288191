#pragma once

#include <cstdint>
#include <random>

#include <Eigen/QR>

#include "koop/matrix.hpp"

namespace koop {

using Rng = std::mt19937_64;

inline Matrix random_matrix(Index rows, Index cols, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = gauss(rng);
    return m;
}

/// Orthonormal columns: Q factor of a Gaussian rows x cols matrix, rows >= cols.
inline Matrix random_orthonormal(Index rows, Index cols, Rng& rng) {
    if (cols > rows) throw ParameterError("random_orthonormal: needs rows >= cols");
    Matrix g = random_matrix(rows, cols, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    return q;
}

/// rows x cols matrix with exactly `rank` nonzero singular values, drawn
/// log-uniformly from [sigma_min, sigma_max]. The largest is pinned to
/// sigma_max so the conditioning of the test input is known by construction.
inline Matrix random_low_rank(Index rows, Index cols, Index rank, Rng& rng,
                              double sigma_min = 1e-2, double sigma_max = 1.0) {
    Matrix u = random_orthonormal(rows, rank, rng);
    Matrix v = random_orthonormal(cols, rank, rng);
    std::uniform_real_distribution<double> unif(std::log(sigma_min), std::log(sigma_max));
    Vector s(rank);
    for (Index i = 0; i < rank; ++i) s(i) = std::exp(unif(rng));
    if (rank > 0) s(0) = sigma_max;
    return u * s.asDiagonal() * v.transpose();
}

/// Symmetric PSD matrix of known rank with eigenvalues in [lambda_min, lambda_max].
inline Matrix random_psd(Index n, Index rank, Rng& rng,
                         double lambda_min = 1e-3, double lambda_max = 1.0) {
    Matrix q = random_orthonormal(n, rank, rng);
    std::uniform_real_distribution<double> unif(std::log(lambda_min), std::log(lambda_max));
    Vector s(rank);
    for (Index i = 0; i < rank; ++i) s(i) = std::exp(unif(rng));
    if (rank > 0) s(0) = lambda_max;
    Matrix a = q * s.asDiagonal() * q.transpose();
    return symmetrize(a);
}

} // namespace koop
