#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>

#include "koop/matrix.hpp"

namespace koop {

/// Eigenvalues of a real square matrix, sorted by descending magnitude;
/// ties broken by descending real part, then descending imaginary part.
struct EigenSpectrum {
    std::vector<std::complex<double>> values;

    Index size() const { return static_cast<Index>(values.size()); }
};

inline EigenSpectrum eigenvalues(const Matrix& a) {
    require_nonempty(a, "eigenvalues");
    if (a.rows() != a.cols()) throw DimensionError("eigenvalues: matrix is not square");
    require_finite(a, "eigenvalues");

    Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericError("eigenvalues: QR iteration did not converge");

    EigenSpectrum spec;
    spec.values.resize(static_cast<std::size_t>(a.rows()));
    for (Index i = 0; i < a.rows(); ++i) spec.values[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    std::sort(spec.values.begin(), spec.values.end(),
              [](const std::complex<double>& x, const std::complex<double>& y) {
                  const double ax = std::abs(x), ay = std::abs(y);
                  if (ax != ay) return ax > ay;
                  if (x.real() != y.real()) return x.real() > y.real();
                  return x.imag() > y.imag();
              });
    return spec;
}

/// Largest modulus of difference between the top_n eigenvalues of two
/// spectra after greedy nearest-neighbor pairing in the complex plane.
/// Used as the scalar discrepancy behind "the dominant eigenvalues agree".
inline double compare_spectra(const EigenSpectrum& a, const EigenSpectrum& b, Index top_n) {
    if (top_n <= 0) throw ParameterError("compare_spectra: top_n must be positive");
    if (top_n > a.size() || top_n > b.size())
        throw ParameterError("compare_spectra: top_n exceeds spectrum length");

    std::vector<bool> used(static_cast<std::size_t>(top_n), false);
    double worst = 0.0;
    for (Index i = 0; i < top_n; ++i) {
        const std::complex<double>& x = a.values[static_cast<std::size_t>(i)];
        Index best = -1;
        double best_dist = 0.0;
        for (Index j = 0; j < top_n; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            const double dist = std::abs(x - b.values[static_cast<std::size_t>(j)]);
            if (best < 0 || dist < best_dist) {
                best = j;
                best_dist = dist;
            }
        }
        used[static_cast<std::size_t>(best)] = true;
        worst = std::max(worst, best_dist);
    }
    return worst;
}

} // namespace koop
