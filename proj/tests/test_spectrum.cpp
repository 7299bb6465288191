#include <complex>

#include <gtest/gtest.h>

#include "koop/random.hpp"
#include "koop/spectrum.hpp"
#include "test_util.hpp"

using namespace koop;
using koop::testutil::from_rows;

namespace {

// cofactor-expansion determinant, independent of any factorization
double det_cofactor(const Matrix& a) {
    const Index n = a.rows();
    if (n == 1) return a(0, 0);
    double det = 0.0;
    double sign = 1.0;
    for (Index j = 0; j < n; ++j) {
        Matrix minor(n - 1, n - 1);
        for (Index r = 1; r < n; ++r) {
            Index mc = 0;
            for (Index c = 0; c < n; ++c)
                if (c != j) minor(r - 1, mc++) = a(r, c);
        }
        det += sign * a(0, j) * det_cofactor(minor);
        sign = -sign;
    }
    return det;
}

} // namespace

TEST(Eigenvalues, DiagonalSorted) {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = 3.0;
    EigenSpectrum s = eigenvalues(a);
    EXPECT_NEAR(s.values[0].real(), 3.0, 1e-12);
    EXPECT_NEAR(s.values[1].real(), 2.0, 1e-12);
}

TEST(Eigenvalues, RotationGivesConjugatePair) {
    // characteristic polynomial of [[0,1],[-1,0]] is l^2 + 1
    EigenSpectrum s = eigenvalues(from_rows({{0, 1}, {-1, 0}}));
    EXPECT_NEAR(s.values[0].real(), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(s.values[0].imag()), 1.0, 1e-14);
    EXPECT_NEAR((s.values[0] + s.values[1]).imag(), 0.0, 1e-14);
    // tie on magnitude and real part: +i sorts before -i
    EXPECT_GT(s.values[0].imag(), 0.0);
}

TEST(Eigenvalues, IdentityAllOnes) {
    EigenSpectrum s = eigenvalues(Matrix::Identity(5, 5));
    for (const auto& v : s.values) {
        EXPECT_NEAR(v.real(), 1.0, 1e-12);
        EXPECT_NEAR(v.imag(), 0.0, 1e-12);
    }
}

TEST(Eigenvalues, NonSquareRejected) {
    EXPECT_THROW(eigenvalues(Matrix::Ones(2, 3)), DimensionError);
}

TEST(Eigenvalues, TraceDeterminantAndConjugacy) {
    Rng rng(314);
    for (int trial = 0; trial < 40; ++trial) {
        const Index n = 1 + static_cast<Index>(rng() % 6);
        Matrix a = random_matrix(n, n, rng);
        EigenSpectrum s = eigenvalues(a);

        std::complex<double> sum = 0.0;
        std::complex<double> prod = 1.0;
        for (const auto& v : s.values) {
            sum += v;
            prod *= v;
        }
        EXPECT_NEAR(sum.real(), a.trace(), 1e-8 * (1.0 + std::abs(a.trace())));
        EXPECT_NEAR(sum.imag(), 0.0, 1e-10);
        const double det = det_cofactor(a);
        EXPECT_NEAR(prod.real(), det, 1e-8 * (1.0 + std::abs(det)));

        // complex values must occur in conjugate pairs
        std::vector<std::complex<double>> pending;
        for (const auto& v : s.values) {
            if (std::abs(v.imag()) < 1e-14) continue;
            auto it = std::find_if(pending.begin(), pending.end(), [&](const auto& w) {
                return std::abs(std::conj(w) - v) <= 1e-10 * (1.0 + std::abs(v));
            });
            if (it != pending.end())
                pending.erase(it);
            else
                pending.push_back(v);
        }
        EXPECT_TRUE(pending.empty());
    }
}

TEST(Eigenvalues, SortOrderIsDescendingByMagnitude) {
    Rng rng(11);
    Matrix a = random_matrix(12, 12, rng);
    EigenSpectrum s = eigenvalues(a);
    for (std::size_t i = 0; i + 1 < s.values.size(); ++i)
        EXPECT_GE(std::abs(s.values[i]), std::abs(s.values[i + 1]) - 1e-15);
}

TEST(CompareSpectra, IdenticalSpectraGiveZero) {
    EigenSpectrum s = eigenvalues(Matrix::Identity(4, 4));
    EXPECT_EQ(compare_spectra(s, s, 4), 0.0);
}

TEST(CompareSpectra, SinglePairDifference) {
    EigenSpectrum a, b;
    a.values = {{1.0, 0.0}};
    b.values = {{1.0, 1e-9}};
    EXPECT_NEAR(compare_spectra(a, b, 1), 1e-9, 1e-18);
}

TEST(CompareSpectra, PairsNearestNeighborsAcrossSortOrder) {
    // same multiset, listed in a different order within the top group
    EigenSpectrum a, b;
    a.values = {{1.0, 0.1}, {1.0, -0.1}, {0.5, 0.0}};
    b.values = {{1.0, -0.1}, {1.0, 0.1}, {0.5, 0.0}};
    EXPECT_LE(compare_spectra(a, b, 3), 1e-15);
}

TEST(CompareSpectra, ParameterValidation) {
    EigenSpectrum s = eigenvalues(Matrix::Identity(2, 2));
    EXPECT_THROW(compare_spectra(s, s, 0), ParameterError);
    EXPECT_THROW(compare_spectra(s, s, 3), ParameterError);
}
