#pragma once

#include <cstdlib>
#include <string>

#include <Eigen/Core>

#include "koop/error.hpp"

namespace koop {

// Dense real matrices/vectors are the universal carrier throughout the
// library; indexing is always (row, col).
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class GramSide { left, right };

inline bool is_finite(const Matrix& m) {
    return m.allFinite();
}

inline void require_finite(const Matrix& m, const std::string& what) {
    if (!m.allFinite()) throw DataError(what + ": non-finite entries");
}

inline void require_nonempty(const Matrix& m, const std::string& what) {
    if (m.rows() == 0 || m.cols() == 0) throw DimensionError(what + ": empty matrix");
}

/// (A + A^T)/2.
inline Matrix symmetrize(const Matrix& a) {
    return 0.5 * (a + a.transpose());
}

/// Gram matrix of M: side=left gives M^T M (cols x cols), side=right gives
/// M M^T (rows x rows). Accumulated on one triangle and mirrored, so the
/// result is symmetric exactly, not just to round-off.
inline Matrix gram(const Matrix& m, GramSide side) {
    require_nonempty(m, "gram");
    require_finite(m, "gram");
    const Index n = side == GramSide::left ? m.cols() : m.rows();
    Matrix g = Matrix::Zero(n, n);
    if (side == GramSide::left) {
        g.selfadjointView<Eigen::Lower>().rankUpdate(m.transpose());
    } else {
        g.selfadjointView<Eigen::Lower>().rankUpdate(m);
    }
    g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
    return g;
}

/// Linear-algebra thread count. Maps straight onto Eigen's internal
/// parallelism knob; with a non-OpenMP build this is a recorded no-op and
/// everything runs on one thread.
inline void set_thread_count(int n) {
    if (n < 1) throw ParameterError("thread count must be >= 1");
    Eigen::setNbThreads(n);
}

inline int thread_count() {
    return Eigen::nbThreads();
}

/// Reads KOOP_THREADS (default 1) and pins the thread count accordingly.
/// Returns the effective count.
inline int init_threads_from_env() {
    int n = 1;
    if (const char* env = std::getenv("KOOP_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw ParameterError(std::string("KOOP_THREADS: invalid value '") + env + "'");
        n = static_cast<int>(v);
    }
    set_thread_count(n);
    return thread_count();
}

} // namespace koop
