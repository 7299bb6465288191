#pragma once

#include <vector>

#include "koop/matrix.hpp"

namespace koop {

/// Aligned matrices of consecutive state snapshots: column i of xf is the
/// one-step successor of column i of xp.
struct SnapshotPair {
    Matrix xp;
    Matrix xf;

    Index state_dim() const { return xp.rows(); }
    Index samples() const { return xp.cols(); }
};

/// Split a trajectory (one column per time step) into M = T-1 snapshot pairs.
inline SnapshotPair snapshots_from_trajectory(const Matrix& traj) {
    require_nonempty(traj, "snapshots_from_trajectory");
    if (traj.cols() < 2)
        throw DataError("snapshots_from_trajectory: need at least 2 columns, got " +
                        std::to_string(traj.cols()));
    require_finite(traj, "snapshots_from_trajectory");
    SnapshotPair pair;
    pair.xp = traj.leftCols(traj.cols() - 1);
    pair.xf = traj.rightCols(traj.cols() - 1);
    return pair;
}

/// Column-concatenate pairs from several trajectories. Keeps the
/// predecessor/successor alignment of each source; no pair straddles a seam.
inline SnapshotPair merge_pairs(const std::vector<SnapshotPair>& pairs) {
    if (pairs.empty()) throw DataError("merge_pairs: no snapshot pairs given");
    const Index dim = pairs.front().state_dim();
    Index total = 0;
    for (const SnapshotPair& p : pairs) {
        if (p.state_dim() != dim)
            throw DimensionError("merge_pairs: mismatched state dimensions");
        total += p.samples();
    }
    SnapshotPair out;
    out.xp.resize(dim, total);
    out.xf.resize(dim, total);
    Index at = 0;
    for (const SnapshotPair& p : pairs) {
        out.xp.middleCols(at, p.samples()) = p.xp;
        out.xf.middleCols(at, p.samples()) = p.xf;
        at += p.samples();
    }
    return out;
}

} // namespace koop
