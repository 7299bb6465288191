#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>

#include "koop/matrix.hpp"
#include "koop/random.hpp"
#include "koop/snapshot.hpp"

namespace koop {

/// Ring network of damped coupled second-order linear oscillators:
/// theta_dd_k = -L_k theta - d * theta_dot_k, sampled every dt seconds.
struct RingNetworkConfig {
    Index oscillators = 0;     // N
    double damping = 0.4;      // d
    double edge_weight = 1.0;  // w
    double dt = 0.01;          // sampling interval, seconds

    void validate() const {
        if (oscillators < 3) throw ParameterError("ring network needs at least 3 oscillators");
        if (damping < 0.0) throw ParameterError("damping must be >= 0");
        if (!(edge_weight > 0.0)) throw ParameterError("edge weight must be positive");
        if (!(dt > 0.0)) throw ParameterError("dt must be positive");
    }

    Index state_dim() const { return 2 * oscillators; }
};

/// State trajectory, one column per time step; rows ordered
/// [theta_1..theta_N, theta_dot_1..theta_dot_N].
struct Trajectory {
    Matrix states;
    double dt = 0.0;
};

/// Graph Laplacian of the N-cycle with uniform edge weight w: 2w on the
/// diagonal, -w on cyclic neighbors. Symmetric PSD with zero row sums.
inline Matrix ring_laplacian(Index n, double w) {
    if (n < 3) throw ParameterError("ring_laplacian: need at least 3 nodes");
    if (!(w > 0.0)) throw ParameterError("ring_laplacian: weight must be positive");
    Matrix l = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        l(i, i) = 2.0 * w;
        l(i, (i + 1) % n) = -w;
        l(i, (i + n - 1) % n) = -w;
    }
    return l;
}

/// Block matrix A_c = [[0, I], [-L, -d I]] governing xdot = A_c x with
/// x = (theta, theta_dot).
inline Matrix continuous_state_matrix(const RingNetworkConfig& cfg) {
    cfg.validate();
    const Index n = cfg.oscillators;
    Matrix a = Matrix::Zero(2 * n, 2 * n);
    a.topRightCorner(n, n) = Matrix::Identity(n, n);
    a.bottomLeftCorner(n, n) = -ring_laplacian(n, cfg.edge_weight);
    a.bottomRightCorner(n, n) = -cfg.damping * Matrix::Identity(n, n);
    return a;
}

namespace detail {

inline Vector rk4_step(const Matrix& a, const Vector& x, double dt) {
    Vector k1 = a * x;
    Vector k2 = a * (x + (0.5 * dt) * k1);
    Vector k3 = a * (x + (0.5 * dt) * k2);
    Vector k4 = a * (x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace detail

/// Exact linear map of one RK4 step of size dt on xdot = A_c x, built by
/// stepping each canonical basis vector. For a linear system this equals
/// the degree-4 Taylor polynomial of exp(dt A_c) and is the ground-truth
/// discrete operator that EDMD should recover from trajectory data.
inline Matrix one_step_map(const RingNetworkConfig& cfg) {
    Matrix a = continuous_state_matrix(cfg);
    const Index dim = a.rows();
    Matrix ad(dim, dim);
    for (Index k = 0; k < dim; ++k)
        ad.col(k) = detail::rk4_step(a, Vector::Unit(dim, k), cfg.dt);
    return ad;
}

/// Fixed-step RK4 integration of the ring network for `steps` steps
/// (steps+1 columns). When x0 is absent, theta is drawn uniformly from
/// [-pi, pi] and theta_dot set to 0 with the seeded generator.
inline Trajectory simulate(const RingNetworkConfig& cfg, Index steps,
                           std::optional<Vector> x0 = std::nullopt,
                           std::uint64_t seed = 0) {
    cfg.validate();
    if (steps < 0) throw ParameterError("simulate: steps must be >= 0");
    const Index dim = cfg.state_dim();

    Vector x;
    if (x0) {
        if (x0->size() != dim)
            throw DimensionError("simulate: x0 has size " + std::to_string(x0->size()) +
                                 ", expected " + std::to_string(dim));
        x = *x0;
    } else {
        Rng rng(seed);
        std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
        x = Vector::Zero(dim);
        for (Index i = 0; i < cfg.oscillators; ++i) x(i) = angle(rng);
    }

    Matrix a = continuous_state_matrix(cfg);
    Trajectory traj;
    traj.dt = cfg.dt;
    traj.states.resize(dim, steps + 1);
    traj.states.col(0) = x;
    for (Index t = 0; t < steps; ++t)
        traj.states.col(t + 1) = detail::rk4_step(a, traj.states.col(t), cfg.dt);
    if (!traj.states.allFinite())
        throw NumericError("simulate: trajectory blew up to non-finite values");
    return traj;
}

/// Fully random state for mode excitation: angles uniform in [-pi, pi],
/// velocities uniform in [-1, 1]. (The default simulate initial condition
/// starts at rest, which leaves the decaying consensus mode dark forever.)
inline Vector random_initial_state(const RingNetworkConfig& cfg, Rng& rng) {
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> vel(-1.0, 1.0);
    Vector x0(cfg.state_dim());
    for (Index i = 0; i < cfg.oscillators; ++i) x0(i) = angle(rng);
    for (Index i = cfg.oscillators; i < cfg.state_dim(); ++i) x0(i) = vel(rng);
    return x0;
}

/// Merged snapshot pairs from `runs` short seeded runs with fully random
/// initial states (runs * steps_per_run pairs in total). One long run
/// cannot excite every mode: the ring Laplacian's eigenvalues pair up
/// (mu_k = mu_{N-k}), capping the Krylov span of a single initial
/// condition, and consecutive samples within a run are strongly
/// correlated. Many short runs keep the snapshot matrix well conditioned;
/// runs of about half the state dimension work well.
inline SnapshotPair multi_run_snapshots(const RingNetworkConfig& cfg, Index runs,
                                        Index steps_per_run, std::uint64_t seed) {
    if (runs < 1 || steps_per_run < 1)
        throw ParameterError("multi_run_snapshots: runs and steps_per_run must be >= 1");
    Rng rng(seed);
    std::vector<SnapshotPair> pieces;
    pieces.reserve(static_cast<std::size_t>(runs));
    for (Index i = 0; i < runs; ++i) {
        Vector x0 = random_initial_state(cfg, rng);
        pieces.push_back(snapshots_from_trajectory(simulate(cfg, steps_per_run, x0).states));
    }
    return merge_pairs(pieces);
}

} // namespace koop
