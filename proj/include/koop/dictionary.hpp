#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include <json.hpp>

#include "koop/matrix.hpp"
#include "koop/random.hpp"

namespace koop {

enum class DictionaryKind { identity, gaussian_rbf };

/// Observable functions lifting state snapshots into feature space.
/// identity: Psi(x) = x. gaussian_rbf: psi_c(x) = exp(-||x - c||^2 / (2 sigma^2))
/// for each center c (one column of `centers`), optionally with the raw state
/// appended below the RBF block.
struct DictionarySpec {
    DictionaryKind kind = DictionaryKind::identity;
    Matrix centers;           // state_dim x K_rbf, empty for identity
    double bandwidth = 0.0;   // sigma, RBF only
    bool include_state = false;
    std::uint64_t seed = 0;   // seed the centers were sampled with

    Index output_dim(Index state_dim) const {
        if (kind == DictionaryKind::identity) return state_dim;
        return centers.cols() + (include_state ? state_dim : 0);
    }
};

inline DictionarySpec identity_dictionary() {
    return DictionarySpec{};
}

inline DictionarySpec rbf_dictionary(Matrix centers, double bandwidth,
                                     bool include_state = false, std::uint64_t seed = 0) {
    if (centers.cols() < 1) throw ParameterError("rbf_dictionary: at least one center required");
    if (!(bandwidth > 0.0)) throw ParameterError("rbf_dictionary: bandwidth must be positive");
    require_finite(centers, "rbf_dictionary centers");
    DictionarySpec d;
    d.kind = DictionaryKind::gaussian_rbf;
    d.centers = std::move(centers);
    d.bandwidth = bandwidth;
    d.include_state = include_state;
    d.seed = seed;
    return d;
}

/// Lift snapshot columns into feature space: column j of the output is
/// Psi(x_j). Distances to centers are computed directly per pair, so a
/// snapshot equal to a center yields a feature of exactly 1.
inline Matrix lift(const DictionarySpec& dict, const Matrix& x) {
    require_nonempty(x, "lift");
    require_finite(x, "lift");
    if (dict.kind == DictionaryKind::identity) return x;

    if (!(dict.bandwidth > 0.0)) throw ParameterError("lift: bandwidth must be positive");
    if (x.rows() != dict.centers.rows())
        throw DimensionError("lift: state dimension " + std::to_string(x.rows()) +
                             " does not match center dimension " +
                             std::to_string(dict.centers.rows()));

    const Index k = dict.centers.cols();
    const Index m = x.cols();
    const double inv_two_sigma2 = 1.0 / (2.0 * dict.bandwidth * dict.bandwidth);
    Matrix y(dict.output_dim(x.rows()), m);
    for (Index c = 0; c < k; ++c) {
        y.row(c) = (-inv_two_sigma2 *
                    (x.colwise() - dict.centers.col(c)).colwise().squaredNorm())
                       .array()
                       .exp();
    }
    if (dict.include_state) y.bottomRows(x.rows()) = x;
    return y;
}

namespace detail {

/// First k entries of a seeded partial Fisher-Yates shuffle of 0..m-1.
/// The first k draws do not depend on how many more would follow, so
/// samples for growing k are nested.
inline std::vector<Index> sample_without_replacement(Index m, Index k, Rng& rng) {
    std::vector<Index> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), Index{0});
    for (Index i = 0; i < k; ++i) {
        std::uniform_int_distribution<Index> pick(i, m - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    idx.resize(static_cast<std::size_t>(k));
    return idx;
}

/// Median pairwise Euclidean distance among the given columns of x.
inline double median_pairwise_distance(const Matrix& x, const std::vector<Index>& cols) {
    std::vector<double> dists;
    dists.reserve(cols.size() * (cols.size() - 1) / 2);
    for (std::size_t i = 0; i < cols.size(); ++i)
        for (std::size_t j = i + 1; j < cols.size(); ++j)
            dists.push_back((x.col(cols[i]) - x.col(cols[j])).norm());
    if (dists.empty()) throw ParameterError("median bandwidth: need at least two samples");
    std::sort(dists.begin(), dists.end());
    const std::size_t n = dists.size();
    return n % 2 == 1 ? dists[n / 2] : 0.5 * (dists[n / 2 - 1] + dists[n / 2]);
}

} // namespace detail

/// Build an RBF dictionary from training data: centers are k_rbf distinct
/// columns of X sampled with a seeded generator. The bandwidth is either
/// given explicitly or set to the median pairwise distance among a capped
/// subsample (<= 500 columns) of X; the subsample is drawn from a generator
/// seeded independently of k_rbf, so the bandwidth depends only on (X, seed).
inline DictionarySpec build_rbf_centers(const Matrix& x, Index k_rbf, std::uint64_t seed,
                                        std::optional<double> bandwidth = std::nullopt,
                                        bool include_state = false) {
    require_nonempty(x, "build_rbf_centers");
    require_finite(x, "build_rbf_centers");
    if (k_rbf < 1) throw ParameterError("build_rbf_centers: k_rbf must be >= 1");
    if (k_rbf > x.cols())
        throw ParameterError("build_rbf_centers: k_rbf " + std::to_string(k_rbf) +
                             " exceeds the " + std::to_string(x.cols()) + " available columns");

    Rng center_rng(seed);
    std::vector<Index> picked = detail::sample_without_replacement(x.cols(), k_rbf, center_rng);
    Matrix centers(x.rows(), k_rbf);
    for (Index i = 0; i < k_rbf; ++i) centers.col(i) = x.col(picked[static_cast<std::size_t>(i)]);

    double sigma;
    if (bandwidth) {
        sigma = *bandwidth;
        if (!(sigma > 0.0)) throw ParameterError("build_rbf_centers: bandwidth must be positive");
    } else {
        constexpr Index cap = 500;
        Rng median_rng(seed ^ 0x9e3779b97f4a7c15ull);
        std::vector<Index> sub;
        if (x.cols() <= cap) {
            sub.resize(static_cast<std::size_t>(x.cols()));
            std::iota(sub.begin(), sub.end(), Index{0});
        } else {
            sub = detail::sample_without_replacement(x.cols(), cap, median_rng);
        }
        sigma = detail::median_pairwise_distance(x, sub);
        if (!(sigma > 0.0))
            throw ParameterError("build_rbf_centers: median pairwise distance is zero "
                                 "(degenerate data); pass an explicit bandwidth");
    }
    return rbf_dictionary(std::move(centers), sigma, include_state, seed);
}

inline nlohmann::json to_json(const DictionarySpec& dict) {
    nlohmann::json j;
    if (dict.kind == DictionaryKind::identity) {
        j["kind"] = "identity";
        return j;
    }
    j["kind"] = "gaussian_rbf";
    j["bandwidth"] = dict.bandwidth;
    j["include_state"] = dict.include_state;
    j["seed"] = dict.seed;
    std::vector<std::vector<double>> centers;
    centers.reserve(static_cast<std::size_t>(dict.centers.cols()));
    for (Index c = 0; c < dict.centers.cols(); ++c) {
        std::vector<double> v(static_cast<std::size_t>(dict.centers.rows()));
        for (Index i = 0; i < dict.centers.rows(); ++i) v[static_cast<std::size_t>(i)] = dict.centers(i, c);
        centers.push_back(std::move(v));
    }
    j["centers"] = centers;
    return j;
}

inline DictionarySpec dictionary_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "identity") return identity_dictionary();
    if (kind != "gaussian_rbf") throw DataError("dictionary: unknown kind '" + kind + "'");

    const auto& rows = j.at("centers");
    if (rows.empty()) throw DataError("dictionary: empty center list");
    const Index k = static_cast<Index>(rows.size());
    const Index dim = static_cast<Index>(rows.at(0).size());
    Matrix centers(dim, k);
    for (Index c = 0; c < k; ++c) {
        const auto& v = rows.at(static_cast<std::size_t>(c));
        if (static_cast<Index>(v.size()) != dim)
            throw DataError("dictionary: ragged center list");
        for (Index i = 0; i < dim; ++i) centers(i, c) = v.at(static_cast<std::size_t>(i)).get<double>();
    }
    return rbf_dictionary(std::move(centers), j.at("bandwidth").get<double>(),
                          j.value("include_state", false), j.value("seed", std::uint64_t{0}));
}

} // namespace koop
