#pragma once

#include <chrono>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "koop/dictionary.hpp"
#include "koop/matrix.hpp"
#include "koop/pinv.hpp"
#include "koop/snapshot.hpp"
#include "koop/spectrum.hpp"

namespace koop {

enum class FitMethod { cholesky, svd, qr };

inline std::string to_string(FitMethod m) {
    switch (m) {
        case FitMethod::cholesky: return "cholesky";
        case FitMethod::svd: return "svd";
        case FitMethod::qr: return "qr";
    }
    throw ParameterError("unknown fit method");
}

inline FitMethod fit_method_from_string(const std::string& s) {
    if (s == "cholesky") return FitMethod::cholesky;
    if (s == "svd") return FitMethod::svd;
    if (s == "qr") return FitMethod::qr;
    throw ParameterError("unknown fit method '" + s + "'");
}

struct FitOptions {
    /// cholesky method only: solve K = (Yf Yp^T)(Yp Yp^T)^+ so that only the
    /// K_dict-sized Gram matrix is ever factored. Algebraically identical to
    /// K = Yf Yp^+ and the default; turn off to form Yp^+ explicitly.
    bool gram_fast_path = true;
    std::optional<double> svd_rcond;
};

/// Operator solve on already-lifted features: K = argmin ||K Yp - Yf||_F.
/// cholesky and svd return the minimum-norm solution; qr returns a basic
/// least-squares solution via the transposed system min ||Yp^T K^T - Yf^T||.
inline Matrix koopman_solve(const Matrix& yp, const Matrix& yf, FitMethod method,
                            const FitOptions& opt = {}) {
    if (yp.rows() != yf.rows() || yp.cols() != yf.cols())
        throw DimensionError("koopman_solve: Yp is " + std::to_string(yp.rows()) + "x" +
                             std::to_string(yp.cols()) + " but Yf is " +
                             std::to_string(yf.rows()) + "x" + std::to_string(yf.cols()));
    switch (method) {
        case FitMethod::cholesky:
            if (opt.gram_fast_path) {
                FullRankCholesky f = full_rank_cholesky(gram(yp, GramSide::right));
                return (yf * yp.transpose()) * detail::pinv_gram(f);
            }
            return yf * pinv_cholesky(yp);
        case FitMethod::svd:
            return yf * pinv_svd(yp, opt.svd_rcond);
        case FitMethod::qr:
            return lstsq_qr(yp.transpose(), yf.transpose()).transpose();
    }
    throw ParameterError("unknown fit method");
}

inline double fit_residual_rel(const Matrix& k, const Matrix& yp, const Matrix& yf) {
    const double denom = std::max(yf.norm(), std::numeric_limits<double>::epsilon());
    return (k * yp - yf).norm() / denom;
}

/// A fitted EDMD model: the operator K on dictionary space, the dictionary
/// that defines that space, and the fit diagnostics. Immutable after fit;
/// the eigenspectrum is computed on first use and cached (copies share the
/// cache).
struct KoopmanModel {
    Matrix K;
    DictionarySpec dict;
    FitMethod method = FitMethod::cholesky;
    double residual_rel = 0.0;
    double fit_seconds = 0.0;

    const EigenSpectrum& spectrum() const {
        std::call_once(cache_->once, [this] { cache_->spec = eigenvalues(K); });
        return cache_->spec;
    }

private:
    struct SpectrumCache {
        std::once_flag once;
        EigenSpectrum spec;
    };
    std::shared_ptr<SpectrumCache> cache_ = std::make_shared<SpectrumCache>();
};

inline const EigenSpectrum& spectrum(const KoopmanModel& model) {
    return model.spectrum();
}

/// Fit a Koopman operator from snapshot pairs: Yp = Psi(Xp), Yf = Psi(Xf),
/// K = Yf Yp^+ with the pseudoinverse route selected by `method`.
/// fit_seconds covers the operator solve only, not the lifting.
inline KoopmanModel edmd_fit(const SnapshotPair& pair, const DictionarySpec& dict,
                             FitMethod method, const FitOptions& opt = {}) {
    if (pair.xp.rows() != pair.xf.rows() || pair.xp.cols() != pair.xf.cols())
        throw DimensionError("edmd_fit: Xp and Xf shapes differ");
    if (pair.samples() < 1) throw DataError("edmd_fit: empty snapshot pair");

    Matrix yp = lift(dict, pair.xp);
    Matrix yf = lift(dict, pair.xf);
    require_finite(yp, "edmd_fit: lifted Xp");
    require_finite(yf, "edmd_fit: lifted Xf");

    const auto start = std::chrono::steady_clock::now();
    Matrix k = koopman_solve(yp, yf, method, opt);
    const auto stop = std::chrono::steady_clock::now();

    KoopmanModel model;
    model.K = std::move(k);
    model.dict = dict;
    model.method = method;
    model.fit_seconds = std::chrono::duration<double>(stop - start).count();
    model.residual_rel = fit_residual_rel(model.K, yp, yf);
    return model;
}

/// Evolve the lifted state: z_0 = Psi(x0), z_{t+1} = K z_t. Returns one
/// column per step, steps+1 in total. With the identity dictionary this is
/// direct multi-step state prediction.
inline Matrix predict(const KoopmanModel& model, const Vector& x0, Index steps) {
    if (steps < 0) throw ParameterError("predict: steps must be >= 0");
    Matrix z0 = lift(model.dict, x0);
    if (z0.rows() != model.K.rows())
        throw DimensionError("predict: lifted state dimension " + std::to_string(z0.rows()) +
                             " does not match operator side " + std::to_string(model.K.rows()));
    Matrix out(model.K.rows(), steps + 1);
    out.col(0) = z0.col(0);
    for (Index t = 0; t < steps; ++t) out.col(t + 1) = model.K * out.col(t);
    return out;
}

} // namespace koop
