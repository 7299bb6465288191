#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "koop/csv.hpp"
#include "koop/dictionary.hpp"
#include "koop/koopman.hpp"
#include "koop/matrix.hpp"
#include "koop/oscillator.hpp"
#include "koop/pinv.hpp"
#include "koop/random.hpp"
#include "koop/spectrum.hpp"

namespace koop {

enum class BenchScenario { pinv_random, oscillator_edmd, csv_edmd };

inline std::string to_string(BenchScenario s) {
    switch (s) {
        case BenchScenario::pinv_random: return "pinv_random";
        case BenchScenario::oscillator_edmd: return "oscillator_edmd";
        case BenchScenario::csv_edmd: return "csv_edmd";
    }
    throw ParameterError("unknown bench scenario");
}

inline BenchScenario bench_scenario_from_string(const std::string& s) {
    if (s == "pinv_random") return BenchScenario::pinv_random;
    if (s == "oscillator_edmd") return BenchScenario::oscillator_edmd;
    if (s == "csv_edmd") return BenchScenario::csv_edmd;
    throw ParameterError("unknown bench scenario '" + s + "'");
}

struct PinvProblemSize {
    Index rows = 0;
    Index cols = 0;
    Index rank = 0;
};

struct BenchConfig {
    BenchScenario scenario = BenchScenario::pinv_random;
    std::vector<Index> sizes;                // oscillator counts / csv window lengths
    std::vector<PinvProblemSize> pinv_sizes; // pinv_random problem shapes
    std::vector<FitMethod> methods;
    int repetitions = 5;
    int warmup = 1;
    std::uint64_t seed = 0;
    Index rbf_count = 0;                     // csv_edmd: 0 means identity dictionary
    std::optional<std::filesystem::path> csv_path;
    Index oscillator_steps = 5000;
    std::size_t max_gram_elements = 100'000'000; // refuse Gram sides above this
};

struct BenchRow {
    BenchScenario scenario = BenchScenario::pinv_random;
    double size = 0.0;
    FitMethod method = FitMethod::cholesky;
    double median_seconds = 0.0;
    double min_seconds = 0.0;
    double max_seconds = 0.0;
    double residual_rel = 0.0;
    std::optional<double> spectrum_gap_vs_svd;
    bool check_passed = false;
};

struct SkippedCase {
    double size = 0.0;
    std::string reason;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::vector<SkippedCase> skipped;
    int threads = 1;

    bool all_checks_passed() const {
        return std::all_of(rows.begin(), rows.end(),
                           [](const BenchRow& r) { return r.check_passed; });
    }
};

namespace detail {

struct Timings {
    double median_s = 0.0;
    double min_s = 0.0;
    double max_s = 0.0;
};

/// Run fn warmup times (discarded) then `reps` timed repetitions.
/// The result of the first timed repetition is kept for correctness checks.
inline Timings time_reps(const std::function<Matrix()>& fn, int warmup, int reps,
                         Matrix& first_result) {
    for (int i = 0; i < warmup; ++i) fn();
    std::vector<double> seconds;
    seconds.reserve(static_cast<std::size_t>(reps));
    for (int i = 0; i < reps; ++i) {
        const auto start = std::chrono::steady_clock::now();
        Matrix out = fn();
        const auto stop = std::chrono::steady_clock::now();
        seconds.push_back(std::chrono::duration<double>(stop - start).count());
        if (i == 0) first_result = std::move(out);
    }
    std::sort(seconds.begin(), seconds.end());
    Timings t;
    t.min_s = seconds.front();
    t.max_s = seconds.back();
    const std::size_t n = seconds.size();
    t.median_s = n % 2 == 1 ? seconds[n / 2] : 0.5 * (seconds[n / 2 - 1] + seconds[n / 2]);
    return t;
}

/// One benchmarked EDMD case: time the operator solve per method on fixed
/// lifted features, cross-check residuals against the svd method when it is
/// included, and record top-20 spectrum gaps vs the svd operator.
inline void bench_edmd_case(const BenchConfig& cfg, BenchScenario scenario, double size_label,
                            const Matrix& yp, const Matrix& yf, BenchReport& report) {
    struct MethodResult {
        FitMethod method;
        Timings timings;
        Matrix k;
        double residual = 0.0;
    };
    std::vector<MethodResult> results;
    for (FitMethod method : cfg.methods) {
        MethodResult res;
        res.method = method;
        res.timings = time_reps([&] { return koopman_solve(yp, yf, method); },
                                cfg.warmup, cfg.repetitions, res.k);
        res.residual = fit_residual_rel(res.k, yp, yf);
        results.push_back(std::move(res));
    }

    const MethodResult* svd_res = nullptr;
    for (const MethodResult& r : results)
        if (r.method == FitMethod::svd) svd_res = &r;
    std::optional<EigenSpectrum> svd_spec;
    if (svd_res) svd_spec = eigenvalues(svd_res->k);

    for (MethodResult& res : results) {
        BenchRow row;
        row.scenario = scenario;
        row.size = size_label;
        row.method = res.method;
        row.median_seconds = res.timings.median_s;
        row.min_seconds = res.timings.min_s;
        row.max_seconds = res.timings.max_s;
        row.residual_rel = res.residual;
        row.check_passed = std::isfinite(res.residual);
        if (svd_res) {
            // svd gives the reference least-squares residual; the timed
            // method may trail it only by the Gram route's truncation-level
            // slack, never by a silent blowup.
            row.check_passed = row.check_passed && res.residual <= svd_res->residual + 1e-5;
            const Index top = std::min<Index>(20, svd_spec->size());
            row.spectrum_gap_vs_svd = compare_spectra(eigenvalues(res.k), *svd_spec, top);
        }
        report.rows.push_back(std::move(row));
    }
}

} // namespace detail

/// Run the configured benchmark. Problems are generated (or loaded) once per
/// size from the config seed, warmup runs are discarded, and only the
/// operator solve / pseudoinverse is timed. Infeasible sizes are skipped
/// with a recorded reason rather than aborting the run.
inline BenchReport run_bench(const BenchConfig& cfg) {
    if (cfg.repetitions < 1) throw ParameterError("run_bench: repetitions must be >= 1");
    if (cfg.warmup < 0) throw ParameterError("run_bench: warmup must be >= 0");
    if (cfg.methods.empty()) throw ParameterError("run_bench: no methods selected");

    BenchReport report;
    report.threads = thread_count();

    if (cfg.scenario == BenchScenario::pinv_random) {
        if (cfg.pinv_sizes.empty()) throw ParameterError("run_bench: no problem sizes");
        for (std::size_t i = 0; i < cfg.pinv_sizes.size(); ++i) {
            const PinvProblemSize& ps = cfg.pinv_sizes[i];
            if (ps.rows < 1 || ps.cols < 1 || ps.rank < 1 || ps.rank > std::min(ps.rows, ps.cols)) {
                report.skipped.push_back({static_cast<double>(ps.rows),
                                          "invalid (rows, cols, rank) triple"});
                continue;
            }
            const std::size_t gram_side = static_cast<std::size_t>(std::min(ps.rows, ps.cols));
            if (gram_side * gram_side > cfg.max_gram_elements) {
                report.skipped.push_back({static_cast<double>(ps.rows),
                                          "Gram matrix would exceed the element cap"});
                continue;
            }
            Rng rng(cfg.seed + 0x101 * static_cast<std::uint64_t>(i));
            const Matrix m = random_low_rank(ps.rows, ps.cols, ps.rank, rng);
            const Matrix identity = Matrix::Identity(ps.rows, ps.rows);

            for (FitMethod method : cfg.methods) {
                std::function<Matrix()> fn;
                switch (method) {
                    case FitMethod::cholesky: fn = [&] { return pinv_cholesky(m); }; break;
                    case FitMethod::svd: fn = [&] { return pinv_svd(m); }; break;
                    case FitMethod::qr: fn = [&] { return lstsq_qr(m, identity); }; break;
                }
                BenchRow row;
                row.scenario = cfg.scenario;
                row.size = static_cast<double>(ps.rows);
                row.method = method;
                Matrix p;
                const detail::Timings t = detail::time_reps(fn, cfg.warmup, cfg.repetitions, p);
                row.median_seconds = t.median_s;
                row.min_seconds = t.min_s;
                row.max_seconds = t.max_s;
                // spectrum-free residual check: any least-squares inverse X
                // must satisfy M X M = M.
                const double denom = std::max(m.norm(), std::numeric_limits<double>::epsilon());
                row.residual_rel = (m * p * m - m).norm() / denom;
                row.check_passed = std::isfinite(row.residual_rel) && row.residual_rel <= 1e-8;
                report.rows.push_back(std::move(row));
            }
        }
        return report;
    }

    if (cfg.scenario == BenchScenario::oscillator_edmd) {
        if (cfg.sizes.empty()) throw ParameterError("run_bench: no problem sizes");
        for (Index n : cfg.sizes) {
            const std::size_t dim = static_cast<std::size_t>(2 * n);
            if (dim * dim > cfg.max_gram_elements) {
                report.skipped.push_back({static_cast<double>(n),
                                          "Gram matrix would exceed the element cap"});
                continue;
            }
            if (n < 3) {
                report.skipped.push_back({static_cast<double>(n), "ring needs >= 3 oscillators"});
                continue;
            }
            if (cfg.oscillator_steps < 1) {
                report.skipped.push_back({static_cast<double>(n), "needs oscillator steps >= 1"});
                continue;
            }
            RingNetworkConfig ring;
            ring.oscillators = n;
            // many short runs: a single trajectory cannot span the state
            // space (see multi_run_snapshots) and its correctness checks
            // would be vacuous
            const Index runs = std::max<Index>(1, std::min(cfg.oscillator_steps,
                                                           std::max<Index>(8, ring.state_dim() / 2)));
            const Index steps_per_run = std::max<Index>(1, cfg.oscillator_steps / runs);
            SnapshotPair pair = multi_run_snapshots(ring, runs, steps_per_run,
                                                    cfg.seed ^ static_cast<std::uint64_t>(n));
            // linear dictionary: lifted features are the states themselves
            detail::bench_edmd_case(cfg, cfg.scenario, static_cast<double>(n),
                                    pair.xp, pair.xf, report);
        }
        return report;
    }

    // csv_edmd
    if (!cfg.csv_path) throw ParameterError("run_bench: csv_edmd needs an input file");
    if (cfg.sizes.empty()) throw ParameterError("run_bench: no window lengths");
    const TimeSeriesTable table = read_csv(*cfg.csv_path);
    for (Index length : cfg.sizes) {
        if (length > table.samples.rows()) {
            report.skipped.push_back({static_cast<double>(length),
                                      "window exceeds the " + std::to_string(table.samples.rows()) +
                                          " available rows"});
            continue;
        }
        if (length < 2) {
            report.skipped.push_back({static_cast<double>(length), "window shorter than 2 rows"});
            continue;
        }
        SnapshotPair pair = to_snapshots(table, 0, length);
        DictionarySpec dict = cfg.rbf_count > 0
                                  ? build_rbf_centers(pair.xp, cfg.rbf_count, cfg.seed)
                                  : identity_dictionary();
        const std::size_t q = static_cast<std::size_t>(dict.output_dim(pair.state_dim()));
        if (q * q > cfg.max_gram_elements) {
            report.skipped.push_back({static_cast<double>(length),
                                      "Gram matrix would exceed the element cap"});
            continue;
        }
        Matrix yp = lift(dict, pair.xp);
        Matrix yf = lift(dict, pair.xf);
        detail::bench_edmd_case(cfg, cfg.scenario, static_cast<double>(length), yp, yf, report);
    }
    return report;
}

inline int bench_scenario_code(BenchScenario s) { return static_cast<int>(s); }
inline int fit_method_code(FitMethod m) { return static_cast<int>(m); }

/// Report CSV: one numeric row per benchmark row so the file round-trips
/// through read_csv. scenario: 0=pinv_random 1=oscillator_edmd 2=csv_edmd;
/// method: 0=cholesky 1=svd 2=qr; spectrum_gap_vs_svd is -1 when absent.
inline void report_to_csv(const BenchReport& report, std::ostream& out) {
    Matrix table(static_cast<Index>(report.rows.size()), 8);
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const BenchRow& r = report.rows[i];
        const Index row = static_cast<Index>(i);
        table(row, 0) = bench_scenario_code(r.scenario);
        table(row, 1) = r.size;
        table(row, 2) = fit_method_code(r.method);
        table(row, 3) = r.median_seconds;
        table(row, 4) = r.min_seconds;
        table(row, 5) = r.max_seconds;
        table(row, 6) = r.residual_rel;
        table(row, 7) = r.spectrum_gap_vs_svd.value_or(-1.0);
    }
    write_csv(out, table,
              {"scenario", "size", "method", "median_seconds", "min_seconds", "max_seconds",
               "residual_rel", "spectrum_gap_vs_svd"});
}

inline void report_to_csv(const BenchReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    report_to_csv(report, out);
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

} // namespace koop
