// koop: command-line front end for simulating the oscillator ring network,
// fitting Koopman operators from CSV trajectories, inspecting spectra,
// predicting, and benchmarking the pseudoinverse routes.
//
// Exit codes: 0 success, 1 data/numeric error, 2 usage error.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "koop/koop.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ManifestWriter {
    std::string command;
    json parameters;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void write(const fs::path& path) const {
        json m;
        m["command"] = command;
        m["parameters"] = parameters;
        m["outputs"] = outputs;
        m["version"] = koop::version();
        m["threads"] = koop::thread_count();
        m["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        koop::detail::write_text_atomic(path, m.dump(2) + "\n");
    }
};

std::vector<std::string> oscillator_column_names(koop::Index n) {
    std::vector<std::string> names;
    for (koop::Index i = 1; i <= n; ++i) names.push_back("theta_" + std::to_string(i));
    for (koop::Index i = 1; i <= n; ++i) names.push_back("omega_" + std::to_string(i));
    return names;
}

struct WindowSpec {
    koop::Index start = 0;
    koop::Index length = -1; // -1: whole table
};

WindowSpec parse_window(const std::string& text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos)
        throw koop::ParameterError("--window expects start:length, got '" + text + "'");
    WindowSpec w;
    try {
        w.start = std::stoll(text.substr(0, colon));
        w.length = std::stoll(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw koop::ParameterError("--window expects integers, got '" + text + "'");
    }
    if (w.start < 0 || w.length < 2)
        throw koop::ParameterError("--window needs start >= 0 and length >= 2");
    return w;
}

koop::SnapshotPair load_snapshots(const std::vector<std::string>& data_paths,
                                  const std::optional<std::string>& window) {
    std::vector<koop::SnapshotPair> pieces;
    for (const std::string& path : data_paths) {
        koop::TimeSeriesTable table = koop::read_csv(fs::path(path));
        WindowSpec w;
        if (window) w = parse_window(*window);
        const koop::Index length = w.length < 0 ? table.samples.rows() - w.start : w.length;
        pieces.push_back(koop::to_snapshots(table, w.start, length));
    }
    return koop::merge_pairs(pieces);
}

std::vector<koop::FitMethod> parse_methods(const std::vector<std::string>& names) {
    std::vector<koop::FitMethod> methods;
    for (const std::string& n : names) methods.push_back(koop::fit_method_from_string(n));
    return methods;
}

koop::Vector parse_x0(const std::string& text) {
    if (fs::exists(fs::path(text))) {
        koop::TimeSeriesTable table = koop::read_csv(fs::path(text));
        return table.samples.row(0).transpose();
    }
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string cell =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        double v;
        if (!koop::detail::parse_cell(cell, v))
            throw koop::DataError("--x0: '" + cell + "' is not numeric and not a file");
        values.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    koop::Vector x0(static_cast<koop::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) x0(static_cast<koop::Index>(i)) = values[i];
    return x0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    koop::Index oscillators = 0;
    koop::Index steps = 5000;
    double dt = 0.01;
    double damping = 0.4;
    double edge_weight = 1.0;
    std::uint64_t seed = 0;
    std::string out;
};

int run_simulate(const SimulateArgs& a) {
    ManifestWriter manifest;
    manifest.command = "simulate";
    manifest.parameters = {{"oscillators", a.oscillators}, {"steps", a.steps},
                           {"dt", a.dt},                   {"damping", a.damping},
                           {"edge_weight", a.edge_weight}, {"seed", a.seed},
                           {"out", a.out}};

    koop::RingNetworkConfig cfg;
    cfg.oscillators = a.oscillators;
    cfg.damping = a.damping;
    cfg.edge_weight = a.edge_weight;
    cfg.dt = a.dt;
    koop::Trajectory traj = koop::simulate(cfg, a.steps, std::nullopt, a.seed);

    koop::write_csv(fs::path(a.out), traj.states.transpose(),
                    oscillator_column_names(a.oscillators), traj.dt);
    manifest.outputs = {a.out};
    manifest.write(fs::path(a.out + ".manifest.json"));
    std::cout << "wrote " << traj.states.cols() << " samples of " << traj.states.rows()
              << " states to " << a.out << "\n";
    return 0;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
    std::vector<std::string> data;
    std::string dict = "identity";
    koop::Index rbf_count = 0;
    std::optional<double> bandwidth;
    bool include_state = false;
    std::string method = "cholesky";
    std::optional<std::string> window;
    std::uint64_t seed = 0;
    bool direct = false;
    std::string out;
};

int run_fit(const FitArgs& a) {
    ManifestWriter manifest;
    manifest.command = "fit";
    manifest.parameters = {{"data", a.data},
                           {"dict", a.dict},
                           {"rbf_count", a.rbf_count},
                           {"bandwidth", a.bandwidth ? json(*a.bandwidth) : json()},
                           {"include_state", a.include_state},
                           {"method", a.method},
                           {"window", a.window ? json(*a.window) : json()},
                           {"seed", a.seed},
                           {"direct", a.direct},
                           {"out", a.out}};

    koop::SnapshotPair pair = load_snapshots(a.data, a.window);

    koop::DictionarySpec dict;
    if (a.dict == "identity") {
        dict = koop::identity_dictionary();
    } else if (a.dict == "rbf") {
        if (a.rbf_count < 1)
            throw koop::ParameterError("--dict rbf requires --rbf-count >= 1");
        dict = koop::build_rbf_centers(pair.xp, a.rbf_count, a.seed, a.bandwidth,
                                       a.include_state);
    } else {
        throw koop::ParameterError("--dict must be identity or rbf, got '" + a.dict + "'");
    }

    koop::FitOptions opt;
    opt.gram_fast_path = !a.direct;
    koop::KoopmanModel model =
        koop::edmd_fit(pair, dict, koop::fit_method_from_string(a.method), opt);

    koop::save_model(model, fs::path(a.out));
    manifest.outputs = {a.out + "/K.csv", a.out + "/dictionary.json", a.out + "/metadata.json"};
    manifest.write(fs::path(a.out) / "manifest.json");
    std::cout << "operator " << model.K.rows() << "x" << model.K.cols()
              << "  residual_rel " << model.residual_rel
              << "  fit_seconds " << model.fit_seconds << "\n";
    return 0;
}

// --------------------------------------------------------------------- eig

struct EigArgs {
    std::string model;
    koop::Index top = 0; // 0: all
    std::string out;
    std::optional<std::string> compare;
};

int run_eig(const EigArgs& a) {
    ManifestWriter manifest;
    manifest.command = "eig";
    manifest.parameters = {{"model", a.model},
                           {"top", a.top},
                           {"out", a.out},
                           {"compare", a.compare ? json(*a.compare) : json()}};

    koop::KoopmanModel model = koop::load_model(fs::path(a.model));
    const koop::EigenSpectrum& spec = koop::spectrum(model);
    const koop::Index rows = a.top > 0 ? std::min<koop::Index>(a.top, spec.size()) : spec.size();

    koop::Matrix table(rows, 3);
    for (koop::Index i = 0; i < rows; ++i) {
        const auto& v = spec.values[static_cast<std::size_t>(i)];
        table(i, 0) = v.real();
        table(i, 1) = v.imag();
        table(i, 2) = std::abs(v);
    }
    koop::write_csv(fs::path(a.out), table, {"re", "im", "magnitude"});
    manifest.outputs = {a.out};

    if (a.compare) {
        koop::KoopmanModel other = koop::load_model(fs::path(*a.compare));
        const koop::EigenSpectrum& other_spec = koop::spectrum(other);
        const koop::Index top =
            std::min(a.top > 0 ? a.top : 20, std::min(spec.size(), other_spec.size()));
        const double gap = koop::compare_spectra(spec, other_spec, top);
        std::cout << "spectrum gap (top " << top << ") vs " << *a.compare << ": " << gap << "\n";
    }
    manifest.write(fs::path(a.out + ".manifest.json"));
    return 0;
}

// ----------------------------------------------------------------- predict

struct PredictArgs {
    std::string model;
    std::string x0;
    koop::Index steps = 0;
    std::string out;
};

int run_predict(const PredictArgs& a) {
    ManifestWriter manifest;
    manifest.command = "predict";
    manifest.parameters = {{"model", a.model}, {"x0", a.x0}, {"steps", a.steps}, {"out", a.out}};

    koop::KoopmanModel model = koop::load_model(fs::path(a.model));
    koop::Vector x0 = parse_x0(a.x0);
    koop::Matrix lifted = koop::predict(model, x0, a.steps);

    std::vector<std::string> names;
    for (koop::Index i = 0; i < lifted.rows(); ++i) names.push_back("z" + std::to_string(i));
    koop::write_csv(fs::path(a.out), lifted.transpose(), names);
    manifest.outputs = {a.out};
    manifest.write(fs::path(a.out + ".manifest.json"));
    std::cout << "wrote " << lifted.cols() << " steps of " << lifted.rows()
              << " lifted coordinates to " << a.out << "\n";
    return 0;
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
    std::string scenario;
    std::vector<std::string> sizes;
    std::vector<std::string> methods{"cholesky", "svd"};
    int reps = 5;
    int warmup = 1;
    std::uint64_t seed = 0;
    koop::Index rbf_count = 0;
    koop::Index steps = 5000;
    std::optional<std::string> data;
    std::size_t max_gram_elements = 100'000'000;
    std::string out;
};

int run_bench_cmd(const BenchArgs& a) {
    ManifestWriter manifest;
    manifest.command = "bench";
    manifest.parameters = {{"scenario", a.scenario},
                           {"sizes", a.sizes},
                           {"methods", a.methods},
                           {"reps", a.reps},
                           {"warmup", a.warmup},
                           {"seed", a.seed},
                           {"rbf_count", a.rbf_count},
                           {"steps", a.steps},
                           {"data", a.data ? json(*a.data) : json()},
                           {"max_gram_elements", a.max_gram_elements},
                           {"out", a.out}};

    koop::BenchConfig cfg;
    cfg.scenario = koop::bench_scenario_from_string(a.scenario);
    cfg.methods = parse_methods(a.methods);
    cfg.repetitions = a.reps;
    cfg.warmup = a.warmup;
    cfg.seed = a.seed;
    cfg.rbf_count = a.rbf_count;
    cfg.oscillator_steps = a.steps;
    cfg.max_gram_elements = a.max_gram_elements;
    if (a.data) cfg.csv_path = fs::path(*a.data);

    for (const std::string& s : a.sizes) {
        if (cfg.scenario == koop::BenchScenario::pinv_random) {
            koop::PinvProblemSize ps;
            if (std::sscanf(s.c_str(), "%td:%td:%td", &ps.rows, &ps.cols, &ps.rank) != 3)
                throw koop::ParameterError("--sizes for pinv_random expects rows:cols:rank, got '" +
                                           s + "'");
            cfg.pinv_sizes.push_back(ps);
        } else {
            try {
                cfg.sizes.push_back(std::stoll(s));
            } catch (const std::exception&) {
                throw koop::ParameterError("--sizes expects integers, got '" + s + "'");
            }
        }
    }

    koop::BenchReport report = koop::run_bench(cfg);
    koop::report_to_csv(report, fs::path(a.out));
    manifest.outputs = {a.out};
    manifest.write(fs::path(a.out + ".manifest.json"));

    for (const koop::SkippedCase& skip : report.skipped)
        std::cerr << "skipped size " << skip.size << ": " << skip.reason << "\n";
    for (const koop::BenchRow& row : report.rows)
        std::cout << koop::to_string(row.scenario) << " size " << row.size << " "
                  << koop::to_string(row.method) << ": median " << row.median_seconds
                  << " s  residual " << row.residual_rel
                  << (row.check_passed ? "" : "  CHECK FAILED") << "\n";
    if (!report.all_checks_passed())
        throw koop::NumericError("bench: a correctness cross-check failed");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Koopman operator learning with a Cholesky-based pseudoinverse"};
    app.set_version_flag("--version", koop::version());
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* c_sim = app.add_subcommand("simulate", "simulate the oscillator ring network");
    c_sim->add_option("--oscillators", sim.oscillators, "number of oscillators (>= 3)")
        ->required();
    c_sim->add_option("--steps", sim.steps, "number of RK4 steps")->capture_default_str();
    c_sim->add_option("--dt", sim.dt, "sampling interval, seconds")->capture_default_str();
    c_sim->add_option("--damping", sim.damping, "damping coefficient")->capture_default_str();
    c_sim->add_option("--edge-weight", sim.edge_weight, "ring edge weight")
        ->capture_default_str();
    c_sim->add_option("--seed", sim.seed, "seed for the initial condition")
        ->capture_default_str();
    c_sim->add_option("--out", sim.out, "output trajectory CSV")->required();

    FitArgs fit;
    CLI::App* c_fit = app.add_subcommand("fit", "fit a Koopman operator from trajectory CSVs");
    c_fit->add_option("--data", fit.data, "trajectory CSV (repeat to concatenate runs)")
        ->required();
    c_fit->add_option("--dict", fit.dict, "dictionary: identity or rbf")
        ->capture_default_str();
    c_fit->add_option("--rbf-count", fit.rbf_count, "number of RBF centers (rbf dictionary)");
    c_fit->add_option("--bandwidth", fit.bandwidth,
                      "explicit RBF bandwidth (default: median heuristic)");
    c_fit->add_flag("--include-state", fit.include_state, "append raw state to RBF features");
    c_fit->add_option("--method", fit.method, "cholesky, svd, or qr")->capture_default_str();
    c_fit->add_option("--window", fit.window, "row window start:length applied to each file");
    c_fit->add_option("--seed", fit.seed, "seed for RBF center sampling")->capture_default_str();
    c_fit->add_flag("--direct", fit.direct,
                    "form Yp^+ explicitly instead of the Gram fast path (cholesky method)");
    c_fit->add_option("--out", fit.out, "output model directory")->required();

    EigArgs eig;
    CLI::App* c_eig = app.add_subcommand("eig", "eigenvalues of a fitted operator");
    c_eig->add_option("--model", eig.model, "model directory")->required();
    c_eig->add_option("--top", eig.top, "write only the top-N eigenvalues (default: all)");
    c_eig->add_option("--out", eig.out, "output CSV (re, im, magnitude)")->required();
    c_eig->add_option("--compare", eig.compare,
                      "second model directory; prints the top-N spectrum gap");

    PredictArgs pred;
    CLI::App* c_pred = app.add_subcommand("predict", "evolve the lifted state with a model");
    c_pred->add_option("--model", pred.model, "model directory")->required();
    c_pred->add_option("--x0", pred.x0, "initial state: inline v1,v2,... or a CSV path")
        ->required();
    c_pred->add_option("--steps", pred.steps, "number of steps")->required();
    c_pred->add_option("--out", pred.out, "output CSV of lifted coordinates")->required();

    BenchArgs bench;
    CLI::App* c_bench = app.add_subcommand("bench", "time the pseudoinverse/fit methods");
    c_bench->add_option("--scenario", bench.scenario,
                        "pinv_random, oscillator_edmd, or csv_edmd")
        ->required();
    c_bench
        ->add_option("--sizes", bench.sizes,
                     "oscillator counts / window lengths / rows:cols:rank triples")
        ->required()
        ->delimiter(',');
    c_bench->add_option("--methods", bench.methods, "subset of cholesky,svd,qr")
        ->delimiter(',')
        ->capture_default_str();
    c_bench->add_option("--reps", bench.reps, "timed repetitions per case")
        ->capture_default_str();
    c_bench->add_option("--warmup", bench.warmup, "discarded warmup runs")
        ->capture_default_str();
    c_bench->add_option("--seed", bench.seed, "problem generation seed")->capture_default_str();
    c_bench->add_option("--rbf-count", bench.rbf_count,
                        "RBF dictionary size for csv_edmd (0: identity)");
    c_bench->add_option("--steps", bench.steps, "trajectory steps for oscillator_edmd")
        ->capture_default_str();
    c_bench->add_option("--data", bench.data, "input CSV for csv_edmd");
    c_bench->add_option("--max-gram-elements", bench.max_gram_elements,
                        "skip cases whose Gram matrix would exceed this many elements")
        ->capture_default_str();
    c_bench->add_option("--out", bench.out, "output report CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        koop::init_threads_from_env();
        if (c_sim->parsed()) return run_simulate(sim);
        if (c_fit->parsed()) return run_fit(fit);
        if (c_eig->parsed()) return run_eig(eig);
        if (c_pred->parsed()) return run_predict(pred);
        if (c_bench->parsed()) return run_bench_cmd(bench);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const koop::ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const koop::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
