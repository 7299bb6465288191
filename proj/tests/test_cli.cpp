// End-to-end tests of the koop binary: every subcommand, the exit-code
// contract, and manifest-based reproducibility.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "koop/csv.hpp"
#include "koop/model_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path log = dir / "cli_output.log";
    const std::string cmd =
        std::string(KOOP_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream buf;
    buf << in.rdbuf();
    r.output = buf.str();
    return r;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("koop_cli_" + std::string(::testing::UnitTest::GetInstance()
                                              ->current_test_info()
                                              ->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path dir_;
};

} // namespace

TEST_F(CliTest, SimulateWritesTrajectoryAndManifest) {
    const fs::path out = dir_ / "traj.csv";
    RunResult r = run_cli("simulate --oscillators 4 --steps 10 --seed 3 --out " + out.string(),
                          dir_);
    EXPECT_EQ(r.exit_code, 0) << r.output;
    koop::TimeSeriesTable t = koop::read_csv(out);
    EXPECT_EQ(t.samples.rows(), 11);
    EXPECT_EQ(t.samples.cols(), 8);
    ASSERT_TRUE(t.dt_hint.has_value());
    EXPECT_NEAR(*t.dt_hint, 0.01, 1e-12);
    EXPECT_TRUE(fs::exists(out.string() + ".manifest.json"));
    json manifest = json::parse(read_file(out.string() + ".manifest.json"));
    EXPECT_EQ(manifest.at("command"), "simulate");
    EXPECT_EQ(manifest.at("parameters").at("oscillators"), 4);
}

TEST_F(CliTest, SimulateZeroStepsGivesSingleRow) {
    const fs::path out = dir_ / "traj.csv";
    RunResult r = run_cli("simulate --oscillators 3 --steps 0 --out " + out.string(), dir_);
    EXPECT_EQ(r.exit_code, 0) << r.output;
    EXPECT_EQ(koop::read_csv(out).samples.rows(), 1);
}

TEST_F(CliTest, ExitCodeContract) {
    // usage error: unknown flag
    EXPECT_EQ(run_cli("simulate --no-such-flag 1", dir_).exit_code, 2);
    // usage error: missing required --data
    EXPECT_EQ(run_cli("fit --out " + (dir_ / "m").string(), dir_).exit_code, 2);
    // parameter error: a ring needs at least 3 oscillators
    EXPECT_EQ(run_cli("simulate --oscillators 2 --out " + (dir_ / "t.csv").string(), dir_)
                  .exit_code,
              2);
    // data error: nonexistent input file
    EXPECT_EQ(run_cli("fit --data " + (dir_ / "nope.csv").string() + " --out " +
                          (dir_ / "m").string(),
                      dir_)
                  .exit_code,
              1);
    // success path
    EXPECT_EQ(run_cli("--version", dir_).exit_code, 0);
    EXPECT_EQ(run_cli("--help", dir_).exit_code, 0);
}

TEST_F(CliTest, FitEigPredictPipeline) {
    const fs::path traj = dir_ / "traj.csv";
    ASSERT_EQ(run_cli("simulate --oscillators 3 --steps 200 --seed 5 --out " + traj.string(),
                      dir_)
                  .exit_code,
              0);

    const fs::path model_chol = dir_ / "model_chol";
    const fs::path model_svd = dir_ / "model_svd";
    RunResult fit_chol = run_cli("fit --data " + traj.string() + " --data " + traj.string() +
                                     " --method cholesky --out " + model_chol.string(),
                                 dir_);
    EXPECT_EQ(fit_chol.exit_code, 0) << fit_chol.output;
    EXPECT_NE(fit_chol.output.find("residual_rel"), std::string::npos);
    ASSERT_EQ(run_cli("fit --data " + traj.string() + " --data " + traj.string() +
                          " --method svd --out " + model_svd.string(),
                      dir_)
                  .exit_code,
              0);

    // the data is exactly linear, so the printed fit residual is tiny
    const std::size_t res_at = fit_chol.output.find("residual_rel ");
    ASSERT_NE(res_at, std::string::npos);
    EXPECT_LE(std::stod(fit_chol.output.substr(res_at + 13)), 1e-9) << fit_chol.output;

    koop::KoopmanModel m = koop::load_model(model_chol);
    EXPECT_EQ(m.K.rows(), 6);

    // eigenvalues + self-comparison
    const fs::path eig_csv = dir_ / "eig.csv";
    RunResult eig = run_cli("eig --model " + model_chol.string() + " --out " + eig_csv.string() +
                                " --compare " + model_chol.string(),
                            dir_);
    EXPECT_EQ(eig.exit_code, 0) << eig.output;
    EXPECT_NE(eig.output.find("spectrum gap"), std::string::npos);
    EXPECT_NE(eig.output.find(": 0"), std::string::npos); // gap vs itself is 0
    koop::TimeSeriesTable eig_table = koop::read_csv(eig_csv);
    EXPECT_EQ(eig_table.samples.rows(), 6);
    EXPECT_EQ(eig_table.column_names,
              (std::vector<std::string>{"re", "im", "magnitude"}));
    // sorted by descending magnitude
    for (koop::Index i = 0; i + 1 < eig_table.samples.rows(); ++i)
        EXPECT_GE(eig_table.samples(i, 2), eig_table.samples(i + 1, 2) - 1e-15);

    // cholesky and svd fits agree spectrally
    const fs::path eig2 = dir_ / "eig2.csv";
    RunResult cmp = run_cli("eig --model " + model_chol.string() + " --out " + eig2.string() +
                                " --compare " + model_svd.string(),
                            dir_);
    EXPECT_EQ(cmp.exit_code, 0) << cmp.output;
    const std::size_t colon = cmp.output.rfind(": ");
    ASSERT_NE(colon, std::string::npos);
    EXPECT_LE(std::stod(cmp.output.substr(colon + 2)), 1e-6);

    // predict: steps=0 emits exactly the lifted initial state
    const fs::path pred = dir_ / "pred.csv";
    RunResult p0 = run_cli("predict --model " + model_chol.string() +
                               " --x0 0.1,0.2,0.3,0,0,0 --steps 0 --out " + pred.string(),
                           dir_);
    EXPECT_EQ(p0.exit_code, 0) << p0.output;
    koop::TimeSeriesTable pred_table = koop::read_csv(pred);
    EXPECT_EQ(pred_table.samples.rows(), 1);
    EXPECT_EQ(pred_table.samples.cols(), 6);
    EXPECT_NEAR(pred_table.samples(0, 0), 0.1, 1e-15);

    RunResult p5 = run_cli("predict --model " + model_chol.string() +
                               " --x0 0.1,0.2,0.3,0,0,0 --steps 5 --out " + pred.string(),
                           dir_);
    EXPECT_EQ(p5.exit_code, 0) << p5.output;
    EXPECT_EQ(koop::read_csv(pred).samples.rows(), 6);

    // dimension mismatch in x0 is a data error
    EXPECT_EQ(run_cli("predict --model " + model_chol.string() +
                          " --x0 1,2 --steps 1 --out " + pred.string(),
                      dir_)
                  .exit_code,
              1);
}

TEST_F(CliTest, FitRbfDictionaryOperatorSize) {
    const fs::path traj = dir_ / "traj.csv";
    ASSERT_EQ(run_cli("simulate --oscillators 5 --steps 300 --seed 2 --out " + traj.string(),
                      dir_)
                  .exit_code,
              0);
    const fs::path model = dir_ / "model_rbf";
    RunResult fit = run_cli("fit --data " + traj.string() +
                                " --dict rbf --rbf-count 40 --seed 9 --out " + model.string(),
                            dir_);
    EXPECT_EQ(fit.exit_code, 0) << fit.output;
    koop::KoopmanModel m = koop::load_model(model);
    EXPECT_EQ(m.K.rows(), 40);
    EXPECT_EQ(m.K.cols(), 40);
}

TEST_F(CliTest, FitWindowSelectsRows) {
    const fs::path traj = dir_ / "traj.csv";
    ASSERT_EQ(run_cli("simulate --oscillators 3 --steps 100 --out " + traj.string(), dir_)
                  .exit_code,
              0);
    const fs::path model = dir_ / "model_win";
    RunResult fit = run_cli("fit --data " + traj.string() + " --window 10:50 --out " +
                                model.string(),
                            dir_);
    EXPECT_EQ(fit.exit_code, 0) << fit.output;
    // window errors map to the data/bounds exit code
    EXPECT_EQ(run_cli("fit --data " + traj.string() + " --window 200:50 --out " +
                          (dir_ / "m2").string(),
                      dir_)
                  .exit_code,
              1);
}

TEST_F(CliTest, RerunningFromManifestParametersIsBitIdentical) {
    const fs::path out_a = dir_ / "a.csv";
    const fs::path out_b = dir_ / "b.csv";
    const std::string flags = "simulate --oscillators 4 --steps 50 --seed 11 --out ";
    ASSERT_EQ(run_cli(flags + out_a.string(), dir_).exit_code, 0);
    ASSERT_EQ(run_cli(flags + out_b.string(), dir_).exit_code, 0);
    EXPECT_EQ(read_file(out_a), read_file(out_b));

    // fit outputs: K.csv and dictionary.json bit-identical; metadata differs
    // only in the timed field
    const fs::path model_a = dir_ / "ma";
    const fs::path model_b = dir_ / "mb";
    const std::string fit_flags = "fit --data " + out_a.string() + " --seed 4 --out ";
    ASSERT_EQ(run_cli(fit_flags + model_a.string(), dir_).exit_code, 0);
    ASSERT_EQ(run_cli(fit_flags + model_b.string(), dir_).exit_code, 0);
    EXPECT_EQ(read_file(model_a / "K.csv"), read_file(model_b / "K.csv"));
    EXPECT_EQ(read_file(model_a / "dictionary.json"), read_file(model_b / "dictionary.json"));
    json meta_a = json::parse(read_file(model_a / "metadata.json"));
    json meta_b = json::parse(read_file(model_b / "metadata.json"));
    meta_a.erase("fit_seconds");
    meta_b.erase("fit_seconds");
    EXPECT_EQ(meta_a, meta_b);
}

TEST_F(CliTest, BenchSmokeAndReportRoundTrip) {
    const fs::path out = dir_ / "bench.csv";
    RunResult r = run_cli(
        "bench --scenario oscillator_edmd --sizes 4,6 --methods cholesky,svd --reps 2 "
        "--warmup 0 --steps 80 --seed 1 --out " +
            out.string(),
        dir_);
    EXPECT_EQ(r.exit_code, 0) << r.output;
    koop::TimeSeriesTable t = koop::read_csv(out);
    EXPECT_EQ(t.samples.rows(), 4);
    EXPECT_EQ(t.samples.cols(), 8);
    // infeasible sizes are skipped, not fatal
    RunResult skip = run_cli(
        "bench --scenario oscillator_edmd --sizes 4,900 --methods cholesky --reps 1 "
        "--warmup 0 --steps 50 --max-gram-elements 10000 --out " +
            out.string(),
        dir_);
    EXPECT_EQ(skip.exit_code, 0) << skip.output;
    EXPECT_NE(skip.output.find("skipped size 900"), std::string::npos);

    RunResult pinv = run_cli(
        "bench --scenario pinv_random --sizes 20:60:5,30:30:30 --methods cholesky,svd,qr "
        "--reps 1 --warmup 0 --out " +
            out.string(),
        dir_);
    EXPECT_EQ(pinv.exit_code, 0) << pinv.output;
    EXPECT_EQ(koop::read_csv(out).samples.rows(), 6);

    const fs::path data = dir_ / "data.csv";
    ASSERT_EQ(run_cli("simulate --oscillators 4 --steps 120 --seed 9 --out " + data.string(),
                      dir_)
                  .exit_code,
              0);
    RunResult csvb = run_cli(
        "bench --scenario csv_edmd --data " + data.string() +
            " --sizes 60,121 --rbf-count 6 --methods cholesky,svd --reps 1 --warmup 0 --out " +
            out.string(),
        dir_);
    EXPECT_EQ(csvb.exit_code, 0) << csvb.output;
    EXPECT_EQ(koop::read_csv(out).samples.rows(), 4);
}
