#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lrtsd/harness/baselines.hpp"
#include "lrtsd/harness/config.hpp"
#include "lrtsd/harness/csv.hpp"
#include "lrtsd/harness/experiments.hpp"
#include "lrtsd/harness/tensor_file.hpp"
#include "oracles.hpp"

using namespace lrtsd;
using namespace lrtsd::harness;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lrtsd_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Small, quick experiment settings.
ExperimentConfig small_config(ExperimentKind kind) {
    ExperimentConfig c = experiment_config_from_json(json::object());
    c.kind = kind;
    c.sim.n_per_cluster = 6;
    c.sim.ambient_dims = {10, 10};
    c.sim.intrinsic_dims = {2, 2};
    c.sim.noise_sigma = 0.05;
    c.sim.signal_scale = 5;
    c.psi_values = {0, 4};
    c.ratio_values = {0.1};
    c.replications = 2;
    c.seed = 99;
    c.grid.lambda_z_values = {1.0};
    c.grid.lambda_e_values = {1.0};
    c.grid.lambda_a_values = {0.5, 5.0};
    c.grid.p2 = c.grid.p3 = 6;
    c.grid.max_sweeps = 30;
    c.hyperparams.p2 = c.hyperparams.p3 = 6;
    c.hyperparams.max_sweeps = 30;
    c.trr.lambda_values = {1.0};
    c.dimred_ranks = {2, 4, 6, 10};
    return c;
}

}  // namespace

TEST(TensorFile, RoundTripIsBitExact) {
    Rng rng(71);
    Tensor3 t = oracle::random_tensor(rng, {3, 4, 5});
    t(0, 0, 0) = -0.0;
    t(1, 0, 0) = std::numeric_limits<double>::denorm_min();
    t(2, 0, 0) = std::numeric_limits<double>::infinity();
    t(0, 1, 0) = std::numeric_limits<double>::quiet_NaN();
    const auto bytes = encode_tensor(t);
    ASSERT_EQ(bytes.size(), 4u + 24u + 60u * 8u);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "LRT1");
    EXPECT_EQ(bytes[4], 3);  // little-endian n1
    const Tensor3 back = decode_tensor(bytes);
    ASSERT_EQ(back.dims(), t.dims());
    EXPECT_EQ(std::memcmp(back.data().data(), t.data().data(), t.size() * sizeof(double)), 0);

    const fs::path dir = scratch_dir("tf");
    write_tensor(dir / "t.lrt", t);
    const Tensor3 file = read_tensor(dir / "t.lrt");
    EXPECT_EQ(std::memcmp(file.data().data(), t.data().data(), t.size() * sizeof(double)), 0);
}

TEST(TensorFile, CorruptInputsRejected) {
    Tensor3 t(2, 2, 2, 1.0);
    auto bytes = encode_tensor(t);
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    EXPECT_THROW(decode_tensor(bad_magic), FormatError);
    auto truncated = bytes;
    truncated.pop_back();
    EXPECT_THROW(decode_tensor(truncated), FormatError);
    auto extra = bytes;
    extra.push_back(0);
    EXPECT_THROW(decode_tensor(extra), FormatError);
    auto zero_dim = bytes;
    zero_dim[4] = 0;
    EXPECT_THROW(decode_tensor(zero_dim), FormatError);
    EXPECT_THROW(decode_tensor({'L', 'R'}), FormatError);
    EXPECT_THROW(read_tensor("/nonexistent/dir/x.lrt"), IoError);
}

TEST(Config, ParsesAndRoundTrips) {
    const json j = json::parse(R"({
        "kind": "benchmark-sweep",
        "sim": {"noise_sigma": 0.25, "ambient_dims": [40, 30]},
        "psi_values": [4, 8],
        "ratio_values": [0.2],
        "replications": 3,
        "seed": 11,
        "grid": {"lambda_z_values": [1, 2], "ranks": [5, 6]},
        "hyperparams": {"lambda_z": 3, "ranks": [4, 4]},
        "trr": {"keep": 7}
    })");
    const ExperimentConfig c = experiment_config_from_json(j);
    EXPECT_EQ(c.kind, ExperimentKind::BenchmarkSweep);
    EXPECT_EQ(c.sim.noise_sigma, 0.25);
    EXPECT_EQ(c.sim.ambient_dims[1], 30u);
    EXPECT_EQ(c.psi_values, (std::vector<double>{4, 8}));
    EXPECT_EQ(c.replications, 3u);
    EXPECT_EQ(c.grid.lambda_z_values, (std::vector<double>{1, 2}));
    EXPECT_EQ(c.grid.lambda_e_values, (std::vector<double>{0.01, 0.1, 1, 10, 100}));
    EXPECT_EQ(c.grid.p2, 5u);
    EXPECT_EQ(c.grid.p3, 6u);
    EXPECT_EQ(c.hyperparams.lambda_z, 3.0);
    EXPECT_EQ(c.trr.keep, 7);
    const ExperimentConfig again = experiment_config_from_json(to_json(c));
    EXPECT_EQ(to_json(again), to_json(c));
}

TEST(Config, UnknownKeysAndBadValuesRejected) {
    EXPECT_THROW(experiment_config_from_json(json::parse(R"({"replication": 3})")), FormatError);
    EXPECT_THROW(experiment_config_from_json(json::parse(R"({"sim": {"sigma": 1}})")), FormatError);
    EXPECT_THROW(experiment_config_from_json(json::parse(R"({"kind": "nope"})")), FormatError);
    EXPECT_THROW(experiment_config_from_json(json::parse(R"({"seed": "abc"})")), FormatError);
    ExperimentConfig c = small_config(ExperimentKind::BenchmarkSweep);
    c.replications = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Csv, FormatsAndQuotes) {
    CsvTable t({"a", "b", "c"});
    t.row().add(0.1).add("x,y").add(std::size_t{7});
    t.row().add(std::numeric_limits<double>::quiet_NaN()).add("q\"").add(-3);
    EXPECT_EQ(t.str(), "a,b,c\n0.1,\"x,y\",7\nnan,\"q\"\"\",-3\n");
    CsvTable bad({"a"});
    bad.row().add(1).add(2);
    EXPECT_THROW(bad.str(), std::logic_error);
}

TEST(Baselines, KMeansSeparatesFarClouds) {
    Tensor3 x(12, 3, 2);
    Rng rng(72);
    for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 2; ++k) x(i, j, k) = (i < 6 ? 0.0 : 100.0) + rng.normal();
    Labels truth(12, 0);
    std::fill(truth.begin() + 6, truth.end(), 1);
    EXPECT_EQ(clustering_accuracy(baseline_kmeans(x, 2, 1), truth), 1.0);
    EXPECT_THROW(baseline_kmeans(x, 13, 1), std::invalid_argument);
}

TEST(Baselines, KMeansWithOneClusterPerSample) {
    Rng rng(73);
    const Tensor3 x = oracle::random_tensor(rng, {6, 3, 3});
    const Labels truth{0, 0, 0, 1, 1, 2};
    EXPECT_NEAR(clustering_accuracy(baseline_kmeans(x, 6, 2), truth), 0.5, 1e-15);
}

TEST(Baselines, TrrOnOrthogonalBlockSubspaces) {
    // Samples of block b live on coordinates [4b, 4b + 4) of a 12-dim space.
    Rng rng(74);
    Tensor3 x(15, 12, 1);
    Labels truth(15);
    for (std::size_t i = 0; i < 15; ++i) {
        const std::size_t b = i / 5;
        truth[i] = static_cast<int>(b);
        for (std::size_t j = 0; j < 4; ++j) x(i, 4 * b + j, 0) = rng.normal();
    }
    EXPECT_EQ(clustering_accuracy(baseline_trr(x, 3, 0.1, default_trr_keep(3), 3), truth), 1.0);
    const Matrix z = trr_coefficients(x, 0.1, 4);
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        EXPECT_EQ(z(i, i), 0.0);
        EXPECT_LE((z.row(i).array() != 0.0).count(), 4);
    }
}

TEST(Experiments, ReplicationSeedsAreSharedAcrossCells) {
    EXPECT_EQ(replication_seed(5, 3), derive_seed(5, 3));
    EXPECT_NE(replication_seed(5, 3), replication_seed(5, 4));
}

TEST(Experiments, BenchmarkSweepIsDeterministicAndCarriesProvenance) {
    const ExperimentConfig c = small_config(ExperimentKind::BenchmarkSweep);
    const BenchmarkResult a = run_benchmark_sweep(c);
    const BenchmarkResult b = run_benchmark_sweep(c);
    EXPECT_EQ(benchmark_runs_csv(a, c).str(), benchmark_runs_csv(b, c).str());
    EXPECT_EQ(benchmark_summary_csv(a, c).str(), benchmark_summary_csv(b, c).str());
    // 2 cells x 2 reps x (kmeans + 1 trr + 2 lrtsd)
    EXPECT_EQ(a.runs.size(), 16u);
    EXPECT_EQ(a.best.size(), 6u);
    EXPECT_EQ(a.all_settings.size(), 8u);
    const std::string header = benchmark_runs_csv(a, c).str().substr(0, 120);
    for (const char* col : {"psi", "ratio", "seed", "method", "lambda_z", "lambda_e", "lambda_a", "p2", "p3"}) {
        EXPECT_NE(header.find(col), std::string::npos) << col;
    }
    for (const auto& s : a.best) {
        EXPECT_GE(s.mean_accuracy, 0.0);
        EXPECT_LE(s.mean_accuracy, 1.0);
        EXPECT_EQ(s.runs, 2u);
    }
}

TEST(Experiments, AblationControlHasNoAnomalyAndPsiZeroGivesNoGain) {
    ExperimentConfig c = small_config(ExperimentKind::AnomalyAblation);
    c.psi_values = {0};
    c.hyperparams.lambda_a = 0.5;
    const AblationResult r = run_anomaly_ablation(c);
    ASSERT_EQ(r.runs.size(), 2u);
    for (const auto& run : r.runs) {
        EXPECT_TRUE(run.error.empty()) << run.error;
        EXPECT_EQ(run.anomaly_l1_off, 0.0);
        EXPECT_EQ(run.gain(), 0.0);
    }
    ASSERT_EQ(r.cells.size(), 1u);
    EXPECT_EQ(r.cells[0].mean_gain, 0.0);
}

TEST(Experiments, DimredSingleFactorHasZeroDifferences) {
    ExperimentConfig c = small_config(ExperimentKind::DimredSweep);
    c.dimred_ranks = {4};
    const DimredResult r = run_dimred_sweep(c);
    ASSERT_EQ(r.points.size(), 1u);
    EXPECT_EQ(r.points[0].mean_above_min, 0.0);
    for (const auto& run : r.runs) EXPECT_EQ(run.above_min, 0.0);
}

TEST(Experiments, DimredPointsOrderedByFactorWithRidgeAtOne) {
    const ExperimentConfig c = small_config(ExperimentKind::DimredSweep);
    const DimredResult r = run_dimred_sweep(c);
    ASSERT_EQ(r.points.size(), 4u);
    EXPECT_EQ(r.points[0].factor, 1.0);
    EXPECT_EQ(r.points[0].rank, 10u);
    for (std::size_t i = 1; i < r.points.size(); ++i) EXPECT_LT(r.points[i - 1].factor, r.points[i].factor);
    for (const auto& run : r.runs) EXPECT_GE(run.above_min, 0.0);
    EXPECT_EQ(dimred_runs_csv(r, c).str(), dimred_runs_csv(run_dimred_sweep(c), c).str());
}

TEST(Experiments, RunExperimentWritesIdenticalCsvOnRerun) {
    ExperimentConfig c = small_config(ExperimentKind::TuningGrid);
    c.output_dir = scratch_dir("tune_a");
    run_experiment(c);
    const std::string first = slurp(c.output_dir / "tuning.csv");
    ASSERT_FALSE(first.empty());
    EXPECT_TRUE(fs::exists(c.output_dir / "metrics.json"));
    c.output_dir = scratch_dir("tune_b");
    run_experiment(c);
    EXPECT_EQ(slurp(c.output_dir / "tuning.csv"), first);
}

// --- command line -------------------------------------------------------------

namespace {

int run_cli(const std::string& args, const fs::path& err_file) {
    const std::string cmd = std::string(LRTSD_CLI_PATH) + " " + args + " 2> " + err_file.string() + " > /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, SimulateFitClusterPipeline) {
    const fs::path dir = scratch_dir("cli");
    const fs::path err = dir / "err.txt";
    std::ofstream(dir / "sim.json") << R"({"n_per_cluster": 10, "ambient_dims": [12, 12], "intrinsic_dims": [2, 2],
                                            "noise_sigma": 0.05, "signal_scale": 5})";
    ASSERT_EQ(run_cli("simulate --seed 7 --config " + (dir / "sim.json").string() + " --output " + (dir / "x.lrt").string(), err), 0)
        << slurp(err);
    const json side = read_json_file(dir / "x.lrt.json");
    EXPECT_EQ(side.at("labels").size(), 30u);
    EXPECT_EQ(side.at("config").at("seed"), 7);

    ASSERT_EQ(run_cli("fit --input " + (dir / "x.lrt").string() + " --ranks 6,6 --lambda-a 0.5 --output " +
                          (dir / "fit.json").string(),
                      err),
              0)
        << slurp(err);
    const json fitj = read_json_file(dir / "fit.json");
    const auto trace = fitj.at("objective_trace").get<std::vector<double>>();
    ASSERT_GE(trace.size(), 2u);
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] + 1e-9);

    ASSERT_EQ(run_cli("cluster --auto-k --input " + (dir / "fit.json").string() + " --truth " +
                          (dir / "x.lrt.json").string() + " --output " + (dir / "cl.json").string(),
                      err),
              0)
        << slurp(err);
    const json cl = read_json_file(dir / "cl.json");
    EXPECT_EQ(cl.at("k"), 3);
    EXPECT_EQ(cl.at("accuracy"), 1.0);
}

TEST(Cli, ErrorsUseDistinctCodesAndJson) {
    const fs::path dir = scratch_dir("cli_err");
    const fs::path err = dir / "err.txt";
    EXPECT_EQ(run_cli("fit --bogus-flag", err), 2);
    EXPECT_EQ(json::parse(slurp(err)).at("error").at("kind"), "usage");
    EXPECT_EQ(run_cli("fit --input " + (dir / "missing.lrt").string(), err), 3);
    EXPECT_EQ(json::parse(slurp(err)).at("error").at("code"), 3);
    std::ofstream(dir / "bad.lrt") << "not a tensor";
    EXPECT_EQ(run_cli("fit --input " + (dir / "bad.lrt").string(), err), 4);
    write_tensor(dir / "small.lrt", Tensor3(4, 3, 3, 1.0));
    EXPECT_EQ(run_cli("fit --input " + (dir / "small.lrt").string() + " --ranks 9,9", err), 6);
    std::ofstream(dir / "cfg.json") << R"({"unknown_key": 1})";
    EXPECT_EQ(run_cli("bench --config " + (dir / "cfg.json").string(), err), 4);
}
