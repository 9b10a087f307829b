#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrtsd/harness/config.hpp"
#include "lrtsd/harness/csv.hpp"

namespace lrtsd::harness {

/// One LRTSD run followed by spectral clustering with a known k.
struct LrtsdOutcome {
    FitState state;
    ClusterResult clusters;
    Hyperparams params;  // lambda_a filled in when selected automatically
    double seconds = 0.0;
};

/// With auto_lambda_a, first fits with the anomaly term off, picks lambda_a
/// by Otsu on that fit's residuals, then continues with the term on.
LrtsdOutcome run_lrtsd(const Tensor3& x, const Hyperparams& h, bool auto_lambda_a, int k, std::uint64_t seed);

/// Data seed for replication r (shared across (psi, p) cells so every cell
/// of a replication starts from the same random stream).
std::uint64_t replication_seed(std::uint64_t base, std::size_t rep);

// --- benchmark sweep ---------------------------------------------------------

struct BenchRun {
    double psi = 0, ratio = 0;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    std::string method;
    std::size_t setting = 0;  // index into the method's parameter grid
    Hyperparams params;       // lrtsd only
    double trr_lambda = 0;    // trr only
    int trr_keep = 0;
    double accuracy = 0;
    double seconds = 0;
    std::string error;
};

struct BenchSummary {
    double psi = 0, ratio = 0;
    std::string method;
    std::size_t setting = 0;
    Hyperparams params;
    double trr_lambda = 0;
    int trr_keep = 0;
    double mean_accuracy = 0, std_accuracy = 0;
    std::size_t runs = 0, failures = 0;
    double mean_seconds = 0;
};

struct BenchmarkResult {
    std::vector<BenchRun> runs;
    std::vector<BenchSummary> all_settings;  // every (cell, method, setting)
    std::vector<BenchSummary> best;          // best setting per (cell, method) by mean accuracy
};

BenchmarkResult run_benchmark_sweep(const ExperimentConfig& cfg);

// --- anomaly ablation --------------------------------------------------------

struct AblationRun {
    double psi = 0, ratio = 0;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    double accuracy_on = 0, accuracy_off = 0;
    double lambda_a = 0;
    double anomaly_l1_off = 0;
    double anomaly_l1_on = 0;
    std::string error;
    double gain() const { return accuracy_on - accuracy_off; }
};

struct AblationCell {
    double psi = 0, ratio = 0;
    double mean_gain = 0;
    std::size_t positive = 0, runs = 0, failures = 0;
};

struct AblationResult {
    std::vector<AblationRun> runs;
    std::vector<AblationCell> cells;
};

AblationResult run_anomaly_ablation(const ExperimentConfig& cfg);

// --- dimension-reduction sweep -----------------------------------------------

struct DimredRun {
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    std::size_t rank = 0;
    double factor = 1;
    double accuracy = 0;
    double above_min = 0;
    std::string error;
};

struct DimredPoint {
    std::size_t rank = 0;
    double factor = 1;
    double mean_accuracy = 0;
    double mean_above_min = 0;
};

struct DimredResult {
    std::vector<DimredRun> runs;
    std::vector<DimredPoint> points;  // ordered by increasing factor
    std::size_t best_point = 0;       // argmax of mean_above_min
};

/// A rank equal to both ambient dims is the no-reduction point (factor 1):
/// ridge self-expression directly on the mode-1 unfolding with
/// lambda = 1 / lambda_z.
DimredResult run_dimred_sweep(const ExperimentConfig& cfg);

// --- tuning grid -------------------------------------------------------------

struct TuningResult {
    GridResult grid;
    std::vector<std::optional<double>> accuracy;  // per cell, when truth is known
    std::optional<std::size_t> best_accuracy_index;
};

TuningResult run_tuning_grid(const Tensor3& x, const GridSpec& grid, int k, const Labels* truth);

// --- output ------------------------------------------------------------------

CsvTable benchmark_summary_csv(const BenchmarkResult& r, const ExperimentConfig& cfg);
CsvTable benchmark_settings_csv(const BenchmarkResult& r, const ExperimentConfig& cfg);
CsvTable benchmark_runs_csv(const BenchmarkResult& r, const ExperimentConfig& cfg);
CsvTable ablation_runs_csv(const AblationResult& r, const ExperimentConfig& cfg);
CsvTable ablation_cells_csv(const AblationResult& r, const ExperimentConfig& cfg);
CsvTable dimred_runs_csv(const DimredResult& r, const ExperimentConfig& cfg);
CsvTable dimred_points_csv(const DimredResult& r, const ExperimentConfig& cfg);
CsvTable tuning_csv(const TuningResult& r, const GridSpec& grid, std::uint64_t seed);

/// Runs the configured experiment, writes CSV tables and a JSON metrics
/// summary into cfg.output_dir, and returns the summary.
nlohmann::json run_experiment(const ExperimentConfig& cfg);

}  // namespace lrtsd::harness
