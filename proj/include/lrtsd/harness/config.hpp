#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrtsd/simgen.hpp"
#include "lrtsd/solver.hpp"
#include "lrtsd/tuning.hpp"

namespace lrtsd::harness {

enum class ExperimentKind { BenchmarkSweep, AnomalyAblation, DimredSweep, TuningGrid, FitSingle };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

struct TrrSpec {
    std::vector<double> lambda_values{1.0, 10.0, 100.0};
    int keep = 0;  // 0 selects default_trr_keep(k)
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::FitSingle;
    SimConfig sim;
    std::optional<std::filesystem::path> input;
    std::vector<double> psi_values{4, 5, 6, 7, 8};
    std::vector<double> ratio_values{0.05, 0.1, 0.125, 0.15, 0.175, 0.2, 0.225};
    std::size_t replications = 20;
    std::uint64_t seed = 0;
    int k = 3;
    std::vector<std::string> methods{"kmeans", "trr", "lrtsd"};
    GridSpec grid;              // benchmark-sweep and tuning-grid
    bool auto_lambda_a = false;  // Otsu-selected lambda_a from an anomaly-off warm start
    Hyperparams hyperparams;    // anomaly-ablation, dimred-sweep, fit-single
    TrrSpec trr;
    std::vector<std::size_t> dimred_ranks{5, 8, 10, 12, 15, 20, 25, 40, 60};
    std::filesystem::path output_dir = ".";

    /// Throws std::invalid_argument on any inconsistency.
    void validate() const;
};

SimConfig sim_config_from_json(const nlohmann::json& j, SimConfig base = {});
nlohmann::json to_json(const SimConfig& c);

Hyperparams hyperparams_from_json(const nlohmann::json& j, Hyperparams base = {});
nlohmann::json to_json(const Hyperparams& h);

GridSpec grid_from_json(const nlohmann::json& j, GridSpec base = {});
nlohmann::json to_json(const GridSpec& g);

/// Unknown keys are rejected so typos surface as format errors.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace lrtsd::harness
