#include "lrtsd/harness/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "lrtsd/harness/tensor_file.hpp"

namespace lrtsd::harness {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw FormatError(where + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) throw FormatError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(where + "." + key + ": " + e.what());
    }
}

std::vector<double> log_grid() { return {0.01, 0.1, 1.0, 10.0, 100.0}; }

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::BenchmarkSweep: return "benchmark-sweep";
        case ExperimentKind::AnomalyAblation: return "anomaly-ablation";
        case ExperimentKind::DimredSweep: return "dimred-sweep";
        case ExperimentKind::TuningGrid: return "tuning-grid";
        case ExperimentKind::FitSingle: return "fit-single";
    }
    return "unknown";
}

ExperimentKind parse_kind(const std::string& name) {
    for (auto k : {ExperimentKind::BenchmarkSweep, ExperimentKind::AnomalyAblation, ExperimentKind::DimredSweep,
                   ExperimentKind::TuningGrid, ExperimentKind::FitSingle}) {
        if (to_string(k) == name) return k;
    }
    throw FormatError("unknown experiment kind '" + name + "'");
}

SimConfig sim_config_from_json(const json& j, SimConfig c) {
    const std::string where = "sim";
    reject_unknown(j,
                   {"k_clusters", "n_per_cluster", "ambient_dims", "intrinsic_dims", "noise_sigma", "anomaly_ratio",
                    "anomaly_intensity", "seed", "signal_scale", "retain_clean"},
                   where);
    read(j, "k_clusters", c.k_clusters, where);
    read(j, "n_per_cluster", c.n_per_cluster, where);
    read(j, "ambient_dims", c.ambient_dims, where);
    read(j, "intrinsic_dims", c.intrinsic_dims, where);
    read(j, "noise_sigma", c.noise_sigma, where);
    read(j, "anomaly_ratio", c.anomaly_ratio, where);
    read(j, "anomaly_intensity", c.anomaly_intensity, where);
    read(j, "seed", c.seed, where);
    read(j, "signal_scale", c.signal_scale, where);
    read(j, "retain_clean", c.retain_clean, where);
    return c;
}

json to_json(const SimConfig& c) {
    return {{"k_clusters", c.k_clusters},       {"n_per_cluster", c.n_per_cluster},
            {"ambient_dims", c.ambient_dims},   {"intrinsic_dims", c.intrinsic_dims},
            {"noise_sigma", c.noise_sigma},     {"anomaly_ratio", c.anomaly_ratio},
            {"anomaly_intensity", c.anomaly_intensity}, {"seed", c.seed},
            {"signal_scale", c.signal_scale}};
}

Hyperparams hyperparams_from_json(const json& j, Hyperparams h) {
    const std::string where = "hyperparams";
    reject_unknown(j, {"lambda_z", "lambda_a", "lambda_e", "ranks", "max_sweeps", "rel_tol", "anomaly_enabled"}, where);
    read(j, "lambda_z", h.lambda_z, where);
    read(j, "lambda_a", h.lambda_a, where);
    read(j, "lambda_e", h.lambda_e, where);
    if (j.contains("ranks")) {
        std::array<std::size_t, 2> r{};
        read(j, "ranks", r, where);
        h.p2 = r[0];
        h.p3 = r[1];
    }
    read(j, "max_sweeps", h.max_sweeps, where);
    read(j, "rel_tol", h.rel_tol, where);
    read(j, "anomaly_enabled", h.anomaly_enabled, where);
    return h;
}

json to_json(const Hyperparams& h) {
    return {{"lambda_z", h.lambda_z}, {"lambda_a", h.lambda_a},       {"lambda_e", h.lambda_e},
            {"ranks", {h.p2, h.p3}},  {"max_sweeps", h.max_sweeps},   {"rel_tol", h.rel_tol},
            {"anomaly_enabled", h.anomaly_enabled}};
}

GridSpec grid_from_json(const json& j, GridSpec g) {
    const std::string where = "grid";
    reject_unknown(j, {"lambda_z_values", "lambda_e_values", "lambda_a_values", "ranks", "max_sweeps", "rel_tol", "seed"},
                   where);
    read(j, "lambda_z_values", g.lambda_z_values, where);
    read(j, "lambda_e_values", g.lambda_e_values, where);
    read(j, "lambda_a_values", g.lambda_a_values, where);
    if (j.contains("ranks")) {
        std::array<std::size_t, 2> r{};
        read(j, "ranks", r, where);
        g.p2 = r[0];
        g.p3 = r[1];
    }
    read(j, "max_sweeps", g.max_sweeps, where);
    read(j, "rel_tol", g.rel_tol, where);
    read(j, "seed", g.seed, where);
    return g;
}

json to_json(const GridSpec& g) {
    return {{"lambda_z_values", g.lambda_z_values},
            {"lambda_e_values", g.lambda_e_values},
            {"lambda_a_values", g.lambda_a_values},
            {"ranks", {g.p2, g.p3}},
            {"max_sweeps", g.max_sweeps},
            {"rel_tol", g.rel_tol},
            {"seed", g.seed}};
}

void ExperimentConfig::validate() const {
    if (replications < 1) throw std::invalid_argument("config: replications must be at least 1");
    if (k < 1) throw std::invalid_argument("config: k must be positive");
    if (!input) sim.validate();
    for (const auto& m : methods) {
        if (m != "kmeans" && m != "trr" && m != "lrtsd") throw std::invalid_argument("config: unknown method '" + m + "'");
    }
    switch (kind) {
        case ExperimentKind::BenchmarkSweep:
            if (psi_values.empty() || ratio_values.empty()) throw std::invalid_argument("config: empty psi/ratio grid");
            grid.validate();
            if (trr.lambda_values.empty()) throw std::invalid_argument("config: empty TRR lambda grid");
            break;
        case ExperimentKind::AnomalyAblation:
            if (psi_values.empty() || ratio_values.empty()) throw std::invalid_argument("config: empty psi/ratio grid");
            break;
        case ExperimentKind::DimredSweep:
            if (dimred_ranks.empty()) throw std::invalid_argument("config: empty dimred_ranks");
            for (auto r : dimred_ranks) {
                if (r < 1 || r > sim.ambient_dims[0] || r > sim.ambient_dims[1]) {
                    throw std::invalid_argument("config: dimred rank " + std::to_string(r) + " outside ambient dims");
                }
            }
            break;
        case ExperimentKind::TuningGrid: grid.validate(); break;
        case ExperimentKind::FitSingle: break;
    }
}

ExperimentConfig experiment_config_from_json(const json& j) {
    const std::string where = "config";
    reject_unknown(j,
                   {"kind", "sim", "input", "psi_values", "ratio_values", "replications", "seed", "k", "methods", "grid",
                    "auto_lambda_a", "hyperparams", "trr", "dimred_ranks", "output_dir"},
                   where);
    ExperimentConfig c;
    c.grid.lambda_z_values = log_grid();
    c.grid.lambda_e_values = log_grid();
    c.grid.lambda_a_values = log_grid();
    c.grid.p2 = c.grid.p3 = 15;
    c.hyperparams.p2 = c.hyperparams.p3 = 15;
    if (j.contains("kind")) {
        std::string kind;
        read(j, "kind", kind, where);
        c.kind = parse_kind(kind);
    }
    if (j.contains("sim")) c.sim = sim_config_from_json(j.at("sim"));
    if (j.contains("input")) {
        std::string p;
        read(j, "input", p, where);
        c.input = p;
    }
    read(j, "psi_values", c.psi_values, where);
    read(j, "ratio_values", c.ratio_values, where);
    read(j, "replications", c.replications, where);
    read(j, "seed", c.seed, where);
    read(j, "k", c.k, where);
    read(j, "methods", c.methods, where);
    if (j.contains("grid")) c.grid = grid_from_json(j.at("grid"), c.grid);
    read(j, "auto_lambda_a", c.auto_lambda_a, where);
    if (j.contains("hyperparams")) c.hyperparams = hyperparams_from_json(j.at("hyperparams"), c.hyperparams);
    if (j.contains("trr")) {
        const auto& t = j.at("trr");
        reject_unknown(t, {"lambda_values", "keep"}, "trr");
        read(t, "lambda_values", c.trr.lambda_values, "trr");
        read(t, "keep", c.trr.keep, "trr");
    }
    read(j, "dimred_ranks", c.dimred_ranks, where);
    if (j.contains("output_dir")) {
        std::string p;
        read(j, "output_dir", p, where);
        c.output_dir = p;
    }
    return c;
}

json to_json(const ExperimentConfig& c) {
    json j = {{"kind", to_string(c.kind)},
              {"sim", to_json(c.sim)},
              {"psi_values", c.psi_values},
              {"ratio_values", c.ratio_values},
              {"replications", c.replications},
              {"seed", c.seed},
              {"k", c.k},
              {"methods", c.methods},
              {"grid", to_json(c.grid)},
              {"auto_lambda_a", c.auto_lambda_a},
              {"hyperparams", to_json(c.hyperparams)},
              {"trr", {{"lambda_values", c.trr.lambda_values}, {"keep", c.trr.keep}}},
              {"dimred_ranks", c.dimred_ranks},
              {"output_dir", c.output_dir.string()}};
    if (c.input) j["input"] = c.input->string();
    return j;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace lrtsd::harness
