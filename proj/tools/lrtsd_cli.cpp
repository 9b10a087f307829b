// Command-line front end: simulate data, fit, cluster, tune and run the
// experiment sweeps. See README.md for the exit-code table.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "lrtsd/clustering.hpp"
#include "lrtsd/harness/config.hpp"
#include "lrtsd/harness/experiments.hpp"
#include "lrtsd/harness/tensor_file.hpp"
#include "lrtsd/numerics.hpp"
#include "lrtsd/simgen.hpp"
#include "lrtsd/solver.hpp"

namespace {

using nlohmann::json;
using namespace lrtsd;
using namespace lrtsd::harness;

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kIo = 3,
    kFormat = 4,
    kNumerical = 5,
    kInvalidArgument = 6,
};

int report(int code, const std::string& kind, const std::string& message) {
    json err = {{"error", {{"code", code}, {"kind", kind}, {"message", message}}}};
    std::cerr << err.dump() << '\n';
    return code;
}

struct FitFlags {
    std::optional<double> lambda_z, lambda_a, lambda_e;
    std::vector<std::size_t> ranks;
    std::optional<int> max_sweeps;
    std::optional<double> rel_tol;
    bool no_anomaly = false;
    bool auto_lambda_a = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--lambda-z", lambda_z, "Self-expression weight");
        cmd->add_option("--lambda-a", lambda_a, "Anomaly L1 weight");
        cmd->add_option("--lambda-e", lambda_e, "Reconstruction weight");
        cmd->add_option("--ranks", ranks, "Core ranks P2,P3")->delimiter(',')->expected(2);
        cmd->add_option("--max-sweeps", max_sweeps, "Sweep cap");
        cmd->add_option("--rel-tol", rel_tol, "Relative objective decrease for convergence");
        cmd->add_flag("--no-anomaly", no_anomaly, "Disable the anomaly term");
        cmd->add_flag("--auto-lambda-a", auto_lambda_a, "Pick lambda_a by Otsu on anomaly-free residuals");
    }

    Hyperparams apply(Hyperparams h) const {
        if (lambda_z) h.lambda_z = *lambda_z;
        if (lambda_a) h.lambda_a = *lambda_a;
        if (lambda_e) h.lambda_e = *lambda_e;
        if (ranks.size() == 2) {
            h.p2 = ranks[0];
            h.p3 = ranks[1];
        }
        if (max_sweeps) h.max_sweeps = *max_sweeps;
        if (rel_tol) h.rel_tol = *rel_tol;
        if (no_anomaly) h.anomaly_enabled = false;
        return h;
    }
};

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw FormatError(where + ": expected a nested array");
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != j[0].size()) throw FormatError(where + ": ragged matrix");
        for (std::size_t c = 0; c < j[i].size(); ++c) {
            if (!j[i][c].is_number()) throw FormatError(where + ": non-numeric entry");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
        }
    }
    return m;
}

void emit(const json& j, const std::string& output) {
    if (output.empty() || output == "-") {
        std::cout << j.dump(2) << '\n';
    } else {
        write_json_file(output, j);
    }
}

/// Accepts either a bare SimConfig object or an experiment config with a "sim" entry.
SimConfig sim_from_file(const std::string& path) {
    const json j = read_json_file(path);
    if (j.is_object() && j.contains("sim")) return experiment_config_from_json(j).sim;
    return sim_config_from_json(j);
}

ExperimentConfig experiment_from_file(const std::string& path, ExperimentKind kind) {
    ExperimentConfig cfg = path.empty() ? experiment_config_from_json(json::object()) : experiment_config_from_json(read_json_file(path));
    cfg.kind = kind;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-rank tensor subspace clustering with sparse anomaly detection"};
    app.require_subcommand(1);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic clustered tensor");
    std::string sim_config, sim_output;
    std::optional<std::uint64_t> sim_seed;
    std::optional<double> sim_psi, sim_ratio, sim_sigma;
    sim_cmd->add_option("--config", sim_config, "SimConfig JSON");
    sim_cmd->add_option("--seed", sim_seed, "Random seed");
    sim_cmd->add_option("--psi", sim_psi, "Anomaly intensity");
    sim_cmd->add_option("--ratio", sim_ratio, "Anomaly ratio");
    sim_cmd->add_option("--sigma", sim_sigma, "Noise standard deviation");
    sim_cmd->add_option("--output", sim_output, "Output tensor file (.lrt); labels go to <output>.json")->required();

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Fit the model to a tensor file");
    std::string fit_input, fit_output = "fit.json", fit_config;
    FitFlags fit_flags;
    fit_cmd->add_option("--input", fit_input, "Input tensor file")->required();
    fit_cmd->add_option("--output", fit_output, "Output JSON (default fit.json, '-' for stdout)");
    fit_cmd->add_option("--config", fit_config, "Config JSON with a hyperparams entry");
    fit_flags.attach(fit_cmd);

    // cluster
    auto* cl_cmd = app.add_subcommand("cluster", "Spectral clustering from a tensor or a saved fit");
    std::string cl_input, cl_output, cl_truth, cl_config;
    std::optional<int> cl_k;
    bool cl_auto = false;
    int cl_kmax = 10;
    std::uint64_t cl_seed = 0;
    FitFlags cl_flags;
    cl_cmd->add_option("--input", cl_input, "Tensor file, or fit JSON holding z")->required();
    cl_cmd->add_option("--output", cl_output, "Output JSON (default stdout)");
    cl_cmd->add_option("--config", cl_config, "Config JSON with a hyperparams entry");
    auto* k_opt = cl_cmd->add_option("--k", cl_k, "Number of clusters");
    auto* auto_opt = cl_cmd->add_flag("--auto-k", cl_auto, "Choose k by the eigengap");
    k_opt->excludes(auto_opt);
    cl_cmd->add_option("--k-max", cl_kmax, "Largest k considered by --auto-k");
    cl_cmd->add_option("--seed", cl_seed, "k-means seed");
    cl_cmd->add_option("--truth", cl_truth, "Sidecar JSON with truth labels; reports accuracy");
    cl_flags.attach(cl_cmd);

    // tune
    auto* tune_cmd = app.add_subcommand("tune", "Grid search minimizing normalized cut");
    std::string tune_config, tune_input, tune_outdir;
    std::optional<std::uint64_t> tune_seed;
    std::optional<int> tune_k;
    tune_cmd->add_option("--config", tune_config, "Experiment config JSON");
    tune_cmd->add_option("--input", tune_input, "Tensor file (default: simulate from config)");
    tune_cmd->add_option("--seed", tune_seed, "Simulation seed");
    tune_cmd->add_option("--k", tune_k, "Number of clusters");
    tune_cmd->add_option("--output-dir", tune_outdir, "Directory for CSV/JSON outputs");

    // sweeps
    struct SweepFlags {
        std::string config, outdir;
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> replications;
    };
    SweepFlags bench_f, abl_f, dim_f;
    const auto add_sweep = [&app](const char* name, const char* desc, SweepFlags& f) {
        auto* c = app.add_subcommand(name, desc);
        c->add_option("--config", f.config, "Experiment config JSON");
        c->add_option("--seed", f.seed, "Base seed");
        c->add_option("--replications", f.replications, "Replications per cell");
        c->add_option("--output-dir", f.outdir, "Directory for CSV/JSON outputs");
        return c;
    };
    auto* bench_cmd = add_sweep("bench", "Benchmark sweep over anomaly intensity and ratio", bench_f);
    auto* abl_cmd = add_sweep("ablate-anomaly", "Paired anomaly-term on/off comparison", abl_f);
    auto* dim_cmd = add_sweep("ablate-dimred", "Accuracy against dimension-reduction factor", dim_f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report(kUsage, "usage", e.what());
    }

    try {
        if (*sim_cmd) {
            SimConfig cfg = sim_config.empty() ? SimConfig{} : sim_from_file(sim_config);
            if (sim_seed) cfg.seed = *sim_seed;
            if (sim_psi) cfg.anomaly_intensity = *sim_psi;
            if (sim_ratio) cfg.anomaly_ratio = *sim_ratio;
            if (sim_sigma) cfg.noise_sigma = *sim_sigma;
            const SimData d = generate(cfg);
            write_tensor(sim_output, d.x);
            json support = json::array();
            const auto [n1, n2, n3] = d.x.dims();
            for (std::size_t idx = 0; idx < d.anomaly_support.size(); ++idx) {
                if (!d.anomaly_support[idx]) continue;
                support.push_back({idx % n1, (idx / n1) % n2, idx / (n1 * n2)});
            }
            write_json_file(sim_output + ".json",
                            {{"config", to_json(cfg)}, {"labels", d.truth_labels}, {"anomaly_support", support}});
            return kOk;
        }

        if (*fit_cmd) {
            Hyperparams h;
            h.p2 = h.p3 = 15;
            if (!fit_config.empty()) h = experiment_config_from_json(read_json_file(fit_config)).hyperparams;
            h = fit_flags.apply(h);
            const Tensor3 x = read_tensor(fit_input);
            const auto t0 = std::chrono::steady_clock::now();
            FitState s;
            if (fit_flags.auto_lambda_a && h.anomaly_enabled) {
                Hyperparams warm = h;
                warm.anomaly_enabled = false;
                s = fit(x, warm);
                h.lambda_a = select_lambda_a(x, s.model, h.lambda_e);
                s = fit(x, h, std::move(s));
            } else {
                s = fit(x, h);
            }
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            emit({{"hyperparams", to_json(h)},
                  {"objective_trace", s.objective_trace},
                  {"sweeps_run", s.sweeps_run},
                  {"converged", s.converged},
                  {"anomaly_l1", l1_norm(s.anomaly)},
                  {"anomaly_nonzeros", (s.anomaly.mode1_view().array() != 0.0).count()},
                  {"seconds", secs},
                  {"z", matrix_json(s.z)}},
                 fit_output);
            return kOk;
        }

        if (*cl_cmd) {
            Matrix z;
            json out;
            if (cl_input.size() >= 5 && cl_input.substr(cl_input.size() - 5) == ".json") {
                const json j = read_json_file(cl_input);
                if (!j.contains("z")) throw FormatError(cl_input + ": no 'z' entry");
                z = matrix_from_json(j.at("z"), cl_input + ".z");
            } else {
                Hyperparams h;
                h.p2 = h.p3 = 15;
                if (!cl_config.empty()) h = experiment_config_from_json(read_json_file(cl_config)).hyperparams;
                h = cl_flags.apply(h);
                const Tensor3 x = read_tensor(cl_input);
                if (cl_flags.auto_lambda_a && h.anomaly_enabled) {
                    Hyperparams warm = h;
                    warm.anomaly_enabled = false;
                    FitState s = fit(x, warm);
                    h.lambda_a = select_lambda_a(x, s.model, h.lambda_e);
                    z = fit(x, h, std::move(s)).z;
                } else {
                    z = fit(x, h).z;
                }
                out["hyperparams"] = to_json(h);
            }
            const Affinity a = affinity_from_z(z);
            int k = 0;
            if (cl_k) {
                k = *cl_k;
            } else if (cl_auto) {
                k = choose_k(a, cl_kmax);
            } else {
                return report(kUsage, "usage", "cluster: one of --k or --auto-k is required");
            }
            const ClusterResult r = spectral_cluster(a, k, cl_seed);
            out["k"] = k;
            out["labels"] = r.labels;
            out["nc"] = r.nc_score;
            out["eigenvalues"] = std::vector<double>(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size());
            if (!cl_truth.empty()) {
                const json t = read_json_file(cl_truth);
                if (!t.contains("labels")) throw FormatError(cl_truth + ": no 'labels' entry");
                const auto truth = t.at("labels").get<std::vector<int>>();
                out["accuracy"] = clustering_accuracy(r.labels, truth);
            }
            emit(out, cl_output);
            return kOk;
        }

        if (*tune_cmd) {
            ExperimentConfig cfg = experiment_from_file(tune_config, ExperimentKind::TuningGrid);
            if (!tune_input.empty()) cfg.input = tune_input;
            if (tune_seed) cfg.sim.seed = *tune_seed;
            if (tune_k) cfg.k = *tune_k;
            if (!tune_outdir.empty()) cfg.output_dir = tune_outdir;
            std::cout << run_experiment(cfg).dump(2) << '\n';
            return kOk;
        }

        const auto sweep = [](const SweepFlags& f, ExperimentKind kind) {
            ExperimentConfig cfg = experiment_from_file(f.config, kind);
            if (f.seed) cfg.seed = *f.seed;
            if (f.replications) cfg.replications = *f.replications;
            if (!f.outdir.empty()) cfg.output_dir = f.outdir;
            std::cout << run_experiment(cfg).dump(2) << '\n';
            return static_cast<int>(kOk);
        };
        if (*bench_cmd) return sweep(bench_f, ExperimentKind::BenchmarkSweep);
        if (*abl_cmd) return sweep(abl_f, ExperimentKind::AnomalyAblation);
        if (*dim_cmd) return sweep(dim_f, ExperimentKind::DimredSweep);
    } catch (const IoError& e) {
        return report(kIo, "io", e.what());
    } catch (const FormatError& e) {
        return report(kFormat, "format", e.what());
    } catch (const json::exception& e) {
        return report(kFormat, "format", e.what());
    } catch (const NumericalError& e) {
        return report(kNumerical, "numerical", e.what());
    } catch (const std::invalid_argument& e) {
        return report(kInvalidArgument, "invalid_argument", e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return report(kIo, "io", e.what());
    } catch (const std::exception& e) {
        return report(kInternal, "internal", e.what());
    }
    return kInternal;
}
