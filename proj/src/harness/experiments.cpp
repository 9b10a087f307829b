#include "lrtsd/harness/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "lrtsd/harness/baselines.hpp"
#include "lrtsd/harness/tensor_file.hpp"
#include "lrtsd/random.hpp"

namespace lrtsd::harness {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct MeanStd {
    double mean = 0, std = 0;
};

MeanStd mean_std(const std::vector<double>& v) {
    MeanStd r;
    if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    r.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0;
        for (double x : v) ss += (x - r.mean) * (x - r.mean);
        r.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return r;
}

SimConfig cell_sim(const ExperimentConfig& cfg, double psi, double ratio, std::size_t rep) {
    SimConfig s = cfg.sim;
    s.anomaly_intensity = psi;
    s.anomaly_ratio = ratio;
    s.seed = replication_seed(cfg.seed, rep);
    s.retain_clean = false;
    return s;
}

Tensor3 experiment_input(const ExperimentConfig& cfg, Labels* truth) {
    if (cfg.input) return read_tensor(*cfg.input);
    SimData d = generate(cfg.sim);
    if (truth) *truth = std::move(d.truth_labels);
    return std::move(d.x);
}

int trr_keep_for(const ExperimentConfig& cfg) { return cfg.trr.keep > 0 ? cfg.trr.keep : default_trr_keep(cfg.k); }

std::string lambda_a_label(const Hyperparams& h, bool auto_lambda_a) {
    return auto_lambda_a ? std::string("auto") : format_number(h.lambda_a);
}

}  // namespace

std::uint64_t replication_seed(std::uint64_t base, std::size_t rep) { return derive_seed(base, rep); }

LrtsdOutcome run_lrtsd(const Tensor3& x, const Hyperparams& h, bool auto_lambda_a, int k, std::uint64_t seed) {
    const auto t0 = Clock::now();
    LrtsdOutcome out;
    out.params = h;
    if (auto_lambda_a && h.anomaly_enabled) {
        Hyperparams warm = h;
        warm.anomaly_enabled = false;
        FitState s = fit(x, warm);
        out.params.lambda_a = select_lambda_a(x, s.model, h.lambda_e);
        out.state = fit(x, out.params, std::move(s));
    } else {
        out.state = fit(x, h);
    }
    out.clusters = spectral_cluster(affinity_from_z(out.state.z), k, seed);
    out.seconds = seconds_since(t0);
    return out;
}

BenchmarkResult run_benchmark_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t n_psi = cfg.psi_values.size();
    const std::size_t n_ratio = cfg.ratio_values.size();
    const std::size_t n_cells = n_psi * n_ratio;
    const std::size_t n_jobs = n_cells * cfg.replications;
    const bool use_kmeans = std::ranges::find(cfg.methods, "kmeans") != cfg.methods.end();
    const bool use_trr = std::ranges::find(cfg.methods, "trr") != cfg.methods.end();
    const bool use_lrtsd = std::ranges::find(cfg.methods, "lrtsd") != cfg.methods.end();
    const int keep = trr_keep_for(cfg);

    std::vector<std::vector<BenchRun>> per_job(n_jobs);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(n_jobs); ++jj) {
        const auto job = static_cast<std::size_t>(jj);
        const std::size_t cell = job / cfg.replications;
        const std::size_t rep = job % cfg.replications;
        const double psi = cfg.psi_values[cell / n_ratio];
        const double ratio = cfg.ratio_values[cell % n_ratio];
        const SimConfig sc = cell_sim(cfg, psi, ratio, rep);
        auto& runs = per_job[job];
        BenchRun base;
        base.psi = psi;
        base.ratio = ratio;
        base.rep = rep;
        base.seed = sc.seed;

        SimData data;
        try {
            data = generate(sc);
        } catch (const std::exception& e) {
            BenchRun r = base;
            r.method = "generate";
            r.error = e.what();
            runs.push_back(r);
            continue;
        }
        const auto record = [&](BenchRun r, auto&& body) {
            const auto t0 = Clock::now();
            try {
                r.accuracy = clustering_accuracy(body(r), data.truth_labels);
            } catch (const std::exception& e) {
                r.accuracy = std::numeric_limits<double>::quiet_NaN();
                r.error = e.what();
            }
            r.seconds = seconds_since(t0);
            runs.push_back(std::move(r));
        };

        if (use_kmeans) {
            BenchRun r = base;
            r.method = "kmeans";
            record(r, [&](BenchRun&) { return baseline_kmeans(data.x, cfg.k, sc.seed); });
        }
        if (use_trr) {
            for (std::size_t t = 0; t < cfg.trr.lambda_values.size(); ++t) {
                BenchRun r = base;
                r.method = "trr";
                r.setting = t;
                r.trr_lambda = cfg.trr.lambda_values[t];
                r.trr_keep = keep;
                record(r, [&](BenchRun& rr) { return baseline_trr(data.x, cfg.k, rr.trr_lambda, keep, sc.seed); });
            }
        }
        if (use_lrtsd) {
            for (std::size_t g = 0; g < cfg.grid.cell_count(); ++g) {
                BenchRun r = base;
                r.method = "lrtsd";
                r.setting = g;
                r.params = cfg.grid.cell(g);
                record(r, [&](BenchRun& rr) {
                    auto out = run_lrtsd(data.x, rr.params, cfg.auto_lambda_a, cfg.k, sc.seed);
                    rr.params = out.params;
                    return out.clusters.labels;
                });
            }
        }
    }

    BenchmarkResult result;
    for (auto& runs : per_job)
        for (auto& r : runs) result.runs.push_back(std::move(r));

    // Aggregate per (cell, method, setting) in first-seen order.
    std::map<std::tuple<std::size_t, std::string, std::size_t>, std::size_t> slot;
    std::vector<std::vector<double>> accs, secs;
    for (const auto& r : result.runs) {
        if (r.method == "generate") continue;
        const auto psi_idx = static_cast<std::size_t>(std::ranges::find(cfg.psi_values, r.psi) - cfg.psi_values.begin());
        const auto ratio_idx =
            static_cast<std::size_t>(std::ranges::find(cfg.ratio_values, r.ratio) - cfg.ratio_values.begin());
        const auto key = std::make_tuple(psi_idx * n_ratio + ratio_idx, r.method, r.setting);
        auto [it, inserted] = slot.try_emplace(key, result.all_settings.size());
        if (inserted) {
            BenchSummary s;
            s.psi = r.psi;
            s.ratio = r.ratio;
            s.method = r.method;
            s.setting = r.setting;
            s.params = r.method == "lrtsd" ? cfg.grid.cell(r.setting) : Hyperparams{};
            s.trr_lambda = r.trr_lambda;
            s.trr_keep = r.trr_keep;
            result.all_settings.push_back(s);
            accs.emplace_back();
            secs.emplace_back();
        }
        auto& s = result.all_settings[it->second];
        ++s.runs;
        if (!r.error.empty()) {
            ++s.failures;
            continue;
        }
        accs[it->second].push_back(r.accuracy);
        secs[it->second].push_back(r.seconds);
    }
    for (std::size_t i = 0; i < result.all_settings.size(); ++i) {
        const auto ms = mean_std(accs[i]);
        result.all_settings[i].mean_accuracy = ms.mean;
        result.all_settings[i].std_accuracy = ms.std;
        result.all_settings[i].mean_seconds = mean_std(secs[i]).mean;
    }

    std::map<std::pair<std::size_t, std::string>, std::size_t> best_slot;
    std::vector<std::pair<std::size_t, std::string>> order;
    for (const auto& [key, idx] : slot) {
        const auto cm = std::make_pair(std::get<0>(key), std::get<1>(key));
        const auto& cand = result.all_settings[idx];
        auto it = best_slot.find(cm);
        if (it == best_slot.end()) {
            best_slot.emplace(cm, idx);
            order.push_back(cm);
            continue;
        }
        const auto& cur = result.all_settings[it->second];
        const bool cand_ok = !std::isnan(cand.mean_accuracy);
        if (cand_ok && (std::isnan(cur.mean_accuracy) || cand.mean_accuracy > cur.mean_accuracy)) it->second = idx;
    }
    // Map iteration order is (cell, method name, setting) so output is stable.
    for (const auto& cm : order) result.best.push_back(result.all_settings[best_slot.at(cm)]);
    return result;
}

AblationResult run_anomaly_ablation(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t n_ratio = cfg.ratio_values.size();
    const std::size_t n_cells = cfg.psi_values.size() * n_ratio;
    const std::size_t n_jobs = n_cells * cfg.replications;
    AblationResult result;
    result.runs.resize(n_jobs);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(n_jobs); ++jj) {
        const auto job = static_cast<std::size_t>(jj);
        const std::size_t cell = job / cfg.replications;
        const std::size_t rep = job % cfg.replications;
        auto& run = result.runs[job];
        run.psi = cfg.psi_values[cell / n_ratio];
        run.ratio = cfg.ratio_values[cell % n_ratio];
        run.rep = rep;
        const SimConfig sc = cell_sim(cfg, run.psi, run.ratio, rep);
        run.seed = sc.seed;
        try {
            const SimData data = generate(sc);
            Hyperparams off = cfg.hyperparams;
            off.anomaly_enabled = false;
            FitState off_state = fit(data.x, off);
            run.anomaly_l1_off = l1_norm(off_state.anomaly);
            run.accuracy_off = clustering_accuracy(
                spectral_cluster(affinity_from_z(off_state.z), cfg.k, sc.seed).labels, data.truth_labels);

            Hyperparams on = cfg.hyperparams;
            on.anomaly_enabled = true;
            FitState on_state;
            if (cfg.auto_lambda_a) {
                on.lambda_a = select_lambda_a(data.x, off_state.model, on.lambda_e);
                on_state = fit(data.x, on, std::move(off_state));
            } else {
                on_state = fit(data.x, on);
            }
            run.lambda_a = on.lambda_a;
            run.anomaly_l1_on = l1_norm(on_state.anomaly);
            run.accuracy_on = clustering_accuracy(
                spectral_cluster(affinity_from_z(on_state.z), cfg.k, sc.seed).labels, data.truth_labels);
        } catch (const std::exception& e) {
            run.error = e.what();
        }
    }

    for (std::size_t cell = 0; cell < n_cells; ++cell) {
        AblationCell c;
        c.psi = cfg.psi_values[cell / n_ratio];
        c.ratio = cfg.ratio_values[cell % n_ratio];
        std::vector<double> gains;
        for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
            const auto& run = result.runs[cell * cfg.replications + rep];
            ++c.runs;
            if (!run.error.empty()) {
                ++c.failures;
                continue;
            }
            gains.push_back(run.gain());
            if (run.gain() > 0) ++c.positive;
        }
        c.mean_gain = mean_std(gains).mean;
        result.cells.push_back(c);
    }
    return result;
}

DimredResult run_dimred_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto [i2, i3] = cfg.sim.ambient_dims;
    std::vector<std::size_t> ranks = cfg.dimred_ranks;
    std::vector<double> factors;
    for (auto r : ranks) {
        const std::array<std::size_t, 2> amb{i2, i3}, intr{r, r};
        factors.push_back(dimension_reduction_factor(amb, intr));
    }
    const std::size_t n_ranks = ranks.size();
    DimredResult result;
    result.runs.resize(cfg.replications * n_ranks);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t rr = 0; rr < static_cast<std::ptrdiff_t>(cfg.replications); ++rr) {
        const auto rep = static_cast<std::size_t>(rr);
        SimConfig sc = cfg.sim;
        sc.seed = replication_seed(cfg.seed, rep);
        SimData data;
        std::string gen_error;
        try {
            data = generate(sc);
        } catch (const std::exception& e) {
            gen_error = e.what();
        }
        double lowest = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n_ranks; ++i) {
            auto& run = result.runs[rep * n_ranks + i];
            run.rep = rep;
            run.seed = sc.seed;
            run.rank = ranks[i];
            run.factor = factors[i];
            if (!gen_error.empty()) {
                run.error = gen_error;
                continue;
            }
            try {
                Matrix z;
                if (ranks[i] == i2 && ranks[i] == i3) {
                    z = ridge_self_expression(unfold(data.x, 1), 1.0 / cfg.hyperparams.lambda_z);
                } else {
                    Hyperparams h = cfg.hyperparams;
                    h.p2 = h.p3 = ranks[i];
                    z = run_lrtsd(data.x, h, cfg.auto_lambda_a, cfg.k, sc.seed).state.z;
                }
                run.accuracy = clustering_accuracy(spectral_cluster(affinity_from_z(z), cfg.k, sc.seed).labels,
                                                   data.truth_labels);
                lowest = std::min(lowest, run.accuracy);
            } catch (const std::exception& e) {
                run.error = e.what();
            }
        }
        for (std::size_t i = 0; i < n_ranks; ++i) {
            auto& run = result.runs[rep * n_ranks + i];
            if (run.error.empty()) run.above_min = run.accuracy - lowest;
        }
    }

    std::vector<std::size_t> idx(n_ranks);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return factors[a] < factors[b]; });
    for (const auto i : idx) {
        DimredPoint p;
        p.rank = ranks[i];
        p.factor = factors[i];
        std::vector<double> acc, above;
        for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
            const auto& run = result.runs[rep * n_ranks + i];
            if (!run.error.empty()) continue;
            acc.push_back(run.accuracy);
            above.push_back(run.above_min);
        }
        p.mean_accuracy = mean_std(acc).mean;
        p.mean_above_min = mean_std(above).mean;
        result.points.push_back(p);
    }
    for (std::size_t i = 1; i < result.points.size(); ++i) {
        if (result.points[i].mean_above_min > result.points[result.best_point].mean_above_min) result.best_point = i;
    }
    return result;
}

TuningResult run_tuning_grid(const Tensor3& x, const GridSpec& grid, int k, const Labels* truth) {
    TuningResult r;
    r.grid = grid_search(x, grid, k);
    r.accuracy.resize(r.grid.cells.size());
    if (!truth) return r;
    for (std::size_t c = 0; c < r.grid.cells.size(); ++c) {
        const auto& cell = r.grid.cells[c];
        if (!cell.nc) continue;
        r.accuracy[c] = clustering_accuracy(cell.clusters.labels, *truth);
        if (!r.best_accuracy_index || *r.accuracy[c] > *r.accuracy[*r.best_accuracy_index]) r.best_accuracy_index = c;
    }
    return r;
}

CsvTable benchmark_summary_csv(const BenchmarkResult& r, const ExperimentConfig& cfg) {
    CsvTable t({"psi", "ratio", "method", "setting", "lambda_z", "lambda_e", "lambda_a", "p2", "p3", "trr_lambda",
                "trr_keep", "base_seed", "replications", "failures", "mean_accuracy", "std_accuracy"});
    for (const auto& s : r.best) {
        auto& row = t.row().add(s.psi).add(s.ratio).add(s.method).add(s.setting);
        if (s.method == "lrtsd") {
            row.add(s.params.lambda_z).add(s.params.lambda_e).add(lambda_a_label(s.params, cfg.auto_lambda_a))
                .add(s.params.p2).add(s.params.p3);
        } else {
            row.add("").add("").add("").add("").add("");
        }
        if (s.method == "trr") row.add(s.trr_lambda).add(s.trr_keep);
        else row.add("").add("");
        row.add(cfg.seed).add(s.runs).add(s.failures).add(s.mean_accuracy).add(s.std_accuracy);
    }
    return t;
}

CsvTable benchmark_settings_csv(const BenchmarkResult& r, const ExperimentConfig& cfg) {
    BenchmarkResult view;
    view.best = r.all_settings;
    return benchmark_summary_csv(view, cfg);
}

CsvTable benchmark_runs_csv(const BenchmarkResult& r, const ExperimentConfig& cfg) {
    CsvTable t({"psi", "ratio", "rep", "seed", "method", "setting", "lambda_z", "lambda_e", "lambda_a", "p2", "p3",
                "trr_lambda", "trr_keep", "accuracy", "error"});
    for (const auto& run : r.runs) {
        auto& row = t.row().add(run.psi).add(run.ratio).add(run.rep).add(run.seed).add(run.method).add(run.setting);
        if (run.method == "lrtsd") {
            row.add(run.params.lambda_z).add(run.params.lambda_e).add(run.params.lambda_a).add(run.params.p2).add(run.params.p3);
        } else {
            row.add("").add("").add("").add("").add("");
        }
        if (run.method == "trr") row.add(run.trr_lambda).add(run.trr_keep);
        else row.add("").add("");
        row.add(run.accuracy).add(run.error);
    }
    (void)cfg;
    return t;
}

CsvTable ablation_runs_csv(const AblationResult& r, const ExperimentConfig& cfg) {
    CsvTable t({"psi", "ratio", "rep", "seed", "lambda_z", "lambda_e", "lambda_a", "p2", "p3", "accuracy_on",
                "accuracy_off", "gain", "anomaly_l1_on", "anomaly_l1_off", "error"});
    const auto& h = cfg.hyperparams;
    for (const auto& run : r.runs) {
        t.row().add(run.psi).add(run.ratio).add(run.rep).add(run.seed).add(h.lambda_z).add(h.lambda_e).add(run.lambda_a)
            .add(h.p2).add(h.p3).add(run.accuracy_on).add(run.accuracy_off).add(run.gain()).add(run.anomaly_l1_on)
            .add(run.anomaly_l1_off).add(run.error);
    }
    return t;
}

CsvTable ablation_cells_csv(const AblationResult& r, const ExperimentConfig& cfg) {
    CsvTable t({"psi", "ratio", "lambda_z", "lambda_e", "lambda_a", "p2", "p3", "base_seed", "method", "runs",
                "failures", "positive_gains", "mean_gain"});
    const auto& h = cfg.hyperparams;
    for (const auto& c : r.cells) {
        t.row().add(c.psi).add(c.ratio).add(h.lambda_z).add(h.lambda_e).add(lambda_a_label(h, cfg.auto_lambda_a))
            .add(h.p2).add(h.p3).add(cfg.seed).add("lrtsd-on-minus-off").add(c.runs).add(c.failures).add(c.positive)
            .add(c.mean_gain);
    }
    return t;
}

CsvTable dimred_runs_csv(const DimredResult& r, const ExperimentConfig& cfg) {
    CsvTable t({"rep", "seed", "rank", "factor", "method", "lambda_z", "lambda_e", "lambda_a", "psi", "ratio",
                "accuracy", "above_min", "error"});
    const auto& h = cfg.hyperparams;
    for (const auto& run : r.runs) {
        const bool ridge = run.rank == cfg.sim.ambient_dims[0] && run.rank == cfg.sim.ambient_dims[1];
        t.row().add(run.rep).add(run.seed).add(run.rank).add(run.factor).add(ridge ? "ridge" : "lrtsd").add(h.lambda_z)
            .add(h.lambda_e).add(lambda_a_label(h, cfg.auto_lambda_a)).add(cfg.sim.anomaly_intensity)
            .add(cfg.sim.anomaly_ratio).add(run.accuracy).add(run.above_min).add(run.error);
    }
    return t;
}

CsvTable dimred_points_csv(const DimredResult& r, const ExperimentConfig& cfg) {
    CsvTable t({"rank", "factor", "lambda_z", "lambda_e", "lambda_a", "base_seed", "replications", "mean_accuracy",
                "mean_above_min"});
    const auto& h = cfg.hyperparams;
    for (const auto& p : r.points) {
        t.row().add(p.rank).add(p.factor).add(h.lambda_z).add(h.lambda_e).add(lambda_a_label(h, cfg.auto_lambda_a))
            .add(cfg.seed).add(cfg.replications).add(p.mean_accuracy).add(p.mean_above_min);
    }
    return t;
}

CsvTable tuning_csv(const TuningResult& r, const GridSpec& grid, std::uint64_t seed) {
    CsvTable t({"cell", "lambda_z", "lambda_e", "lambda_a", "p2", "p3", "seed", "method", "nc", "accuracy", "selected",
                "error"});
    for (std::size_t c = 0; c < r.grid.cells.size(); ++c) {
        const auto& cell = r.grid.cells[c];
        auto& row = t.row().add(c).add(cell.params.lambda_z).add(cell.params.lambda_e).add(cell.params.lambda_a)
                        .add(grid.p2).add(grid.p3).add(seed).add("lrtsd");
        if (cell.nc) row.add(*cell.nc);
        else row.add("");
        if (r.accuracy[c]) row.add(*r.accuracy[c]);
        else row.add("");
        row.add(c == r.grid.best_index ? 1 : 0).add(cell.error);
    }
    return t;
}

json run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);
    const auto out = [&](const char* name) { return cfg.output_dir / name; };
    const auto t0 = Clock::now();
    json summary = {{"config", to_json(cfg)}};

    switch (cfg.kind) {
        case ExperimentKind::BenchmarkSweep: {
            const auto r = run_benchmark_sweep(cfg);
            benchmark_summary_csv(r, cfg).write(out("bench_summary.csv"));
            benchmark_settings_csv(r, cfg).write(out("bench_settings.csv"));
            benchmark_runs_csv(r, cfg).write(out("bench_runs.csv"));
            json rows = json::array();
            std::map<std::string, std::vector<double>> secs;
            for (const auto& s : r.best) {
                rows.push_back({{"psi", s.psi}, {"ratio", s.ratio}, {"method", s.method}, {"mean_accuracy", s.mean_accuracy},
                                {"std_accuracy", s.std_accuracy}, {"failures", s.failures}});
            }
            for (const auto& run : r.runs)
                if (run.error.empty()) secs[run.method].push_back(run.seconds);
            json timing;
            for (const auto& [m, v] : secs) timing[m] = {{"mean_seconds_per_run", mean_std(v).mean}, {"runs", v.size()}};
            summary["best"] = rows;
            summary["timing"] = timing;
            summary["outputs"] = {"bench_summary.csv", "bench_settings.csv", "bench_runs.csv"};
            break;
        }
        case ExperimentKind::AnomalyAblation: {
            const auto r = run_anomaly_ablation(cfg);
            ablation_cells_csv(r, cfg).write(out("ablation_cells.csv"));
            ablation_runs_csv(r, cfg).write(out("ablation_runs.csv"));
            json cells = json::array();
            for (const auto& c : r.cells) {
                cells.push_back({{"psi", c.psi}, {"ratio", c.ratio}, {"mean_gain", c.mean_gain}, {"positive", c.positive},
                                 {"runs", c.runs}, {"failures", c.failures}});
            }
            summary["cells"] = cells;
            summary["outputs"] = {"ablation_cells.csv", "ablation_runs.csv"};
            break;
        }
        case ExperimentKind::DimredSweep: {
            const auto r = run_dimred_sweep(cfg);
            dimred_points_csv(r, cfg).write(out("dimred_points.csv"));
            dimred_runs_csv(r, cfg).write(out("dimred_runs.csv"));
            const auto& best = r.points[r.best_point];
            summary["best_factor"] = best.factor;
            summary["best_rank"] = best.rank;
            summary["outputs"] = {"dimred_points.csv", "dimred_runs.csv"};
            break;
        }
        case ExperimentKind::TuningGrid: {
            Labels truth;
            const Tensor3 x = experiment_input(cfg, &truth);
            const auto r = run_tuning_grid(x, cfg.grid, cfg.k, cfg.input ? nullptr : &truth);
            tuning_csv(r, cfg.grid, cfg.input ? cfg.grid.seed : cfg.sim.seed).write(out("tuning.csv"));
            summary["selected"] = to_json(r.grid.best);
            summary["selected_nc"] = *r.grid.cells[r.grid.best_index].nc;
            if (r.best_accuracy_index) {
                summary["selected_accuracy"] = r.accuracy[r.grid.best_index] ? json(*r.accuracy[r.grid.best_index]) : json();
                summary["best_accuracy"] = *r.accuracy[*r.best_accuracy_index];
            }
            summary["outputs"] = {"tuning.csv"};
            break;
        }
        case ExperimentKind::FitSingle: {
            Labels truth;
            const Tensor3 x = experiment_input(cfg, &truth);
            const auto r = run_lrtsd(x, cfg.hyperparams, cfg.auto_lambda_a, cfg.k, cfg.sim.seed);
            summary["hyperparams"] = to_json(r.params);
            summary["objective_trace"] = r.state.objective_trace;
            summary["sweeps_run"] = r.state.sweeps_run;
            summary["converged"] = r.state.converged;
            summary["labels"] = r.clusters.labels;
            summary["nc"] = r.clusters.nc_score;
            summary["seconds"] = r.seconds;
            if (!cfg.input) summary["accuracy"] = clustering_accuracy(r.clusters.labels, truth);
            break;
        }
    }
    summary["elapsed_seconds"] = seconds_since(t0);
    write_json_file(out("metrics.json"), summary);
    return summary;
}

}  // namespace lrtsd::harness
