#include "lrtsd/tuning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace lrtsd {

double otsu_threshold(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("otsu_threshold: need at least two values");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("otsu_threshold: non-finite value");
    if (!(hi > lo)) throw std::invalid_argument("otsu_threshold: all values are identical, no threshold exists");

    const double width = (hi - lo) / kOtsuBins;
    std::vector<double> count(kOtsuBins, 0.0);
    for (const double v : values) {
        const int b = std::min(kOtsuBins - 1, static_cast<int>((v - lo) / width));
        count[static_cast<std::size_t>(b)] += 1.0;
    }

    // Work in bin-center units (b + 0.5); the weighted within-class variance
    // only scales by width^2, which does not move the argmin.
    double n_all = 0.0, s_all = 0.0, q_all = 0.0;
    for (int b = 0; b < kOtsuBins; ++b) {
        const double c = b + 0.5;
        const double m = count[static_cast<std::size_t>(b)];
        n_all += m;
        s_all += m * c;
        q_all += m * c * c;
    }

    double n0 = 0.0, s0 = 0.0, q0 = 0.0;
    double best = std::numeric_limits<double>::infinity();
    int best_split = -1;
    for (int split = 1; split < kOtsuBins; ++split) {
        const double c = split - 0.5;
        const double m = count[static_cast<std::size_t>(split - 1)];
        n0 += m;
        s0 += m * c;
        q0 += m * c * c;
        const double n1 = n_all - n0;
        if (n0 == 0.0 || n1 == 0.0) continue;
        const double s1 = s_all - s0;
        const double q1 = q_all - q0;
        // w0*var0 + w1*var1 = (sum of squared deviations in both classes) / n.
        const double within = ((q0 - s0 * s0 / n0) + (q1 - s1 * s1 / n1)) / n_all;
        if (within < best) {
            best = within;
            best_split = split;
        }
    }
    return lo + best_split * width;
}

double select_lambda_a(const Tensor3& x, const FactorModel& model, double lambda_e) {
    if (!(lambda_e > 0.0)) throw std::invalid_argument("select_lambda_a: lambda_e must be positive");
    const Tensor3 resid = x - model.reconstruct();
    std::vector<double> mags(resid.size());
    std::transform(resid.data().begin(), resid.data().end(), mags.begin(), [](double v) { return std::abs(v); });
    return otsu_threshold(mags) * lambda_e;
}

void GridSpec::validate() const {
    if (lambda_z_values.empty() || lambda_e_values.empty() || lambda_a_values.empty()) {
        throw std::invalid_argument("grid: every lambda list must be nonempty");
    }
    for (const auto* list : {&lambda_z_values, &lambda_e_values, &lambda_a_values})
        for (double v : *list)
            if (!(v > 0.0)) throw std::invalid_argument("grid: lambda values must be positive");
}

Hyperparams GridSpec::cell(std::size_t index) const {
    const std::size_t na = lambda_a_values.size();
    const std::size_t ne = lambda_e_values.size();
    Hyperparams h;
    h.lambda_a = lambda_a_values[index % na];
    h.lambda_e = lambda_e_values[(index / na) % ne];
    h.lambda_z = lambda_z_values[index / (na * ne)];
    h.p2 = p2;
    h.p3 = p3;
    h.max_sweeps = max_sweeps;
    h.rel_tol = rel_tol;
    return h;
}

GridResult grid_search(const Tensor3& x, const GridSpec& grid, int k) {
    grid.validate();
    GridResult result;
    const std::size_t cells = grid.cell_count();
    result.cells.resize(cells);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(cells); ++c) {
        auto& cell = result.cells[static_cast<std::size_t>(c)];
        cell.params = grid.cell(static_cast<std::size_t>(c));
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const FitState s = fit(x, cell.params);
            cell.clusters = spectral_cluster(affinity_from_z(s.z), k, grid.seed);
            cell.nc = cell.clusters.nc_score;
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
        cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    const auto key = [](const Hyperparams& h) { return std::make_tuple(h.lambda_z, h.lambda_e, h.lambda_a); };
    bool found = false;
    for (std::size_t c = 0; c < cells; ++c) {
        const auto& cell = result.cells[c];
        if (!cell.nc) continue;
        const auto& best = result.cells[result.best_index];
        if (!found || *cell.nc < *best.nc || (*cell.nc == *best.nc && key(cell.params) < key(best.params))) {
            result.best_index = c;
            found = true;
        }
    }
    if (!found) throw NumericalError("grid_search: every grid cell failed");
    result.best = result.cells[result.best_index].params;
    return result;
}

}  // namespace lrtsd
