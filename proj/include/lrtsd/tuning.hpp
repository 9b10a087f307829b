#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrtsd/clustering.hpp"
#include "lrtsd/solver.hpp"

namespace lrtsd {

inline constexpr int kOtsuBins = 256;

/// Otsu threshold over a 256-bin histogram spanning [min, max]: the bin edge
/// t minimizing w0*var0 + w1*var1 of the bin-center values, smallest t on
/// ties. Throws std::invalid_argument when all values are equal.
double otsu_threshold(std::span<const double> values);

/// lambda_a = t * lambda_e where t is the Otsu threshold of |x - model|.
double select_lambda_a(const Tensor3& x, const FactorModel& model, double lambda_e);

struct GridSpec {
    std::vector<double> lambda_z_values;
    std::vector<double> lambda_e_values;
    std::vector<double> lambda_a_values;
    std::size_t p2 = 1;
    std::size_t p3 = 1;
    std::size_t max_sweeps = 200;
    double rel_tol = 1e-6;
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t cell_count() const {
        return lambda_z_values.size() * lambda_e_values.size() * lambda_a_values.size();
    }
    Hyperparams cell(std::size_t index) const;
};

struct GridCell {
    Hyperparams params;
    std::optional<double> nc;  // empty when the fit failed
    ClusterResult clusters;
    std::string error;
    double seconds = 0.0;
};

struct GridResult {
    Hyperparams best;
    std::size_t best_index = 0;
    std::vector<GridCell> cells;  // ordered by (lambda_z, lambda_e, lambda_a) index
};

/// Fits every grid cell, clusters Z into k groups and returns the cell with
/// the smallest normalized cut (ties go to the lexicographically smallest
/// (lambda_z, lambda_e, lambda_a)). Throws NumericalError if every cell fails.
GridResult grid_search(const Tensor3& x, const GridSpec& grid, int k);

}  // namespace lrtsd
