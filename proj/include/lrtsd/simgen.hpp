#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lrtsd/clustering.hpp"
#include "lrtsd/tensor.hpp"

namespace lrtsd {

/// Synthetic clustered tensor configuration. Defaults are the 90 x 50 x 50
/// benchmark regime.
struct SimConfig {
    std::size_t k_clusters = 3;
    std::size_t n_per_cluster = 30;
    std::array<std::size_t, 2> ambient_dims{50, 50};   // I2, I3
    std::array<std::size_t, 2> intrinsic_dims{5, 5};   // P2, P3 per cluster
    double noise_sigma = 0.5;
    double anomaly_ratio = 0.0;
    double anomaly_intensity = 0.0;
    std::uint64_t seed = 0;
    // Multiplies the standard-normal core. With orthonormal factors a scale
    // of sqrt(I2*I3 / (P2*P3)) gives unit-variance signal entries.
    double signal_scale = 1.0;
    bool retain_clean = false;

    void validate() const;
    Dims3 data_dims() const { return {k_clusters * n_per_cluster, ambient_dims[0], ambient_dims[1]}; }
};

struct SimData {
    Tensor3 x;
    Labels truth_labels;
    std::vector<std::uint8_t> anomaly_support;  // same layout as x, 1 where +psi was added
    Tensor3 signal;  // low-rank part only; empty unless retain_clean
    Tensor3 clean;   // signal + noise, before anomalies; empty unless retain_clean
};

/// Draw order from a single Rng(seed): for each cluster the I2 x P2 then
/// I3 x P3 standard-normal factor (column-major, QR-orthonormalized); then
/// each cluster's N x P2 x P3 core in tensor layout; then one noise draw per
/// entry of x in tensor layout; then one Bernoulli draw per entry.
SimData generate(const SimConfig& cfg);

/// Geometric mean of ambient / intrinsic over the non-clustering modes.
double dimension_reduction_factor(std::span<const std::size_t> ambient, std::span<const std::size_t> intrinsic);

}  // namespace lrtsd
