#pragma once

#include <cstdint>

#include "lrtsd/clustering.hpp"
#include "lrtsd/tensor.hpp"

namespace lrtsd::harness {

/// k-means on the vectorized mode-1 slices (each sample flattened to I2*I3).
Labels baseline_kmeans(const Tensor3& x, int k, std::uint64_t seed);

/// Thresholding ridge regression: ridge self-expression of the vectorized
/// samples, keep the `keep` largest-magnitude off-diagonal entries of each
/// row, then spectral clustering of |Z + Z^T|.
Labels baseline_trr(const Tensor3& x, int k, double lambda, int keep, std::uint64_t seed);

/// The self-expression matrix the TRR baseline clusters (after thresholding).
Matrix trr_coefficients(const Tensor3& x, double lambda, int keep);

/// Default number of entries TRR keeps per row.
inline int default_trr_keep(int k) { return 3 * k; }

}  // namespace lrtsd::harness
