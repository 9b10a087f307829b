#include "lrtsd/harness/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "lrtsd/solver.hpp"

namespace lrtsd::harness {

Labels baseline_kmeans(const Tensor3& x, int k, std::uint64_t seed) {
    if (k < 1 || static_cast<std::size_t>(k) > x.dims()[0]) throw std::invalid_argument("kmeans baseline: k must be in [1, N]");
    return kmeans(unfold(x, 1), k, seed).labels;
}

Matrix trr_coefficients(const Tensor3& x, double lambda, int keep) {
    const auto n = static_cast<Eigen::Index>(x.dims()[0]);
    if (keep < 1 || keep >= n) throw std::invalid_argument("trr baseline: keep must be in [1, N)");
    const Matrix z = ridge_self_expression(unfold(x, 1), lambda);
    Matrix kept = Matrix::Zero(n, n);
    std::vector<Eigen::Index> order;
    for (Eigen::Index i = 0; i < n; ++i) {
        order.clear();
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) order.push_back(j);
        // Stable so equal magnitudes keep the lower column index.
        std::stable_sort(order.begin(), order.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return std::abs(z(i, a)) > std::abs(z(i, b)); });
        for (int t = 0; t < keep; ++t) kept(i, order[static_cast<std::size_t>(t)]) = z(i, order[static_cast<std::size_t>(t)]);
    }
    return kept;
}

Labels baseline_trr(const Tensor3& x, int k, double lambda, int keep, std::uint64_t seed) {
    return spectral_cluster(affinity_from_z(trr_coefficients(x, lambda, keep)), k, seed).labels;
}

}  // namespace lrtsd::harness
