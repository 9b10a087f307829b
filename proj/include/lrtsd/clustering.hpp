#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrtsd/numerics.hpp"

namespace lrtsd {

using Labels = std::vector<int>;

/// Symmetric, nonnegative, zero-diagonal similarity graph.
struct Affinity {
    Matrix w;
};

struct ClusterResult {
    Labels labels;
    int k = 0;
    Vector eigenvalues;  // ascending spectrum of the normalized Laplacian
    double nc_score = 0.0;
};

/// w = |z + z^T| with the diagonal zeroed.
Affinity affinity_from_z(const Matrix& z);

/// I - D^{-1/2} W D^{-1/2}; isolated nodes get a unit diagonal entry.
Matrix normalized_laplacian(const Affinity& a);

/// Ascending eigenvalues of the normalized Laplacian.
Vector laplacian_spectrum(const Affinity& a);

struct KMeansOptions {
    int restarts = 20;
    int max_iterations = 300;
};

struct KMeansResult {
    Labels labels;
    Matrix centroids;  // k x d
    double inertia = 0.0;
};

/// Lloyd's algorithm with k-means++ seeding on the rows of `points`; the best
/// of `restarts` runs by inertia is returned. Ties in assignment go to the
/// lowest centroid index. Throws NumericalError if every restart keeps
/// producing an empty cluster.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& opts = {});

/// Ng-Jordan-Weiss spectral clustering: k smallest eigenvectors of the
/// normalized Laplacian, rows scaled to unit length, then k-means.
ClusterResult spectral_cluster(const Affinity& a, int k, std::uint64_t seed);

/// Eigengap estimate of the cluster count: the k in 1..k_max-1 with the
/// largest lambda_{k+1} - lambda_k in the ascending spectrum.
int choose_k(const Affinity& a, int k_max);
int choose_k_from_spectrum(const Vector& ascending, int k_max);

/// Best matching fraction over all relabelings of pred.
double clustering_accuracy(std::span<const int> pred, std::span<const int> truth);

/// Sum over clusters of W_out / (W_in + W_out); within-cluster pairs counted once.
double normalized_cut(const Affinity& a, std::span<const int> labels);

/// Optimal assignment for a square cost matrix (minimization). Returns the
/// column assigned to each row.
std::vector<int> hungarian(const Matrix& cost);

}  // namespace lrtsd
