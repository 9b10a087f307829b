#include "lrtsd/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lrtsd/random.hpp"

namespace lrtsd {

namespace {


// Maps arbitrary labels onto 0..m-1 in order of first appearance.
std::vector<int> densify(std::span<const int> labels, int& count) {
    std::map<int, int> ids;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = ids.try_emplace(labels[i], static_cast<int>(ids.size()));
        out[i] = it->second;
    }
    count = static_cast<int>(ids.size());
    return out;
}

double row_sq_dist(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
    return (a.row(i) - b.row(j)).squaredNorm();
}

Matrix seed_plus_plus(const Matrix& pts, int k, Rng& rng) {
    const Eigen::Index n = pts.rows();
    Matrix centers(k, pts.cols());
    std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    auto first = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)));
    centers.row(0) = pts.row(first);
    taken[static_cast<std::size_t>(first)] = true;
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            auto& d = d2[static_cast<std::size_t>(i)];
            d = std::min(d, row_sq_dist(pts, i, centers, c - 1));
            total += d;
        }
        Eigen::Index pick = -1;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            for (Eigen::Index i = 0; i < n; ++i) {
                target -= d2[static_cast<std::size_t>(i)];
                if (target < 0.0 && d2[static_cast<std::size_t>(i)] > 0.0) {
                    pick = i;
                    break;
                }
            }
            if (pick < 0) {
                for (Eigen::Index i = n - 1; i >= 0; --i) {
                    if (d2[static_cast<std::size_t>(i)] > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        } else {
            // All remaining points coincide with a center: take any unused one.
            std::vector<Eigen::Index> free;
            for (Eigen::Index i = 0; i < n; ++i)
                if (!taken[static_cast<std::size_t>(i)]) free.push_back(i);
            pick = free[rng.index(free.size())];
        }
        centers.row(c) = pts.row(pick);
        taken[static_cast<std::size_t>(pick)] = true;
    }
    return centers;
}

// One Lloyd run; returns false if a cluster emptied.
bool lloyd(const Matrix& pts, Matrix& centers, Labels& labels, double& inertia, int max_iter) {
    const Eigen::Index n = pts.rows();
    const auto k = static_cast<int>(centers.rows());
    labels.assign(static_cast<std::size_t>(n), -1);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        inertia = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = row_sq_dist(pts, i, centers, 0);
            for (int c = 1; c < k; ++c) {
                const double d = row_sq_dist(pts, i, centers, c);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            inertia += best_d;
            if (labels[static_cast<std::size_t>(i)] != best) {
                labels[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        Matrix sums = Matrix::Zero(k, pts.cols());
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = labels[static_cast<std::size_t>(i)];
            sums.row(c) += pts.row(i);
            ++counts[static_cast<std::size_t>(c)];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] == 0) return false;
            centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
        }
        if (!changed) break;
    }
    return true;
}

}  // namespace

Affinity affinity_from_z(const Matrix& z) {
    if (z.rows() != z.cols()) throw DimensionError("affinity_from_z: matrix is not square");
    Affinity a{(z + z.transpose()).cwiseAbs()};
    a.w.diagonal().setZero();
    return a;
}

Matrix normalized_laplacian(const Affinity& a) {
    const Eigen::Index n = a.w.rows();
    const Vector deg = a.w.rowwise().sum();
    Vector inv_sqrt(n);
    for (Eigen::Index i = 0; i < n; ++i) inv_sqrt(i) = deg(i) > 0.0 ? 1.0 / std::sqrt(deg(i)) : 0.0;
    Matrix l = -(inv_sqrt.asDiagonal() * a.w * inv_sqrt.asDiagonal());
    l.diagonal().array() += 1.0;
    return 0.5 * (l + l.transpose());
}

Vector laplacian_spectrum(const Affinity& a) { return sym_eig(normalized_laplacian(a)).values; }

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& opts) {
    const Eigen::Index n = points.rows();
    if (k < 1) throw std::invalid_argument("kmeans: k must be positive");
    if (k > n) throw std::invalid_argument("kmeans: k = " + std::to_string(k) + " exceeds point count " + std::to_string(n));
    Rng rng(seed);
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    int successes = 0;
    // Restarts that empty a cluster are re-seeded up to as many extra times.
    const int max_attempts = 2 * opts.restarts;
    for (int attempt = 0; attempt < max_attempts && successes < opts.restarts; ++attempt) {
        Matrix centers = seed_plus_plus(points, k, rng);
        Labels labels;
        double inertia = 0.0;
        if (!lloyd(points, centers, labels, inertia, opts.max_iterations)) continue;
        ++successes;
        if (inertia < best.inertia) {
            best.inertia = inertia;
            best.labels = std::move(labels);
            best.centroids = std::move(centers);
        }
    }
    if (successes == 0) throw NumericalError("kmeans: every restart produced an empty cluster");
    return best;
}

ClusterResult spectral_cluster(const Affinity& a, int k, std::uint64_t seed) {
    const Eigen::Index n = a.w.rows();
    if (k < 1 || k > n) throw std::invalid_argument("spectral_cluster: k must be in [1, N]");
    const SymEig eig = sym_eig(normalized_laplacian(a));
    const Vector deg = a.w.rowwise().sum();
    Matrix embed = eig.vectors.leftCols(k);
    const double uniform = 1.0 / std::sqrt(static_cast<double>(k));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = embed.row(i).norm();
        if (deg(i) <= 0.0 || norm <= 1e-300) {
            embed.row(i).setConstant(uniform);
        } else {
            embed.row(i) /= norm;
        }
    }
    ClusterResult r;
    r.k = k;
    r.labels = kmeans(embed, k, seed).labels;
    r.eigenvalues = eig.values;
    r.nc_score = normalized_cut(a, r.labels);
    return r;
}

int choose_k_from_spectrum(const Vector& ascending, int k_max) {
    if (k_max < 2) throw std::invalid_argument("choose_k: k_max must be at least 2");
    const int limit = std::min<int>(k_max, static_cast<int>(ascending.size()));
    int best_k = 1;
    double best_gap = -std::numeric_limits<double>::infinity();
    for (int k = 1; k < limit; ++k) {
        const double gap = std::max(0.0, ascending(k)) - std::max(0.0, ascending(k - 1));
        if (gap > best_gap) {
            best_gap = gap;
            best_k = k;
        }
    }
    return best_k;
}

int choose_k(const Affinity& a, int k_max) { return choose_k_from_spectrum(laplacian_spectrum(a), k_max); }

std::vector<int> hungarian(const Matrix& cost) {
    // Shortest augmenting path formulation with row/column potentials, O(n^3).
    const int n = static_cast<int>(cost.rows());
    if (cost.cols() != cost.rows()) throw DimensionError("hungarian: cost matrix must be square");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<bool> used(n + 1);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assign(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) assign[p[j] - 1] = j - 1;
    return assign;
}

double clustering_accuracy(std::span<const int> pred, std::span<const int> truth) {
    if (pred.size() != truth.size()) throw std::invalid_argument("clustering_accuracy: label vectors differ in length");
    if (pred.empty()) throw std::invalid_argument("clustering_accuracy: empty labelings");
    int kp = 0, kt = 0;
    const auto p = densify(pred, kp);
    const auto t = densify(truth, kt);
    const int k = std::max(kp, kt);
    Matrix confusion = Matrix::Zero(k, k);
    for (std::size_t i = 0; i < p.size(); ++i) confusion(p[i], t[i]) += 1.0;

    double best = 0.0;
    if (k <= 8) {
        std::vector<int> perm(static_cast<std::size_t>(k));
        std::iota(perm.begin(), perm.end(), 0);
        do {
            double hits = 0.0;
            for (int r = 0; r < k; ++r) hits += confusion(r, perm[static_cast<std::size_t>(r)]);
            best = std::max(best, hits);
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        const auto assign = hungarian(-confusion);
        for (int r = 0; r < k; ++r) best += confusion(r, assign[static_cast<std::size_t>(r)]);
    }
    return best / static_cast<double>(pred.size());
}

double normalized_cut(const Affinity& a, std::span<const int> labels) {
    const Eigen::Index n = a.w.rows();
    if (static_cast<Eigen::Index>(labels.size()) != n) throw std::invalid_argument("normalized_cut: label count != N");
    int k = 0;
    const auto dense = densify(labels, k);
    std::vector<double> w_in(static_cast<std::size_t>(k), 0.0), w_out(static_cast<std::size_t>(k), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double w = a.w(i, j);
            const int ci = dense[static_cast<std::size_t>(i)];
            const int cj = dense[static_cast<std::size_t>(j)];
            if (ci == cj) {
                w_in[static_cast<std::size_t>(ci)] += w;
            } else {
                w_out[static_cast<std::size_t>(ci)] += w;
                w_out[static_cast<std::size_t>(cj)] += w;
            }
        }
    }
    double nc = 0.0;
    for (int c = 0; c < k; ++c) {
        const double total = w_in[static_cast<std::size_t>(c)] + w_out[static_cast<std::size_t>(c)];
        if (total > 0.0) nc += w_out[static_cast<std::size_t>(c)] / total;
    }
    return nc;
}

}  // namespace lrtsd
