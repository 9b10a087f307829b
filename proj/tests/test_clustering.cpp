#include <gtest/gtest.h>

#include "lrtsd/clustering.hpp"
#include "lrtsd/numerics.hpp"
#include "oracles.hpp"

using namespace lrtsd;

namespace {

/// Block-constant affinity: `within` inside blocks, `across` between them.
/// Optional uniform jitter on within-block pairs, and on cross pairs too
/// when cross_jitter is set. Zero diagonal.
Affinity block_affinity(const std::vector<int>& sizes, double within, double across, Rng* rng = nullptr,
                        double jitter = 0.0, bool cross_jitter = false) {
    std::vector<int> label;
    for (std::size_t b = 0; b < sizes.size(); ++b) label.insert(label.end(), sizes[b], static_cast<int>(b));
    const auto n = static_cast<Eigen::Index>(label.size());
    Matrix w = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const bool same = label[i] == label[j];
            double v = same ? within : across;
            if (rng && (same || cross_jitter)) v += jitter * rng->uniform();
            w(i, j) = w(j, i) = v;
        }
    return {w};
}

Labels block_labels(const std::vector<int>& sizes) {
    Labels l;
    for (std::size_t b = 0; b < sizes.size(); ++b) l.insert(l.end(), sizes[b], static_cast<int>(b));
    return l;
}

}  // namespace

TEST(Affinity, Examples) {
    EXPECT_EQ(affinity_from_z(Matrix::Identity(3, 3)).w, Matrix::Zero(3, 3));
    Matrix anti(2, 2);
    anti << 0, 1, -1, 0;
    EXPECT_EQ(affinity_from_z(anti).w, Matrix::Zero(2, 2));
    Matrix z(2, 2), want(2, 2);
    z << 0, 2, 0, 0;
    want << 0, 2, 2, 0;
    EXPECT_EQ(affinity_from_z(z).w, want);
    EXPECT_THROW(affinity_from_z(Matrix::Zero(2, 3)), DimensionError);
}

TEST(Affinity, SymmetricNonnegativeHollowOnRandomInput) {
    Rng rng(51);
    const Matrix w = affinity_from_z(oracle::random_matrix(rng, 9, 9)).w;
    EXPECT_EQ(w, Matrix(w.transpose()));
    EXPECT_GE(w.minCoeff(), 0.0);
    EXPECT_EQ(w.diagonal(), Vector::Zero(9));
}

TEST(Laplacian, IsolatedNodeGetsUnitDiagonal) {
    Matrix w = Matrix::Zero(3, 3);
    w(0, 1) = w(1, 0) = 2.0;
    const Matrix l = normalized_laplacian({w});
    EXPECT_EQ(l(2, 2), 1.0);
    EXPECT_NEAR(l(0, 1), -1.0, 1e-15);
    EXPECT_NEAR(l(0, 0), 1.0, 1e-15);
}

TEST(SpectralCluster, TwoBlocksOfOnes) {
    const Affinity a = block_affinity({4, 5}, 1.0, 0.0);
    const ClusterResult r = spectral_cluster(a, 2, 1);
    EXPECT_EQ(clustering_accuracy(r.labels, block_labels({4, 5})), 1.0);
    EXPECT_EQ(r.k, 2);
    EXPECT_NEAR(r.nc_score, 0.0, 1e-15);
}

TEST(SpectralCluster, ZeroGraphSingleCluster) {
    const ClusterResult r = spectral_cluster({Matrix::Zero(5, 5)}, 1, 1);
    EXPECT_EQ(r.labels, Labels(5, 0));
}

TEST(SpectralCluster, NoisyThreeBlocks) {
    Rng rng(52);
    const std::vector<int> sizes{10, 12, 8};
    const Affinity a = block_affinity(sizes, 1.0, 0.05, &rng, 0.2, true);
    const ClusterResult r = spectral_cluster(a, 3, 7);
    EXPECT_EQ(clustering_accuracy(r.labels, block_labels(sizes)), 1.0);
    for (int c = 0; c < 3; ++c) EXPECT_NE(std::count(r.labels.begin(), r.labels.end(), c), 0);
}

TEST(SpectralCluster, RejectsTooManyClusters) {
    EXPECT_THROW(spectral_cluster({Matrix::Zero(2, 2)}, 3, 0), std::invalid_argument);
}

TEST(SpectralCluster, DeterministicForFixedSeed) {
    Rng rng(53);
    const Affinity a = block_affinity({6, 6, 6}, 1.0, 0.3, &rng, 0.8, true);
    EXPECT_EQ(spectral_cluster(a, 3, 9).labels, spectral_cluster(a, 3, 9).labels);
}

TEST(KMeans, SeparatedCloudsAndInertia) {
    Rng rng(54);
    Matrix p(20, 2);
    for (int i = 0; i < 20; ++i) {
        p(i, 0) = (i < 10 ? 0.0 : 50.0) + 0.1 * rng.normal();
        p(i, 1) = 0.1 * rng.normal();
    }
    const KMeansResult r = kmeans(p, 2, 3);
    Labels truth(20, 0);
    std::fill(truth.begin() + 10, truth.end(), 1);
    EXPECT_EQ(clustering_accuracy(r.labels, truth), 1.0);
    double inertia = 0;
    for (int i = 0; i < 20; ++i) inertia += (p.row(i) - r.centroids.row(r.labels[i])).squaredNorm();
    EXPECT_NEAR(r.inertia, inertia, 1e-9);
}

TEST(ChooseK, DisconnectedComponents) {
    Rng rng(55);
    for (int c = 1; c <= 6; ++c) {
        std::vector<int> sizes;
        for (int b = 0; b < c; ++b) sizes.push_back(3 + static_cast<int>(rng.index(5)));
        const Affinity a = block_affinity(sizes, 1.0, 0.0, &rng, 0.5);
        EXPECT_EQ(choose_k(a, 10), c) << "components " << c;
    }
}

TEST(ChooseK, CompleteGraphIsOneCluster) { EXPECT_EQ(choose_k(block_affinity({12}, 1.0, 0.0), 8), 1); }

TEST(ChooseK, ThreeBlocksWithCrossNoise) {
    Rng rng(56);
    const Affinity a = block_affinity({10, 10, 10}, 1.0, 0.0, &rng, 0.05, true);
    EXPECT_EQ(choose_k(a, 10), 3);
}

TEST(ChooseK, SpectrumFormOnHandValues) {
    Vector s(5);
    s << 0, 0.01, 0.02, 0.9, 1.0;
    EXPECT_EQ(choose_k_from_spectrum(s, 5), 3);
    EXPECT_THROW(choose_k_from_spectrum(s, 1), std::invalid_argument);
}

TEST(Accuracy, Examples) {
    const Labels truth{0, 0, 1, 1, 2, 2};
    EXPECT_EQ(clustering_accuracy(truth, truth), 1.0);
    EXPECT_EQ(clustering_accuracy(Labels{2, 2, 0, 0, 1, 1}, truth), 1.0);
    EXPECT_NEAR(clustering_accuracy(Labels{1, 1, 0, 0, 0, 2}, truth), 5.0 / 6.0, 1e-15);
    EXPECT_THROW(clustering_accuracy(Labels{0, 1}, Labels{0}), std::invalid_argument);
}

TEST(Accuracy, MatchesExhaustiveOracleAndIsSymmetric) {
    Rng rng(57);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 1 + static_cast<int>(rng.index(5));
        const int n = 5 + static_cast<int>(rng.index(20));
        Labels a(n), b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = static_cast<int>(rng.index(k));
            b[i] = static_cast<int>(rng.index(k));
        }
        const double want = oracle::brute_accuracy(a, b);
        EXPECT_NEAR(clustering_accuracy(a, b), want, 1e-15);
        EXPECT_NEAR(clustering_accuracy(b, a), want, 1e-15);
    }
}

TEST(Accuracy, HungarianPathAgreesWithOracleAboveEightLabels) {
    Rng rng(58);
    for (int trial = 0; trial < 3; ++trial) {
        const int n = 40;
        Labels a(n), b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = static_cast<int>(rng.index(9));
            b[i] = (a[i] + (rng.uniform() < 0.3 ? 1 : 0)) % 9;
        }
        EXPECT_NEAR(clustering_accuracy(a, b), oracle::brute_accuracy(a, b), 1e-15);
    }
}

TEST(Accuracy, EveryPointItsOwnCluster) {
    const Labels truth{0, 0, 0, 1, 1, 2};
    const Labels own{0, 1, 2, 3, 4, 5};
    EXPECT_NEAR(clustering_accuracy(own, truth), 0.5, 1e-15);
}

TEST(Hungarian, MatchesBruteForceAssignment) {
    Rng rng(59);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.index(6));
        const Matrix cost = oracle::random_matrix(rng, n, n);
        const auto assign = hungarian(cost);
        double got = 0;
        for (int i = 0; i < n; ++i) got += cost(i, assign[i]);
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        double best = std::numeric_limits<double>::infinity();
        do {
            double c = 0;
            for (int i = 0; i < n; ++i) c += cost(i, perm[i]);
            best = std::min(best, c);
        } while (std::next_permutation(perm.begin(), perm.end()));
        EXPECT_NEAR(got, best, 1e-12);
    }
}

TEST(NormalizedCut, Examples) {
    EXPECT_NEAR(normalized_cut(block_affinity({3, 4}, 1.0, 0.0), block_labels({3, 4})), 0.0, 1e-15);
    EXPECT_NEAR(normalized_cut(block_affinity({4}, 1.0, 0.0), Labels{0, 0, 1, 1}), 1.6, 1e-15);
    EXPECT_NEAR(normalized_cut(block_affinity({5}, 1.0, 0.0), Labels(5, 0)), 0.0, 1e-15);
}

TEST(NormalizedCut, ZeroWeightClusterContributesNothing) {
    Matrix w = Matrix::Zero(3, 3);
    w(0, 1) = w(1, 0) = 1.0;
    EXPECT_NEAR(normalized_cut({w}, Labels{0, 0, 1}), 0.0, 1e-15);
}

TEST(NormalizedCut, RemovingCrossEdgeLowersScore) {
    Affinity a = block_affinity({3, 3}, 1.0, 0.2);
    const Labels l = block_labels({3, 3});
    const double before = normalized_cut(a, l);
    a.w(0, 4) = a.w(4, 0) = 0.0;
    EXPECT_LT(normalized_cut(a, l), before);
}
