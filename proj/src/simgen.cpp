#include "lrtsd/simgen.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lrtsd/numerics.hpp"
#include "lrtsd/random.hpp"

namespace lrtsd {

namespace {

Matrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.normal();
    return m;
}

}  // namespace

void SimConfig::validate() const {
    if (k_clusters < 1 || n_per_cluster < 1) throw std::invalid_argument("simulate: cluster counts must be positive");
    for (int l = 0; l < 2; ++l) {
        if (ambient_dims[l] < 1 || intrinsic_dims[l] < 1) throw std::invalid_argument("simulate: dimensions must be positive");
        if (intrinsic_dims[l] > ambient_dims[l]) {
            throw std::invalid_argument("simulate: intrinsic dimension " + std::to_string(intrinsic_dims[l]) +
                                        " exceeds ambient " + std::to_string(ambient_dims[l]));
        }
    }
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("simulate: noise_sigma must be nonnegative");
    if (!(anomaly_ratio >= 0.0 && anomaly_ratio < 1.0)) throw std::invalid_argument("simulate: anomaly_ratio must be in [0, 1)");
    if (!(signal_scale > 0.0) || !std::isfinite(signal_scale)) throw std::invalid_argument("simulate: signal_scale must be positive");
    if (!std::isfinite(anomaly_intensity)) throw std::invalid_argument("simulate: anomaly_intensity must be finite");
}

SimData generate(const SimConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const std::size_t k = cfg.k_clusters;
    const std::size_t n = cfg.n_per_cluster;
    const auto [i2, i3] = cfg.ambient_dims;
    const auto [p2, p3] = cfg.intrinsic_dims;

    std::vector<Matrix> u2(k), u3(k);
    for (std::size_t c = 0; c < k; ++c) {
        u2[c] = qr_orthonormalize(gaussian_matrix(rng, i2, p2));
        u3[c] = qr_orthonormalize(gaussian_matrix(rng, i3, p3));
    }
    std::vector<Tensor3> cores;
    cores.reserve(k);
    for (std::size_t c = 0; c < k; ++c) {
        Tensor3 core(n, p2, p3);
        for (double& v : core.data()) v = cfg.signal_scale * rng.normal();
        cores.push_back(std::move(core));
    }

    SimData out;
    out.x = Tensor3(cfg.data_dims());
    out.truth_labels.resize(k * n);
    for (std::size_t c = 0; c < k; ++c) {
        const Tensor3 block = tucker_expand(cores[c], u2[c], u3[c]);
        for (std::size_t kk = 0; kk < i3; ++kk)
            for (std::size_t j = 0; j < i2; ++j)
                for (std::size_t i = 0; i < n; ++i) out.x(c * n + i, j, kk) = block(i, j, kk);
        for (std::size_t i = 0; i < n; ++i) out.truth_labels[c * n + i] = static_cast<int>(c);
    }
    if (cfg.retain_clean) out.signal = out.x;

    for (double& v : out.x.data()) v += cfg.noise_sigma * rng.normal();
    if (cfg.retain_clean) out.clean = out.x;

    out.anomaly_support.assign(out.x.size(), 0);
    auto xd = out.x.data();
    for (std::size_t e = 0; e < xd.size(); ++e) {
        if (rng.bernoulli(cfg.anomaly_ratio)) {
            out.anomaly_support[e] = 1;
            xd[e] += cfg.anomaly_intensity;
        }
    }
    return out;
}

double dimension_reduction_factor(std::span<const std::size_t> ambient, std::span<const std::size_t> intrinsic) {
    if (ambient.size() != intrinsic.size() || ambient.empty()) {
        throw std::invalid_argument("dimension_reduction_factor: mode lists must be nonempty and equal length");
    }
    double log_sum = 0.0;
    for (std::size_t l = 0; l < ambient.size(); ++l) {
        if (ambient[l] == 0 || intrinsic[l] == 0) throw std::invalid_argument("dimension_reduction_factor: dims must be positive");
        log_sum += std::log(static_cast<double>(ambient[l]) / static_cast<double>(intrinsic[l]));
    }
    return std::exp(log_sum / static_cast<double>(ambient.size()));
}

}  // namespace lrtsd
