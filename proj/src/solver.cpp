#include "lrtsd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace lrtsd {

namespace {

double objective_with_recon(const Tensor3& x, const Tensor3& anomaly, const Tensor3& recon, const Tensor3& core,
                            const Matrix& z, const Hyperparams& h) {
    const auto c1 = core.mode1_view();
    const double ridge = 0.5 * z.squaredNorm();
    const double self_expr = 0.5 * h.lambda_z * (c1 - z * c1).squaredNorm();
    const double sparsity = h.lambda_a * l1_norm(anomaly);

    const auto xd = x.data();
    const auto ad = anomaly.data();
    const auto rd = recon.data();
    double fit_err = 0.0;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(xd.size());
#pragma omp parallel for reduction(+ : fit_err) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double e = xd[u] - ad[u] - rd[u];
        fit_err += e * e;
    }
    return ridge + self_expr + sparsity + 0.5 * h.lambda_e * fit_err;
}

void check_shapes(const Tensor3& x, const FitState& s) {
    const auto& d = x.dims();
    const auto& cd = s.model.core.dims();
    if (s.anomaly.dims() != d || cd[0] != d[0] || static_cast<std::size_t>(s.model.u2.rows()) != d[1] ||
        static_cast<std::size_t>(s.model.u3.rows()) != d[2] || static_cast<std::size_t>(s.model.u2.cols()) != cd[1] ||
        static_cast<std::size_t>(s.model.u3.cols()) != cd[2] || static_cast<std::size_t>(s.z.rows()) != d[0] ||
        static_cast<std::size_t>(s.z.cols()) != d[0]) {
        throw DimensionError("objective: fit state shapes are inconsistent with the data tensor");
    }
}

Matrix leading_left_vectors(const Matrix& a, std::size_t count) {
    // Left singular vectors of a wide matrix come from the small Gram matrix.
    if (a.cols() > 4 * a.rows()) {
        const Matrix gram = a * a.transpose();
        const SymEig eig = sym_eig(0.5 * (gram + gram.transpose()));
        const auto n = static_cast<Eigen::Index>(count);
        return eig.vectors.rightCols(n).rowwise().reverse();
    }
    return svd_thin(a).u.leftCols(static_cast<Eigen::Index>(count));
}

}  // namespace

void Hyperparams::validate(const Dims3& data_dims) const {
    if (!(lambda_z > 0.0) || !(lambda_a > 0.0) || !(lambda_e > 0.0)) {
        throw std::invalid_argument("hyperparameters: all lambda values must be positive");
    }
    if (p2 < 1 || p2 > data_dims[1]) {
        throw std::invalid_argument("hyperparameters: rank p2 = " + std::to_string(p2) + " outside [1, " +
                                    std::to_string(data_dims[1]) + "]");
    }
    if (p3 < 1 || p3 > data_dims[2]) {
        throw std::invalid_argument("hyperparameters: rank p3 = " + std::to_string(p3) + " outside [1, " +
                                    std::to_string(data_dims[2]) + "]");
    }
    if (max_sweeps < 1) throw std::invalid_argument("hyperparameters: max_sweeps must be positive");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("hyperparameters: rel_tol must be positive");
}

double objective(const Tensor3& x, const FitState& s, const Hyperparams& h) {
    check_shapes(x, s);
    return objective_with_recon(x, s.anomaly, s.model.reconstruct(), s.model.core, s.z, h);
}

FitState init(const Tensor3& x, const Hyperparams& h) {
    h.validate(x.dims());
    FitState s;
    const auto n = x.dims()[0];
    s.anomaly = Tensor3(x.dims());
    s.z = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    s.model.u2 = leading_left_vectors(unfold(x, 2), h.p2);
    s.model.u3 = leading_left_vectors(unfold(x, 3), h.p3);
    s.model.core = tucker_project(x, s.model.u2, s.model.u3);
    return s;
}

Matrix update_z(const Tensor3& core, const Hyperparams& h) {
    const auto c1 = core.mode1_view();
    const Matrix gram = c1 * c1.transpose();
    Matrix lhs = h.lambda_z * gram;
    lhs.diagonal().array() += 1.0;
    return h.lambda_z * solve_spd(lhs, gram);
}

Tensor3 soft_threshold(const Tensor3& r, double t) {
    Tensor3 out(r.dims());
    const auto src = r.data();
    auto dst = out.data();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(src.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double mag = std::abs(src[u]) - t;
        dst[u] = mag > 0.0 ? std::copysign(mag, src[u]) : 0.0;
    }
    return out;
}

Tensor3 update_anomaly(const Tensor3& x, const FactorModel& model, const Hyperparams& h) {
    if (!h.anomaly_enabled) return Tensor3(x.dims());
    return soft_threshold(x - model.reconstruct(), h.threshold());
}

Tensor3 update_core(const Tensor3& target, const Matrix& z, const Matrix& u2, const Matrix& u3,
                    const Hyperparams& h) {
    const auto n = static_cast<Eigen::Index>(target.dims()[0]);
    if (z.rows() != n || z.cols() != n) throw DimensionError("update_core: Z must be N x N");
    // M P^T is the mode-1 unfolding of target x2 U2^T x3 U3^T.
    Tensor3 projected = tucker_project(target, u2, u3);
    const Matrix resid = Matrix::Identity(n, n) - z;
    Matrix lhs = h.lambda_z * (resid.transpose() * resid);
    lhs.diagonal().array() += h.lambda_e;
    const Matrix c1 = h.lambda_e * solve_spd(lhs, projected.mode1_view());
    projected.mode1_view() = c1;
    return projected;
}

Tensor3 update_core(const Tensor3& x, const Tensor3& a, const Matrix& z, const Matrix& u2, const Matrix& u3,
                    const Hyperparams& h) {
    return update_core(x - a, z, u2, u3, h);
}

Matrix procrustes_cross(const Tensor3& target, const Tensor3& core, const Matrix& other_u, int mode) {
    if (mode != 2 && mode != 3) throw DimensionError("update_factor: mode must be 2 or 3");
    // Contract the other non-clustering mode first so (U kron I) is never formed.
    const int other = mode == 2 ? 3 : 2;
    const Tensor3 partial = mode_product_transposed(target, other_u, other);
    if (partial.dims()[0] != core.dims()[0] || partial.dim(other) != core.dim(other)) {
        throw DimensionError("update_factor: core and factor shapes disagree");
    }
    return unfold(partial, mode) * unfold(core, mode).transpose();
}

Matrix polar_factor(const Matrix& q) {
    const SvdThin svd = svd_thin(q);
    return svd.u * svd.vt;
}

Matrix update_factor(const Tensor3& target, const Tensor3& core, const Matrix& other_u, int mode) {
    return polar_factor(procrustes_cross(target, core, other_u, mode));
}

Matrix update_factor(const Tensor3& x, const Tensor3& a, const Tensor3& core, const Matrix& other_u, int mode) {
    return update_factor(x - a, core, other_u, mode);
}

FitState fit(const Tensor3& x, const Hyperparams& h) { return fit(x, h, init(x, h)); }

FitState fit(const Tensor3& x, const Hyperparams& h, FitState s) {
    h.validate(x.dims());
    check_shapes(x, s);
    if (!h.anomaly_enabled) s.anomaly = Tensor3(x.dims());

    Tensor3 recon = s.model.reconstruct();
    s.objective_trace.clear();
    s.objective_trace.push_back(objective_with_recon(x, s.anomaly, recon, s.model.core, s.z, h));
    s.sweeps_run = 0;
    s.converged = false;

    for (std::size_t sweep = 0; sweep < h.max_sweeps; ++sweep) {
        s.z = update_z(s.model.core, h);
        if (h.anomaly_enabled) s.anomaly = soft_threshold(x - recon, h.threshold());
        const Tensor3 target = h.anomaly_enabled ? x - s.anomaly : x;
        s.model.core = update_core(target, s.z, s.model.u2, s.model.u3, h);
        s.model.u2 = update_factor(target, s.model.core, s.model.u3, 2);
        s.model.u3 = update_factor(target, s.model.core, s.model.u2, 3);

        recon = s.model.reconstruct();
        const double obj = objective_with_recon(x, s.anomaly, recon, s.model.core, s.z, h);
        ++s.sweeps_run;
        if (!std::isfinite(obj)) {
            std::ostringstream msg;
            msg << "fit: objective became non-finite at sweep " << s.sweeps_run << " (lambda_z=" << h.lambda_z
                << ", lambda_a=" << h.lambda_a << ", lambda_e=" << h.lambda_e << ")";
            throw NumericalError(msg.str());
        }
        const double prev = s.objective_trace.back();
        s.objective_trace.push_back(obj);
        const double scale = std::max(std::abs(prev), std::numeric_limits<double>::min());
        if ((prev - obj) / scale < h.rel_tol) {
            s.converged = true;
            break;
        }
    }
    return s;
}

Matrix ridge_self_expression(const Matrix& samples, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("ridge_self_expression: lambda must be positive");
    const Matrix gram = samples * samples.transpose();
    Matrix lhs = gram;
    lhs.diagonal().array() += lambda;
    return solve_spd(lhs, gram);
}

}  // namespace lrtsd
