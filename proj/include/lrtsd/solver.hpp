#pragma once

#include <cstddef>
#include <vector>

#include "lrtsd/numerics.hpp"
#include "lrtsd/tensor.hpp"

namespace lrtsd {

/// Penalty weights, target ranks and stopping rule for one fit.
struct Hyperparams {
    double lambda_z = 1.0;  // self-expression residual
    double lambda_a = 1.0;  // L1 weight on the anomaly tensor
    double lambda_e = 1.0;  // reconstruction error
    std::size_t p2 = 1;
    std::size_t p3 = 1;
    std::size_t max_sweeps = 200;
    double rel_tol = 1e-6;
    bool anomaly_enabled = true;

    /// Anomaly soft-threshold level lambda_a / lambda_e.
    double threshold() const { return lambda_a / lambda_e; }

    /// Throws std::invalid_argument if a weight is not positive or a rank
    /// is outside [1, I_l] for the given data dimensions.
    void validate(const Dims3& data_dims) const;
};

/// Low-rank part core x2 u2 x3 u3.
struct FactorModel {
    Tensor3 core;  // N x P2 x P3
    Matrix u2;     // I2 x P2, orthonormal columns
    Matrix u3;     // I3 x P3, orthonormal columns

    Tensor3 reconstruct() const { return tucker_expand(core, u2, u3); }
};

struct FitState {
    FactorModel model;
    Tensor3 anomaly;  // N x I2 x I3
    Matrix z;         // N x N self-expression
    std::vector<double> objective_trace;  // entry 0 is the initial state
    std::size_t sweeps_run = 0;
    bool converged = false;
};

/// 1/2 |Z|^2 + lz/2 |C - C x1 Z|^2 + la |A|_1 + le/2 |X - A - C x2 U2 x3 U3|^2.
double objective(const Tensor3& x, const FitState& s, const Hyperparams& h);

/// A = 0, Z = I, factors from a truncated HOSVD of x on modes 2 and 3.
FitState init(const Tensor3& x, const Hyperparams& h);

/// Z = lz (I + lz C1 C1^T)^{-1} C1 C1^T with C1 the mode-1 unfolding of core.
Matrix update_z(const Tensor3& core, const Hyperparams& h);

/// Entrywise soft-threshold of x - reconstruction at lambda_a / lambda_e.
/// Returns zeros when the anomaly term is disabled.
Tensor3 update_anomaly(const Tensor3& x, const FactorModel& model, const Hyperparams& h);

Tensor3 soft_threshold(const Tensor3& r, double t);

/// Minimizer over the core of lz/2 |C - C x1 Z|^2 + le/2 |X - A - C x2 U2 x3 U3|^2.
/// u2 and u3 must have orthonormal columns.
Tensor3 update_core(const Tensor3& x, const Tensor3& a, const Matrix& z, const Matrix& u2,
                    const Matrix& u3, const Hyperparams& h);

/// Same as update_core with the anomaly-free target x - a precomputed.
Tensor3 update_core(const Tensor3& target, const Matrix& z, const Matrix& u2, const Matrix& u3,
                    const Hyperparams& h);

/// Orthogonal Procrustes step for the factor of `mode` (2 or 3), holding the
/// other factor fixed.
Matrix update_factor(const Tensor3& x, const Tensor3& a, const Tensor3& core, const Matrix& other_u,
                     int mode);

Matrix update_factor(const Tensor3& target, const Tensor3& core, const Matrix& other_u, int mode);

/// The cross-product matrix whose polar factor is the optimal factor update:
/// mode 2: (X - A)_(2) (U3 kron I) C_(2)^T; mode 3: (X - A)_(3) (U2 kron I) C_(3)^T.
Matrix procrustes_cross(const Tensor3& target, const Tensor3& core, const Matrix& other_u, int mode);

/// Orthonormal polar factor U V^T of q = U D V^T.
Matrix polar_factor(const Matrix& q);

/// Block coordinate descent: each sweep updates Z, A, C, U2, U3 in that order.
/// Stops when the relative objective decrease drops below rel_tol or after
/// max_sweeps. Throws NumericalError if the objective becomes non-finite.
FitState fit(const Tensor3& x, const Hyperparams& h);

/// Continues from a given state.
FitState fit(const Tensor3& x, const Hyperparams& h, FitState start);

/// Ridge self-expression directly on the mode-1 unfolding of x, with no
/// dimension reduction: argmin lambda |Z|^2 + |X1 - Z X1|^2.
Matrix ridge_self_expression(const Matrix& samples, double lambda);

}  // namespace lrtsd
