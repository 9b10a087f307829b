#include "lrtsd/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace lrtsd {

namespace {

void require_finite(const Matrix& a, const char* what) {
    if (!a.allFinite()) throw NumericalError(std::string(what) + ": input has non-finite entries");
}

}  // namespace

SvdThin svd_thin(const Matrix& a) {
    require_finite(a, "svd_thin");
    if (a.size() == 0) return {Matrix(a.rows(), 0), Vector(0), Matrix(0, a.cols())};
    // BDCSVD hands small blocks to one-sided Jacobi internally.
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw NumericalError("svd_thin: decomposition did not converge");
    return {svd.matrixU(), svd.singularValues(), svd.matrixV().transpose()};
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols()) throw DimensionError("solve_spd: matrix is not square");
    if (a.rows() != b.rows()) throw DimensionError("solve_spd: right-hand side has wrong row count");
    require_finite(a, "solve_spd");
    require_finite(b, "solve_spd");
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) throw NumericalError("solve_spd: matrix is not positive definite");
    Matrix x = llt.solve(b);
    if (!x.allFinite()) throw NumericalError("solve_spd: solution is not finite");
    return x;
}

SymEig sym_eig(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("sym_eig: matrix is not square");
    require_finite(a, "sym_eig");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw NumericalError("sym_eig: matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success) throw NumericalError("sym_eig: decomposition did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

Matrix qr_orthonormalize(const Matrix& a) {
    if (a.rows() < a.cols()) throw DimensionError("qr_orthonormalize: need rows >= cols");
    require_finite(a, "qr_orthonormalize");
    Eigen::HouseholderQR<Matrix> qr(a);
    const Matrix r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
    const double rmax = r.diagonal().cwiseAbs().maxCoeff();
    const double tol = 1e-12 * std::max(1.0, rmax) * static_cast<double>(a.rows());
    if (a.cols() > 0 && (r.diagonal().cwiseAbs().array() <= tol).any()) {
        throw NumericalError("qr_orthonormalize: input is rank deficient");
    }
    return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

}  // namespace lrtsd
