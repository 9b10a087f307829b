#pragma once

#include <stdexcept>

#include "lrtsd/tensor.hpp"

namespace lrtsd {

/// Raised when a dense kernel cannot produce a result: non-convergence,
/// loss of definiteness, rank deficiency or non-finite values.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SvdThin {
    Matrix u;   // m x r
    Vector s;   // r, descending
    Matrix vt;  // r x n
};

struct SymEig {
    Vector values;   // ascending
    Matrix vectors;  // columns orthonormal
};

SvdThin svd_thin(const Matrix& a);

/// Solves a x = b for symmetric positive-definite a via Cholesky.
Matrix solve_spd(const Matrix& a, const Matrix& b);

SymEig sym_eig(const Matrix& a);

/// Orthonormal basis for the column span of a (m >= n, full column rank).
Matrix qr_orthonormalize(const Matrix& a);

}  // namespace lrtsd
