#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace lrtsd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

using Dims3 = std::array<std::size_t, 3>;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Dense order-3 tensor of doubles.
///
/// Storage is column-major with mode 1 fastest: entry (i, j, k) lives at
/// i + n1 * (j + n2 * k). With this layout the mode-1 unfolding is the raw
/// buffer viewed as an n1 x (n2 n3) matrix and the mode-3 unfolding is the
/// transpose of the buffer viewed as (n1 n2) x n3.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(Dims3 dims, double fill = 0.0);
    Tensor3(std::size_t n1, std::size_t n2, std::size_t n3, double fill = 0.0)
        : Tensor3(Dims3{n1, n2, n3}, fill) {}
    Tensor3(Dims3 dims, std::vector<double> data);

    const Dims3& dims() const noexcept { return dims_; }
    std::size_t dim(int mode) const;
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j, std::size_t k) noexcept {
        return data_[i + dims_[0] * (j + dims_[1] * k)];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return data_[i + dims_[0] * (j + dims_[1] * k)];
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    /// Zero-copy view of the mode-1 unfolding (n1 x n2*n3).
    Eigen::Map<Matrix> mode1_view();
    Eigen::Map<const Matrix> mode1_view() const;

    Tensor3& operator+=(const Tensor3& other);
    Tensor3& operator-=(const Tensor3& other);
    Tensor3& operator*=(double s);

    friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
    friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
    friend Tensor3 operator*(Tensor3 a, double s) { return a *= s; }

    friend bool operator==(const Tensor3&, const Tensor3&) = default;

private:
    Dims3 dims_{0, 0, 0};
    std::vector<double> data_;
};

/// Mode-m unfolding, m in {1,2,3}. Columns enumerate the two remaining modes
/// with the lower-numbered one varying fastest.
Matrix unfold(const Tensor3& t, int mode);

/// Inverse of unfold.
Tensor3 fold(const Matrix& m, int mode, const Dims3& dims);

/// t x_mode v: contracts mode `mode` of t against the columns of v.
Tensor3 mode_product(const Tensor3& t, const Matrix& v, int mode);

/// t x_mode v^T without forming the transpose.
Tensor3 mode_product_transposed(const Tensor3& t, const Matrix& v, int mode);

/// core x2 u2 x3 u3 (partial Tucker reconstruction on modes 2 and 3).
Tensor3 tucker_expand(const Tensor3& core, const Matrix& u2, const Matrix& u3);

/// t x2 u2^T x3 u3^T.
Tensor3 tucker_project(const Tensor3& t, const Matrix& u2, const Matrix& u3);

Matrix kronecker(const Matrix& a, const Matrix& b);

double frobenius_norm_sq(const Tensor3& t);
double frobenius_norm_sq(const Matrix& m);
double l1_norm(const Tensor3& t);

namespace reference {

// Serial loop versions of the kernels above, written directly from the
// index definitions. Kept for tests and the kernel benchmark.

Matrix unfold(const Tensor3& t, int mode);
Tensor3 mode_product(const Tensor3& t, const Matrix& v, int mode);
Matrix kronecker(const Matrix& a, const Matrix& b);

}  // namespace reference

}  // namespace lrtsd
