#include "lrtsd/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lrtsd {

namespace {

void check_mode(int mode) {
    if (mode < 1 || mode > 3) {
        throw DimensionError("mode must be 1, 2 or 3, got " + std::to_string(mode));
    }
}

void check_same_dims(const Dims3& a, const Dims3& b) {
    if (a != b) throw DimensionError("tensor dimensions differ");
}

std::size_t product(const Dims3& d) { return d[0] * d[1] * d[2]; }

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Splits [0, n) into contiguous blocks of at least `min_block` items, about
// four per thread.
std::size_t block_count(std::size_t n, std::size_t min_block) {
    const std::size_t want = static_cast<std::size_t>(max_threads()) * 4;
    return std::max<std::size_t>(1, std::min(want, n / std::max<std::size_t>(1, min_block)));
}

// out = t x_mode op, where op is an (m x n_mode) Eigen expression.
template <typename Op>
Tensor3 apply_mode(const Tensor3& t, const Op& op, int mode) {
    check_mode(mode);
    const auto [n1, n2, n3] = t.dims();
    const auto n_mode = t.dim(mode);
    if (static_cast<std::size_t>(op.cols()) != n_mode) {
        throw DimensionError("mode_product: operator has " + std::to_string(op.cols()) +
                             " columns, tensor mode " + std::to_string(mode) + " has size " +
                             std::to_string(n_mode));
    }
    const auto m = static_cast<std::size_t>(op.rows());
    Dims3 out_dims = t.dims();
    out_dims[mode - 1] = m;
    Tensor3 out(out_dims);
    if (out.empty() || t.empty()) return out;

    const double* src = t.data().data();
    double* dst = out.data().data();
    const auto mi = static_cast<Eigen::Index>(m);

    if (mode == 1) {
        const std::size_t cols = n2 * n3;
        Eigen::Map<const Matrix> in(src, static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(cols));
        Eigen::Map<Matrix> res(dst, mi, static_cast<Eigen::Index>(cols));
        const std::size_t blocks = block_count(cols, 64);
        const std::size_t step = (cols + blocks - 1) / blocks;
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
            const std::size_t c0 = static_cast<std::size_t>(b) * step;
            if (c0 >= cols) continue;
            const auto len = static_cast<Eigen::Index>(std::min(step, cols - c0));
            const auto c = static_cast<Eigen::Index>(c0);
            res.middleCols(c, len).noalias() = op * in.middleCols(c, len);
        }
    } else if (mode == 2) {
        const auto r1 = static_cast<Eigen::Index>(n1);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n3); ++k) {
            Eigen::Map<const Matrix> slice(src + static_cast<std::size_t>(k) * n1 * n2, r1,
                                           static_cast<Eigen::Index>(n2));
            Eigen::Map<Matrix> res(dst + static_cast<std::size_t>(k) * n1 * m, r1, mi);
            res.noalias() = slice * op.transpose();
        }
    } else {
        const std::size_t rows = n1 * n2;
        Eigen::Map<const Matrix> in(src, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n3));
        Eigen::Map<Matrix> res(dst, static_cast<Eigen::Index>(rows), mi);
        const std::size_t blocks = block_count(rows, 64);
        const std::size_t step = (rows + blocks - 1) / blocks;
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
            const std::size_t r0 = static_cast<std::size_t>(b) * step;
            if (r0 >= rows) continue;
            const auto len = static_cast<Eigen::Index>(std::min(step, rows - r0));
            const auto r = static_cast<Eigen::Index>(r0);
            res.middleRows(r, len).noalias() = in.middleRows(r, len) * op.transpose();
        }
    }
    return out;
}

}  // namespace

Tensor3::Tensor3(Dims3 dims, double fill) : dims_(dims), data_(product(dims), fill) {}

Tensor3::Tensor3(Dims3 dims, std::vector<double> data) : dims_(dims), data_(std::move(data)) {
    if (data_.size() != product(dims_)) {
        throw DimensionError("Tensor3: data length " + std::to_string(data_.size()) +
                             " does not match dims product " + std::to_string(product(dims_)));
    }
}

std::size_t Tensor3::dim(int mode) const {
    check_mode(mode);
    return dims_[static_cast<std::size_t>(mode - 1)];
}

Eigen::Map<Matrix> Tensor3::mode1_view() {
    return {data_.data(), static_cast<Eigen::Index>(dims_[0]),
            static_cast<Eigen::Index>(dims_[1] * dims_[2])};
}

Eigen::Map<const Matrix> Tensor3::mode1_view() const {
    return {data_.data(), static_cast<Eigen::Index>(dims_[0]),
            static_cast<Eigen::Index>(dims_[1] * dims_[2])};
}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
    check_same_dims(dims_, other.dims_);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(data_.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) data_[static_cast<std::size_t>(i)] += other.data_[static_cast<std::size_t>(i)];
    return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& other) {
    check_same_dims(dims_, other.dims_);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(data_.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) data_[static_cast<std::size_t>(i)] -= other.data_[static_cast<std::size_t>(i)];
    return *this;
}

Tensor3& Tensor3::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Matrix unfold(const Tensor3& t, int mode) {
    check_mode(mode);
    const auto [n1, n2, n3] = t.dims();
    if (mode == 1) return t.mode1_view();
    if (mode == 3) {
        Eigen::Map<const Matrix> flat(t.data().data(), static_cast<Eigen::Index>(n1 * n2),
                                      static_cast<Eigen::Index>(n3));
        return flat.transpose();
    }
    Matrix out(static_cast<Eigen::Index>(n2), static_cast<Eigen::Index>(n1 * n3));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n3); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        Eigen::Map<const Matrix> slice(t.data().data() + kk * n1 * n2, static_cast<Eigen::Index>(n1),
                                       static_cast<Eigen::Index>(n2));
        out.middleCols(static_cast<Eigen::Index>(kk * n1), static_cast<Eigen::Index>(n1)) = slice.transpose();
    }
    return out;
}

Tensor3 fold(const Matrix& m, int mode, const Dims3& dims) {
    check_mode(mode);
    const auto [n1, n2, n3] = dims;
    const std::size_t rows = dims[static_cast<std::size_t>(mode - 1)];
    const std::size_t cols = product(dims) / std::max<std::size_t>(1, rows);
    if (static_cast<std::size_t>(m.rows()) != rows || static_cast<std::size_t>(m.cols()) != cols ||
        static_cast<std::size_t>(m.size()) != product(dims)) {
        throw DimensionError("fold: " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                             " matrix is inconsistent with requested dims for mode " + std::to_string(mode));
    }
    Tensor3 out(dims);
    if (mode == 1) {
        out.mode1_view() = m;
    } else if (mode == 3) {
        Eigen::Map<Matrix> flat(out.data().data(), static_cast<Eigen::Index>(n1 * n2),
                                static_cast<Eigen::Index>(n3));
        flat = m.transpose();
    } else {
        for (std::size_t k = 0; k < n3; ++k) {
            Eigen::Map<Matrix> slice(out.data().data() + k * n1 * n2, static_cast<Eigen::Index>(n1),
                                     static_cast<Eigen::Index>(n2));
            slice = m.middleCols(static_cast<Eigen::Index>(k * n1), static_cast<Eigen::Index>(n1)).transpose();
        }
    }
    return out;
}

Tensor3 mode_product(const Tensor3& t, const Matrix& v, int mode) { return apply_mode(t, v, mode); }

Tensor3 mode_product_transposed(const Tensor3& t, const Matrix& v, int mode) {
    return apply_mode(t, v.transpose(), mode);
}

Tensor3 tucker_expand(const Tensor3& core, const Matrix& u2, const Matrix& u3) {
    return mode_product(mode_product(core, u2, 2), u3, 3);
}

Tensor3 tucker_project(const Tensor3& t, const Matrix& u2, const Matrix& u3) {
    return mode_product_transposed(mode_product_transposed(t, u2, 2), u3, 3);
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
    const Eigen::Index p = b.rows();
    const Eigen::Index q = b.cols();
    Matrix out(a.rows() * p, a.cols() * q);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            out.block(i * p, j * q, p, q) = a(i, j) * b;
        }
    }
    return out;
}

double frobenius_norm_sq(const Tensor3& t) {
    double s = 0.0;
    const auto d = t.data();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(d.size());
#pragma omp parallel for reduction(+ : s) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) s += d[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(i)];
    return s;
}

double frobenius_norm_sq(const Matrix& m) { return m.squaredNorm(); }

double l1_norm(const Tensor3& t) {
    double s = 0.0;
    const auto d = t.data();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(d.size());
#pragma omp parallel for reduction(+ : s) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) s += std::abs(d[static_cast<std::size_t>(i)]);
    return s;
}

namespace reference {

Matrix unfold(const Tensor3& t, int mode) {
    check_mode(mode);
    const auto [n1, n2, n3] = t.dims();
    Matrix out;
    switch (mode) {
        case 1: out.resize(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n2 * n3)); break;
        case 2: out.resize(static_cast<Eigen::Index>(n2), static_cast<Eigen::Index>(n1 * n3)); break;
        default: out.resize(static_cast<Eigen::Index>(n3), static_cast<Eigen::Index>(n1 * n2)); break;
    }
    for (std::size_t k = 0; k < n3; ++k) {
        for (std::size_t j = 0; j < n2; ++j) {
            for (std::size_t i = 0; i < n1; ++i) {
                std::size_t r = 0, c = 0;
                switch (mode) {
                    case 1: r = i; c = j + n2 * k; break;
                    case 2: r = j; c = i + n1 * k; break;
                    default: r = k; c = i + n1 * j; break;
                }
                out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t(i, j, k);
            }
        }
    }
    return out;
}

Tensor3 mode_product(const Tensor3& t, const Matrix& v, int mode) {
    check_mode(mode);
    if (static_cast<std::size_t>(v.cols()) != t.dim(mode)) {
        throw DimensionError("reference::mode_product: dimension mismatch");
    }
    Dims3 od = t.dims();
    od[static_cast<std::size_t>(mode - 1)] = static_cast<std::size_t>(v.rows());
    Tensor3 out(od);
    const auto [n1, n2, n3] = t.dims();
    for (std::size_t k = 0; k < od[2]; ++k) {
        for (std::size_t j = 0; j < od[1]; ++j) {
            for (std::size_t i = 0; i < od[0]; ++i) {
                double s = 0.0;
                if (mode == 1) {
                    for (std::size_t q = 0; q < n1; ++q) s += t(q, j, k) * v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q));
                } else if (mode == 2) {
                    for (std::size_t q = 0; q < n2; ++q) s += t(i, q, k) * v(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(q));
                } else {
                    for (std::size_t q = 0; q < n3; ++q) s += t(i, j, q) * v(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(q));
                }
                out(i, j, k) = s;
            }
        }
    }
    return out;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            for (Eigen::Index r = 0; r < b.rows(); ++r)
                for (Eigen::Index s = 0; s < b.cols(); ++s)
                    out(i * b.rows() + r, j * b.cols() + s) = a(i, j) * b(r, s);
    return out;
}

}  // namespace reference

}  // namespace lrtsd
