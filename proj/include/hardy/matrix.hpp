#pragma once

#include <cstddef>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/kernels.hpp"

namespace hardy {

/// Dense row-major matrix over double, backed by the kernel layer for the
/// hot products. Decompositions live in the modules that need them.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }
    double* row(std::size_t i) { return a_.data() + i * cols_; }
    const double* row(std::size_t i) const { return a_.data() + i * cols_; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    std::vector<double> apply(const std::vector<double>& x) const {
        if (x.size() != cols_) throw Error(ErrorKind::dimension_mismatch, "matvec size mismatch");
        std::vector<double> y(rows_);
        kernels::ops().matvec(a_.data(), x.data(), y.data(), rows_, cols_);
        return y;
    }

    friend Matrix operator*(const Matrix& A, const Matrix& B) {
        if (A.cols_ != B.rows_) throw Error(ErrorKind::dimension_mismatch, "matmul shape mismatch");
        Matrix C(A.rows_, B.cols_);
        kernels::ops().matmul(A.data(), B.data(), C.data(), A.rows_, A.cols_, B.cols_);
        return C;
    }

    Matrix& operator*=(double c) {
        kernels::ops().scale(c, a_.data(), a_.size());
        return *this;
    }

    friend Matrix operator-(const Matrix& A, const Matrix& B) {
        if (A.rows_ != B.rows_ || A.cols_ != B.cols_)
            throw Error(ErrorKind::dimension_mismatch, "matrix subtraction shape mismatch");
        Matrix C = A;
        kernels::ops().axpy(-1.0, B.data(), C.data(), C.a_.size());
        return C;
    }

    double max_abs() const { return kernels::ops().max_abs(a_.data(), a_.size()); }

    double max_abs_diff(const Matrix& other) const {
        if (rows_ != other.rows_ || cols_ != other.cols_)
            throw Error(ErrorKind::dimension_mismatch, "matrix comparison shape mismatch");
        return kernels::ops().max_abs_diff(a_.data(), other.data(), a_.size());
    }

    const std::vector<double>& values() const { return a_; }
    std::vector<double>& values() { return a_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

} // namespace hardy
