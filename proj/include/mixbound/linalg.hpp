#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace mixbound {

// Dense row-major matrix. Sizes stay in the low hundreds, so everything here
// is plain O(n^2)/O(n^3) arithmetic on contiguous storage.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matpow(const Matrix& a, std::uint64_t t);  // repeated squaring, t = 0 gives I

// y = M x and y = x^T M on row-major storage.
void matvec(const Matrix& m, std::span<const double> x, std::span<double> y);
void vecmat(std::span<const double> x, const Matrix& m, std::span<double> y);

// Solves a x = b by LU with partial pivoting. Throws SingularMatrixError when
// a pivot falls below rel_tol relative to the largest entry of a.
std::vector<double> lu_solve(Matrix a, std::vector<double> b, double rel_tol = 1e-13);

}  // namespace mixbound
