#include "mixbound/linalg.hpp"

#include <cmath>
#include <utility>

#include "mixbound/simd/kernels.hpp"

namespace mixbound {

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    // ikj order: each output row accumulates scaled rows of b.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ci = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik != 0.0) simd::axpy(aik, b.row(k), ci);
        }
    }
    return c;
}

Matrix matpow(const Matrix& a, std::uint64_t t) {
    if (a.rows() != a.cols()) throw std::invalid_argument("matpow: matrix not square");
    Matrix result = Matrix::identity(a.rows());
    Matrix base = a;
    while (t > 0) {
        if (t & 1) result = matmul(result, base);
        t >>= 1;
        if (t > 0) base = matmul(base, base);
    }
    return result;
}

void matvec(const Matrix& m, std::span<const double> x, std::span<double> y) {
    if (x.size() != m.cols() || y.size() != m.rows())
        throw std::invalid_argument("matvec: size mismatch");
    for (std::size_t i = 0; i < m.rows(); ++i) y[i] = simd::dot(m.row(i), x);
}

void vecmat(std::span<const double> x, const Matrix& m, std::span<double> y) {
    if (x.size() != m.rows() || y.size() != m.cols())
        throw std::invalid_argument("vecmat: size mismatch");
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (x[i] != 0.0) simd::axpy(x[i], m.row(i), y);
    }
}

std::vector<double> lu_solve(Matrix a, std::vector<double> b, double rel_tol) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw std::invalid_argument("lu_solve: size mismatch");

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, simd::max_abs(a.row(i)));
    if (scale == 0.0) throw SingularMatrixError("lu_solve: zero matrix");
    const double pivot_floor = rel_tol * scale;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::fabs(a(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::fabs(a(r, col));
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best < pivot_floor) throw SingularMatrixError("lu_solve: matrix singular to tolerance");
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
            std::swap(b[col], b[pivot]);
        }
        const double inv_pivot = 1.0 / a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = a(r, col) * inv_pivot;
            if (factor == 0.0) continue;
            a(r, col) = 0.0;
            for (std::size_t j = col + 1; j < n; ++j) a(r, j) -= factor * a(col, j);
            b[r] -= factor * b[col];
        }
    }

    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= a(i, j) * x[j];
        x[i] = acc / a(i, i);
    }
    return x;
}

}  // namespace mixbound
