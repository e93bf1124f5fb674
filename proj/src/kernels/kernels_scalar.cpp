#include <algorithm>
#include <cmath>
#include <cstring>

#include "hardy/kernels.hpp"

namespace hardy::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double weighted_dot(const double* a, const double* b, const double* w, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i] * w[i];
    return s;
}

double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double sum_sq(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void add_const(double c, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] += c;
}

double pow_sum(const double* x, double s, std::size_t n) {
    if (s == 1.0) return sum(x, n);
    if (s == 2.0) return sum_sq(x, n);
    double acc = 0.0;
    if (s == 0.5) {
        for (std::size_t i = 0; i < n; ++i) acc += std::sqrt(x[i]);
        return acc;
    }
    for (std::size_t i = 0; i < n; ++i) acc += std::pow(x[i], s);
    return acc;
}

void matvec(const double* A, const double* x, double* y, std::size_t rows, std::size_t cols) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = A + i * cols;
        double s = 0.0;
        for (std::size_t j = 0; j < cols; ++j) s += row[j] * x[j];
        y[i] = s;
    }
}

void matmul(const double* A, const double* B, double* C, std::size_t m, std::size_t k,
            std::size_t n) {
    std::memset(C, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = C + i * n;
        const double* arow = A + i * k;
        for (std::size_t l = 0; l < k; ++l) {
            double a = arow[l];
            if (a == 0.0) continue;
            const double* brow = B + l * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += a * brow[j];
        }
    }
}

double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

} // namespace scalar

const Ops& scalar_ops() {
    static const Ops table = {
        scalar::dot,     scalar::weighted_dot, scalar::sum,    scalar::sum_sq,
        scalar::axpy,    scalar::scale,        scalar::add_const, scalar::pow_sum,
        scalar::matvec,  scalar::matmul,       scalar::max_abs,   scalar::max_abs_diff,
    };
    return table;
}

} // namespace hardy::kernels
