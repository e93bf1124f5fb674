// AVX2/FMA variants of the arithmetic kernels. This translation unit is the
// only one compiled with -mavx2 -mfma; dispatch.cpp checks cpu support before
// handing out the table.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "hardy/kernels.hpp"

namespace hardy::kernels {

namespace avx2 {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double weighted_dot(const double* a, const double* b, const double* w, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(ab, _mm256_loadu_pd(w + i), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i] * w[i];
    return s;
}

double sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

double sum_sq(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yv = _mm256_loadu_pd(y + i);
        yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
        _mm256_storeu_pd(y + i, yv);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* x, std::size_t n) {
    __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void add_const(double c, double* x, std::size_t n) {
    __m256d cv = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_add_pd(cv, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] += c;
}

double pow_sum(const double* x, double s, std::size_t n) {
    if (s == 1.0) return sum(x, n);
    if (s == 2.0) return sum_sq(x, n);
    if (s == 0.5) {
        __m256d acc = _mm256_setzero_pd();
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_sqrt_pd(_mm256_loadu_pd(x + i)));
        double r = hsum(acc);
        for (; i < n; ++i) r += std::sqrt(x[i]);
        return r;
    }
    // General exponents go through libm; same loop as the scalar table.
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::pow(x[i], s);
    return acc;
}

void matvec(const double* A, const double* x, double* y, std::size_t rows, std::size_t cols) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = A + i * cols;
        __m256d acc = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 4 <= cols; j += 4)
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(x + j), acc);
        double s = hsum(acc);
        for (; j < cols; ++j) s += row[j] * x[j];
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
            __m256d av = _mm256_set1_pd(a);
            std::size_t j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d cv = _mm256_loadu_pd(crow + j);
                cv = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + j), cv);
                _mm256_storeu_pd(crow + j, cv);
            }
            for (; j < n; ++j) crow[j] += a * brow[j];
        }
    }
}

double max_abs(const double* x, std::size_t n) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffll));
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_max_pd(acc, _mm256_and_pd(mask, _mm256_loadu_pd(x + i)));
    double m = hmax(acc);
    for (; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffll));
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_max_pd(acc, _mm256_and_pd(mask, d));
    }
    double m = hmax(acc);
    for (; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

} // namespace avx2

const Ops* avx2_table_internal() {
    static const Ops table = {
        avx2::dot,     avx2::weighted_dot, avx2::sum,       avx2::sum_sq,
        avx2::axpy,    avx2::scale,        avx2::add_const, avx2::pow_sum,
        avx2::matvec,  avx2::matmul,       avx2::max_abs,   avx2::max_abs_diff,
    };
    return &table;
}

} // namespace hardy::kernels

#endif // x86_64
