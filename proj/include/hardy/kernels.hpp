#pragma once

#include <cstddef>

namespace hardy::kernels {

/// Data-parallel inner loops used by the norm evaluation and the dense
/// operator algebra. Every entry has a scalar reference implementation and an
/// AVX2 variant; the active table is picked once at startup (overridable via
/// HARDY_FACTOR_KERNEL=scalar|avx2). Variants are equivalence-tested against
/// each other; SIMD reductions may reassociate, so agreement is to relative
/// 1e-13, not bit-exact.
struct Ops {
    double (*dot)(const double* a, const double* b, std::size_t n);
    /// Sum of a[i]*b[i]*w[i] (the weighted Haar pairing).
    double (*weighted_dot)(const double* a, const double* b, const double* w, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    double (*sum_sq)(const double* x, std::size_t n);
    /// y[i] += a*x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    void (*scale)(double a, double* x, std::size_t n);
    /// x[i] += c over a contiguous span (square-function accumulation).
    void (*add_const)(double c, double* x, std::size_t n);
    /// Sum of x[i]^s for x[i] >= 0. Fast paths: s = 1, 2, 0.5; otherwise a
    /// scalar std::pow loop shared by all variants.
    double (*pow_sum)(const double* x, double s, std::size_t n);
    /// y = A x, row-major A (rows x cols).
    void (*matvec)(const double* A, const double* x, double* y, std::size_t rows, std::size_t cols);
    /// C = A * B, row-major, C is m x n, A is m x k, B is k x n. C overwritten.
    void (*matmul)(const double* A, const double* B, double* C, std::size_t m, std::size_t k,
                   std::size_t n);
    double (*max_abs)(const double* x, std::size_t n);
    double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
};

/// Runtime-selected table.
const Ops& ops();
/// Scalar reference table (always available; the equivalence baseline).
const Ops& scalar_ops();
/// AVX2 table, or nullptr when the CPU lacks AVX2/FMA.
const Ops* avx2_ops();
/// Name of the active table ("scalar" or "avx2").
const char* active_name();

} // namespace hardy::kernels
