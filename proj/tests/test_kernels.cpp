#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hardy/kernels.hpp"
#include "hardy/rng.hpp"

using namespace hardy;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

bool close_rel(double a, double b, double tol = 1e-13) {
    double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= tol * scale;
}

} // namespace

TEST_CASE("scalar and avx2 variants agree on random inputs") {
    const auto* simd = kernels::avx2_ops();
    if (!simd) return; // nothing to compare on this machine
    const auto& ref = kernels::scalar_ops();
    Rng rng(20240817);
    for (std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{4}, std::size_t{17},
                          std::size_t{64}, std::size_t{257}, std::size_t{1024}}) {
        auto a = random_vec(rng, n);
        auto b = random_vec(rng, n);
        auto w = random_vec(rng, n, 0.1, 2.0);
        CHECK(close_rel(ref.dot(a.data(), b.data(), n), simd->dot(a.data(), b.data(), n)));
        CHECK(close_rel(ref.weighted_dot(a.data(), b.data(), w.data(), n),
                        simd->weighted_dot(a.data(), b.data(), w.data(), n)));
        CHECK(close_rel(ref.sum(a.data(), n), simd->sum(a.data(), n)));
        CHECK(close_rel(ref.sum_sq(a.data(), n), simd->sum_sq(a.data(), n)));
        CHECK(ref.max_abs(a.data(), n) == simd->max_abs(a.data(), n));
        CHECK(ref.max_abs_diff(a.data(), b.data(), n) == simd->max_abs_diff(a.data(), b.data(), n));

        for (double s : {1.0, 2.0, 0.5, 1.7}) {
            auto pos = random_vec(rng, n, 0.0, 3.0);
            CHECK(close_rel(ref.pow_sum(pos.data(), s, n), simd->pow_sum(pos.data(), s, n)));
        }

        auto y1 = b, y2 = b;
        ref.axpy(0.7, a.data(), y1.data(), n);
        simd->axpy(0.7, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close_rel(y1[i], y2[i]));

        auto s1 = a, s2 = a;
        ref.scale(-1.3, s1.data(), n);
        simd->scale(-1.3, s2.data(), n);
        CHECK(s1 == s2);

        auto c1 = a, c2 = a;
        ref.add_const(0.25, c1.data(), n);
        simd->add_const(0.25, c2.data(), n);
        CHECK(c1 == c2);
    }
}

TEST_CASE("matvec and matmul match a plain reference") {
    Rng rng(7);
    const auto& k = kernels::ops();
    struct Shape { std::size_t m, k, n; };
    for (auto [m, kk, n] : {Shape{3, 5, 4}, Shape{16, 16, 16}, Shape{31, 7, 17}, Shape{49, 225, 13}}) {
        auto A = random_vec(rng, m * kk);
        auto B = random_vec(rng, kk * n);
        auto x = random_vec(rng, kk);

        std::vector<double> y(m), yref(m, 0.0);
        k.matvec(A.data(), x.data(), y.data(), m, kk);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < kk; ++j) yref[i] += A[i * kk + j] * x[j];
        for (std::size_t i = 0; i < m; ++i) CHECK(close_rel(y[i], yref[i]));

        std::vector<double> C(m * n), Cref(m * n, 0.0);
        k.matmul(A.data(), B.data(), C.data(), m, kk, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t l = 0; l < kk; ++l)
                for (std::size_t j = 0; j < n; ++j)
                    Cref[i * n + j] += A[i * kk + l] * B[l * n + j];
        for (std::size_t i = 0; i < m * n; ++i) CHECK(close_rel(C[i], Cref[i]));
    }
}

TEST_CASE("pow_sum fast paths equal the generic pow loop") {
    Rng rng(99);
    const auto& k = kernels::ops();
    auto x = random_vec(rng, 129, 0.0, 4.0);
    double g1 = 0.0, g2 = 0.0, g05 = 0.0;
    for (double v : x) {
        g1 += std::pow(v, 1.0);
        g2 += std::pow(v, 2.0);
        g05 += std::pow(v, 0.5);
    }
    CHECK(close_rel(k.pow_sum(x.data(), 1.0, x.size()), g1, 1e-12));
    CHECK(close_rel(k.pow_sum(x.data(), 2.0, x.size()), g2, 1e-12));
    CHECK(close_rel(k.pow_sum(x.data(), 0.5, x.size()), g05, 1e-12));
}
