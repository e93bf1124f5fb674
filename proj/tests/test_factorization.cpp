#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "hardy/factorization.hpp"
#include "hardy/rng.hpp"

using namespace hardy;

namespace {

FactorizationParams practical(int n, double delta, double gamma, double eta, int N, int m0,
                              double eta0) {
    FactorizationParams p;
    p.n = n;
    p.delta = delta;
    p.gamma = gamma;
    p.eta = eta;
    p.mode = FactorizationMode::practical;
    p.N = N;
    p.m0 = m0;
    p.eta0 = eta0;
    return p;
}

SignAssignment random_signs(Rng& rng, int N) {
    SignAssignment s(N);
    for (auto& v : s.values) v = static_cast<std::int8_t>(rng.sign());
    return s;
}

} // namespace

TEST_CASE("dimension constants") {
    auto c = constants(0, 1.0, 1.0, 1.0);
    CHECK(c.N == 127);
    CHECK(c.m0 == 93);
    CHECK(c.eta0 == std::ldexp(1.0, -17));

    // linear slope 41 in n
    long long prev = c.N;
    for (int n = 1; n <= 5; ++n) {
        auto cn = constants(n, 1.0, 1.0, 1.0);
        CHECK(cn.N - prev == 41);
        prev = cn.N;
    }

    // the log terms enter with weight 4 and floor
    auto c2 = constants(1, 1.0, 2.0, 1.0);
    CHECK(c2.N == 41 * 4 + 4 + 4);

    // huge n must not overflow through the log-space m0
    auto big = constants(200, 0.5, 2.0, 0.25);
    CHECK(big.m0 > 0);
    CHECK(big.N == 41 * 203 + static_cast<long long>(
                                  std::floor(4 * std::log2(4.0) + 4 * std::log2(5.0))));

    CHECK_THROWS_AS(constants(0, 0.0, 1.0, 1.0), Error);
    CHECK_THROWS_AS(constants(0, 1.0, 0.5, 1.0), Error);
}

TEST_CASE("almost inverse on the identity is the projection") {
    Rng rng(21);
    auto [xfam, yfam] = gamlen_gaudet(1, 1, 3);
    auto sys = build_system(xfam, yfam, random_signs(rng, 3), random_signs(rng, 3));
    auto T = identity_operator(3);
    auto U = build_U(T, sys);
    auto P = projection_P(sys);
    CHECK(U.full.gram.max_abs_diff(P.gram) <= 1e-14);
    for (std::size_t r = 0; r < U.tau.size(); ++r)
        CHECK(U.tau[r] == measure(enumerate_basis(1).order[r]));

    auto half = scaled(T, 0.5);
    auto U2 = build_U(half, sys);
    auto scaled_p = P;
    scaled_p.gram *= 2.0;
    CHECK(U2.full.gram.max_abs_diff(scaled_p.gram) <= 1e-13);
}

TEST_CASE("inversion on the range for near-diagonal operators") {
    Rng rng(22);
    auto [xfam, yfam] = gamlen_gaudet(1, 1, 3);
    auto sys = build_system(xfam, yfam, random_signs(rng, 3), random_signs(rng, 3));

    auto T = scaled(identity_operator(3), 0.5);
    auto U = build_U(T, sys);
    auto S = build_S(T, sys, U);
    // U T I = Id exactly for scalar operators; S equals U in block coordinates.
    CHECK(S.uti.max_abs_diff(Matrix::identity(S.uti.rows())) <= 1e-14);
    CHECK(S.condition == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(S.coords.max_abs_diff(U.block_coords) <= 1e-13);
    CHECK(S.neumann_checked);
    CHECK(S.neumann_error <= 1e-10);

    // a perturbed diagonal keeps the inverse consistent with the geometric bound
    auto noisy = generate_test_operator(3, 0.5, 1.0, ExponentPair(2, 2),
                                        OperatorStructure::diagonal_plus_noise, 5);
    auto Un = build_U(noisy, sys);
    auto Sn = build_S(noisy, sys, Un);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> uti(
        Sn.uti.rows(), Sn.uti.cols());
    for (std::size_t i = 0; i < Sn.uti.rows(); ++i)
        for (std::size_t j = 0; j < Sn.uti.cols(); ++j) uti(i, j) = Sn.uti(i, j);
    auto K = Eigen::MatrixXd::Identity(uti.rows(), uti.cols()) - uti;
    double ratio = K.operatorNorm();
    if (ratio < 1.0) {
        CHECK(Sn.neumann_checked);
        CHECK(Sn.neumann_error <= 1e-10);
        double inv_norm = uti.inverse().operatorNorm();
        CHECK(inv_norm <= 1.0 / (1.0 - ratio) * (1 + 1e-10));
    }
}

TEST_CASE("the almost-inverse error has controlled block coefficients") {
    // With accepted signs, U T b_R = b_R + sum_{R' != R} e_{R'} b_{R'} where
    // every |e_{R'}| is at most the off-diagonal ceiling over the smallest
    // block diagonal.
    auto T = generate_test_operator(3, 0.5, 1.0, ExponentPair(2, 2),
                                    OperatorStructure::diagonal_plus_noise, 515);
    auto [xfam, yfam] = gamlen_gaudet(1, 1, 3);
    double eta0 = 0.05;
    auto search = search_signs(T, xfam, yfam, eta0, 10000, 515);
    REQUIRE(search.accepted);
    auto sys = build_system(xfam, yfam, search.theta, search.eps);
    auto U = build_U(T, sys);
    double min_tau = std::fabs(U.tau[0]);
    for (double t : U.tau) min_tau = std::min(min_tau, std::fabs(t));
    double ceiling = std::max(search.max_offdiag, search.max_diag_deviation) / min_tau;

    for (std::size_t r = 0; r < sys.elements.size(); ++r) {
        auto utb = U.block_coords.apply(apply(T, sys.elements[r]).coefficients);
        for (std::size_t rp = 0; rp < utb.size(); ++rp) {
            if (rp == r) continue;
            CHECK(std::fabs(utb[rp]) <= search.max_offdiag / min_tau + 1e-15);
            CHECK(std::fabs(utb[rp]) <= ceiling + 1e-15);
        }
        // the diagonal coefficient is exactly 1 by construction of U
        CHECK(std::fabs(utb[r] - 1.0) <= 1e-12);
    }
}

TEST_CASE("degenerate block diagonals are rejected") {
    Rng rng(23);
    auto [xfam, yfam] = gamlen_gaudet(1, 1, 2);
    auto sys = build_system(xfam, yfam, SignAssignment(2), SignAssignment(2));
    auto T = identity_operator(2);
    // zero out the diagonal on the root block's support
    auto e2 = enumerate_basis(2);
    for (const auto& K : xfam.collection(DyadicInterval(0, 0)))
        for (const auto& L : yfam.collection(DyadicInterval(0, 0))) {
            auto q = e2.index_of({K, L});
            T.gram(q, q) = 0.0;
        }
    CHECK_THROWS_AS(build_U(T, sys), Error);
}

TEST_CASE("scaled identity factorization collapses exactly") {
    auto T = scaled(identity_operator(2), 0.5);
    auto art = factorize(T, practical(1, 0.5, 1.0, 1.0, 2, 1, 0.05), 31);
    CHECK(art.residual <= 1e-12);
    CHECK(art.search.accepted);
    CHECK(art.search.attempts == 1);

    auto rep = verify_diagram(art, T, ExponentPair(2, 2), 16, 31);
    REQUIRE(rep.exact_product_p2q2.has_value());
    CHECK(*rep.exact_product_p2q2 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rep.product_within_bound); // 2 <= (1+eta)/delta = 4
    CHECK(rep.residual <= 1e-12);

    // (1+eta)/delta >= 1/delta for every eta > 0
    for (double eta : {0.1, 1.0, 10.0})
        CHECK(*rep.exact_product_p2q2 <= (1.0 + eta) / 0.5 + 1e-12);
}

TEST_CASE("identity factorization has unit norm product") {
    auto T = identity_operator(2);
    auto art = factorize(T, practical(1, 1.0, 1.0, 1.0, 2, 1, 1e-9), 32);
    CHECK(art.residual <= 1e-13);
    auto rep = verify_diagram(art, T, ExponentPair(2, 2), 8, 32);
    REQUIRE(rep.exact_product_p2q2.has_value());
    CHECK(*rep.exact_product_p2q2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("noisy operators factor end to end") {
    for (int k = 0; k < 3; ++k) {
        auto T = generate_test_operator(3, 0.5, 1.0, ExponentPair(2, 2),
                                        OperatorStructure::diagonal_plus_noise, 4000 + k);
        auto art = factorize(T, practical(1, 0.5, 1.0, 1.0, 3, 1, 0.05), 4000 + k);
        CHECK(art.search.accepted);
        CHECK(art.residual <= 1e-9);
        CHECK(art.norm_product_lower <= art.theoretical_bound * (1 + 1e-9));
    }
}

TEST_CASE("mixed-sign diagonals factor through the multiplication correction") {
    Rng rng(25);
    auto T = generate_test_operator(3, 0.5, 1.0, ExponentPair(2, 2),
                                    OperatorStructure::diagonal_plus_noise, 77);
    // pre-flip a random selection of diagonal directions
    auto flip = identity_operator(3);
    for (std::size_t i = 0; i < flip.gram.rows(); ++i)
        if (rng.sign() < 0) flip.gram(i, i) = -flip.gram(i, i);
    auto mixed = compose(T, flip);
    CHECK(has_large_diagonal(mixed, 0.5).ok);
    bool has_negative = false;
    for (double d : diagonal(mixed))
        if (d < 0.0) has_negative = true;
    CHECK(has_negative);

    auto art_plain = factorize(T, practical(1, 0.5, 1.0, 1.0, 3, 1, 0.05), 99);
    auto art_mixed = factorize(mixed, practical(1, 0.5, 1.0, 1.0, 3, 1, 0.05), 99);
    CHECK(art_mixed.residual <= 1e-9);
    // the sign correction commutes through the pipeline exactly
    CHECK(art_mixed.residual == doctest::Approx(art_plain.residual).epsilon(1e-12));
    CHECK(art_mixed.search.attempts == art_plain.search.attempts);
}

TEST_CASE("factorization scales covariantly") {
    auto T = generate_test_operator(3, 0.5, 1.0, ExponentPair(2, 2),
                                    OperatorStructure::diagonal_plus_noise, 123);
    auto art1 = factorize(T, practical(1, 0.5, 1.0, 1.0, 3, 1, 0.05), 7);
    auto art2 = factorize(scaled(T, 2.0), practical(1, 1.0, 2.0, 1.0, 3, 1, 0.10), 7);
    CHECK(art2.search.attempts == art1.search.attempts);
    CHECK(art2.E.gram.max_abs_diff(art1.E.gram) == 0.0);
    auto half_f2 = art2.F.gram;
    half_f2 *= 2.0;
    CHECK(half_f2.max_abs_diff(art1.F.gram) <= 1e-13);
    CHECK(std::fabs(art2.residual - art1.residual) <= 1e-10);
}

TEST_CASE("pipeline failure modes") {
    auto T = identity_operator(2);
    CHECK_THROWS_AS(factorize(T, practical(1, 1.5, 2.0, 1.0, 2, 1, 0.05), 1), Error);

    // sign search exhaustion carries the report
    Rng rng(26);
    auto noisy = identity_operator(2);
    for (std::size_t i = 0; i < noisy.gram.rows(); ++i)
        for (std::size_t j = 0; j < noisy.gram.cols(); ++j)
            if (i != j) noisy.gram(i, j) = 0.3 * rng.uniform(-1.0, 1.0);
    try {
        factorize(noisy, practical(1, 0.9, 10.0, 1.0, 2, 1, 1e-12), 1);
        FAIL("expected SignsNotFoundError");
    } catch (const SignsNotFoundError& e) {
        CHECK(!e.report().accepted);
        CHECK(e.report().attempts == 10000);
        CHECK(e.report().max_offdiag > 0.0);
    }

    // theoretical constants overflow desk scale
    FactorizationParams theo;
    theo.mode = FactorizationMode::theoretical;
    theo.n = 1;
    theo.delta = 1.0;
    theo.gamma = 1.0;
    theo.eta = 1.0;
    CHECK_THROWS_AS(factorize(T, theo, 1), Error);

    // practical mode validates the resolution chain
    CHECK_THROWS_AS(factorize(T, practical(1, 0.5, 1.0, 1.0, 2, 5, 0.05), 1), Error);
}

TEST_CASE("neumann ratio is reported even when the series is useless") {
    auto T = generate_test_operator(3, 0.5, 1.0, ExponentPair(2, 2),
                                    OperatorStructure::diagonal_plus_noise, 321);
    auto art = factorize(T, practical(1, 0.5, 1.0, 1.0, 3, 1, 0.05), 11);
    // eta0 2^{16} / (0.5 - 0.2) with eta0 = 0.05
    CHECK(art.neumann_ratio == doctest::Approx(0.05 * 65536.0 / 0.3).epsilon(1e-12));
    CHECK(art.eta0_achieved <= 0.05);
    CHECK(art.uti_condition >= 1.0);
}
