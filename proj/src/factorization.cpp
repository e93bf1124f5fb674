#include "hardy/factorization.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "hardy/rng.hpp"

namespace hardy {

namespace {

using EigenRowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

EigenRowMat to_eigen(const Matrix& m) {
    return Eigen::Map<const EigenRowMat>(m.data(), static_cast<Eigen::Index>(m.rows()),
                                         static_cast<Eigen::Index>(m.cols()));
}

Matrix from_eigen(const EigenRowMat& m) {
    Matrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
    return out;
}

} // namespace

DimensionConstants constants(int n, double delta, double gamma, double eta) {
    if (!(delta > 0.0) || !(eta > 0.0) || !(gamma >= delta))
        throw Error(ErrorKind::config, "constants: need delta, eta > 0 and gamma >= delta");
    DimensionConstants c;
    c.eta0 = std::ldexp(eta * delta / (1.0 + eta), -8 * (n + 2));
    // log2 of 2^{8(n+3)} gamma^4 / eta0^4, assembled in log space.
    double log2_eta0 =
        std::log2(eta) + std::log2(delta) - std::log2(1.0 + eta) - 8.0 * (n + 2);
    double log2_rhs = 8.0 * (n + 3) + 4.0 * std::log2(gamma) - 4.0 * log2_eta0;
    c.m0 = static_cast<long long>(std::floor(log2_rhs)) + 1;
    double tail = 4.0 * std::log2(gamma / delta) + 4.0 * std::log2(1.0 + 1.0 / eta);
    c.N = 41LL * (n + 3) + static_cast<long long>(std::floor(tail));
    return c;
}

AlmostInverse build_U(const OperatorMatrix& T, const BlockBasisSystem& sys) {
    if (T.domain.resolution != sys.ambient_resolution)
        throw Error(ErrorKind::dimension_mismatch, "build_U: operator/system resolution mismatch");
    const std::uint64_t blocks = sys.block_count();
    const std::uint64_t dim = T.gram.rows();
    const auto& wN = measure_weights(sys.ambient_resolution);

    AlmostInverse U;
    U.tau.resize(blocks);
    U.block_coords = Matrix(blocks, dim);
    for (std::uint64_t r = 0; r < blocks; ++r) {
        const auto& b = sys.elements[r];
        U.tau[r] = l2_inner(apply(T, b), b);
        if (U.tau[r] == 0.0)
            throw Error(ErrorKind::degenerate_diagonal,
                        "build_U: zero block diagonal <T b_R, b_R> at block " + std::to_string(r));
        double inv = 1.0 / U.tau[r];
        for (std::uint64_t q = 0; q < dim; ++q)
            if (b.coefficients[q] != 0.0) U.block_coords(r, q) = b.coefficients[q] * wN[q] * inv;
    }

    // Full operator: columns of the block elements against the coordinates.
    U.full.domain = T.domain;
    U.full.codomain = T.domain;
    Matrix action(dim, dim);
    for (std::uint64_t r = 0; r < blocks; ++r) {
        const auto& b = sys.elements[r];
        for (std::uint64_t q = 0; q < dim; ++q)
            if (b.coefficients[q] != 0.0)
                kernels::ops().axpy(b.coefficients[q], U.block_coords.row(r),
                                    action.row(q), dim);
    }
    U.full.gram = Matrix(dim, dim);
    for (std::uint64_t q = 0; q < dim; ++q) {
        const double* src = action.row(q);
        double* dst = U.full.gram.row(q);
        for (std::uint64_t c = 0; c < dim; ++c) dst[c] = src[c] * wN[q];
    }
    return U;
}

InverseOnRange build_S(const OperatorMatrix& T, const BlockBasisSystem& sys,
                       const AlmostInverse& U) {
    const std::uint64_t blocks = sys.block_count();
    InverseOnRange S;
    // (U T I)[R', R] = <T b_R, b_{R'}> / tau_{R'}.
    S.uti = Matrix(blocks, blocks);
    for (std::uint64_t rcol = 0; rcol < blocks; ++rcol) {
        HardyElement tb = apply(T, sys.elements[rcol]);
        for (std::uint64_t rrow = 0; rrow < blocks; ++rrow)
            S.uti(rrow, rcol) = l2_inner(tb, sys.elements[rrow]) / U.tau[rrow];
    }

    EigenRowMat uti = to_eigen(S.uti);
    Eigen::JacobiSVD<EigenRowMat> svd(uti);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    double smax = svd.singularValues()(0);
    if (smin <= smax * 1e-14 || smin == 0.0)
        throw Error(ErrorKind::factorization_infeasible,
                    "build_S: U T I is numerically singular");
    S.condition = smax / smin;

    EigenRowMat inv = uti.partialPivLu().inverse();
    Matrix inv_m = from_eigen(inv);
    S.coords = inv_m * U.block_coords;

    // Neumann cross-check: (U T I)^{-1} = sum_m (Id - U T I)^m when the
    // perturbation is small; compare 50 partial-sum terms with the direct
    // inverse in max-entry norm.
    EigenRowMat K = EigenRowMat::Identity(uti.rows(), uti.cols()) - uti;
    if (K.operatorNorm() < 1.0) {
        EigenRowMat partial = EigenRowMat::Identity(uti.rows(), uti.cols());
        EigenRowMat power = EigenRowMat::Identity(uti.rows(), uti.cols());
        for (int m = 1; m <= 50; ++m) {
            power = power * K;
            partial += power;
        }
        S.neumann_checked = true;
        S.neumann_error = (partial - inv).cwiseAbs().maxCoeff();
    }
    return S;
}

namespace {

struct ResolvedConstants {
    int N;
    int m0;
    double eta0;
};

ResolvedConstants resolve_params(const FactorizationParams& p) {
    if (p.mode == FactorizationMode::theoretical) {
        DimensionConstants c = constants(p.n, p.delta, p.gamma, p.eta);
        if (c.N > max_resolution() || c.m0 + p.n > max_resolution())
            throw Error(ErrorKind::factorization_infeasible,
                        "theoretical constants (N = " + std::to_string(c.N) +
                            ", m0 = " + std::to_string(c.m0) +
                            ") are beyond the desk-scale resolution ceiling " +
                            std::to_string(max_resolution()));
        return {static_cast<int>(c.N), static_cast<int>(c.m0), c.eta0};
    }
    if (p.N < 0 || p.m0 < 0 || p.eta0 < 0.0)
        throw Error(ErrorKind::config, "practical mode requires N, m0 and eta0");
    if (p.m0 + p.n > p.N || p.N > max_resolution())
        throw Error(ErrorKind::config,
                    "practical mode needs m0 + n <= N <= " + std::to_string(max_resolution()));
    return {p.N, p.m0, p.eta0};
}

} // namespace

FactorizationArtifacts factorize(const OperatorMatrix& T, const FactorizationParams& params,
                                 std::uint64_t seed) {
    ResolvedConstants rc = resolve_params(params);
    if (T.domain.resolution != rc.N)
        throw Error(ErrorKind::dimension_mismatch,
                    "factorize: operator resolution " + std::to_string(T.domain.resolution) +
                        " does not match N = " + std::to_string(rc.N));
    auto diag_check = has_large_diagonal(T, params.delta);
    if (!diag_check.ok)
        throw Error(ErrorKind::factorization_infeasible,
                    "factorize: diagonal ratio " + std::to_string(diag_check.worst_ratio) +
                        " below delta at " + to_string(diag_check.worst));

    // Fold the sign correction into the operator: T M has nonnegative large
    // diagonal and E picks the correction back up.
    OperatorMatrix M = multiplication_M(T);
    OperatorMatrix TM = compose(T, M);

    auto [xfam, yfam] = gamlen_gaudet(params.n, rc.m0, rc.N);
    SignSearchReport search =
        search_signs(TM, xfam, yfam, rc.eta0, params.max_attempts, seed);
    if (!search.accepted)
        throw SignsNotFoundError("sign search exhausted " + std::to_string(params.max_attempts) +
                                     " attempts (best maxima " +
                                     std::to_string(search.max_offdiag) + ", " +
                                     std::to_string(search.max_diag_deviation) + ")",
                                 search);

    BlockBasisSystem sys = build_system(xfam, yfam, search.theta, search.eps);
    AlmostInverse U = build_U(TM, sys);
    InverseOnRange S = build_S(TM, sys, U);

    FactorizationArtifacts art;
    art.params = params;
    art.N_used = rc.N;
    art.m0_used = rc.m0;
    art.eta0_used = rc.eta0;
    art.search = search;

    OperatorMatrix B = operator_B(sys, params.exponents);
    art.E = compose(M, B);
    art.E.domain.exponents = params.exponents;
    art.E.codomain.exponents = params.exponents;

    // F = A S: A maps b_R to h_R, so the coefficient action of F is exactly
    // the block-coordinate matrix of S.
    const auto& wn = measure_weights(params.n);
    art.F.domain = {rc.N, params.exponents, Side::primal};
    art.F.codomain = {params.n, params.exponents, Side::primal};
    art.F.gram = Matrix(S.coords.rows(), S.coords.cols());
    for (std::size_t r = 0; r < S.coords.rows(); ++r) {
        const double* src = S.coords.row(r);
        double* dst = art.F.gram.row(r);
        for (std::size_t q = 0; q < S.coords.cols(); ++q) dst[q] = src[q] * wn[r];
    }

    OperatorMatrix FTE = compose(compose(art.F, T), art.E);
    Matrix action = coefficient_action(FTE);
    art.residual = action.max_abs_diff(Matrix::identity(action.rows()));

    art.theoretical_bound = (1.0 + params.eta) / params.delta;
    double denom = params.delta - rc.eta0 * std::ldexp(1.0, 2 * params.n);
    art.neumann_ratio = denom > 0.0 ? rc.eta0 * std::ldexp(1.0, 8 * (params.n + 1)) / denom
                                    : std::numeric_limits<double>::infinity();
    art.eta0_achieved = std::max(search.max_offdiag, search.max_diag_deviation);
    art.uti_condition = S.condition;
    art.neumann_checked = S.neumann_checked;
    art.neumann_error = S.neumann_error;

    art.norm_product_lower = norm_estimate(art.E, params.exponents).lower *
                             norm_estimate(art.F, params.exponents).lower;
    art.system = std::move(sys);
    return art;
}

DiagramReport verify_diagram(const FactorizationArtifacts& artifacts, const OperatorMatrix& T,
                             const ExponentPair& e, int samples, std::uint64_t seed) {
    DiagramReport rep;
    OperatorMatrix FTE = compose(compose(artifacts.F, T), artifacts.E);
    Matrix action = coefficient_action(FTE);
    rep.residual = action.max_abs_diff(Matrix::identity(action.rows()));

    NormEstimate ne = norm_estimate(artifacts.E, e, samples, Rng(seed).child("E").next_u64());
    NormEstimate nf = norm_estimate(artifacts.F, e, samples, Rng(seed).child("F").next_u64());
    rep.norm_product_lower = ne.lower * nf.lower;
    rep.theoretical_bound = (1.0 + artifacts.params.eta) / artifacts.params.delta;
    rep.product_within_bound = rep.norm_product_lower <= rep.theoretical_bound * (1.0 + 1e-9);

    if (e.p == 2.0 && e.q == 2.0) {
        rep.exact_product_p2q2 = spectral_norm(artifacts.E) * spectral_norm(artifacts.F);
        int n = artifacts.params.n;
        double denom = artifacts.params.delta -
                       artifacts.eta0_used * (std::ldexp(1.0, 2 * n) + std::ldexp(1.0, 8 * (n + 1)));
        if (denom > 0.0) {
            rep.arithmetic_bound = 1.0 / denom;
            rep.within_arithmetic = *rep.exact_product_p2q2 <= *rep.arithmetic_bound * (1.0 + 1e-9);
        }
    }
    return rep;
}

} // namespace hardy
