#include "hardy/operators.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

static_assert(std::endian::native == std::endian::little,
              "binary Gram dumps are little-endian");

#include "hardy/rng.hpp"

namespace hardy {

namespace {

using EigenRowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EigenMap = Eigen::Map<const EigenRowMat>;

std::uint64_t space_dim(int N) {
    std::uint64_t d = interval_count(N);
    return d * d;
}

void require_square(const OperatorMatrix& T, const char* what) {
    if (!T.square())
        throw Error(ErrorKind::dimension_mismatch, std::string(what) + ": operator not square");
}

} // namespace

OperatorMatrix identity_operator(int N, const ExponentPair& e) {
    OperatorMatrix T;
    T.domain = {N, e, Side::primal};
    T.codomain = T.domain;
    std::uint64_t dim = space_dim(N);
    T.gram = Matrix(dim, dim);
    const auto& w = measure_weights(N);
    for (std::uint64_t i = 0; i < dim; ++i) T.gram(i, i) = w[i];
    return T;
}

OperatorMatrix scaled(const OperatorMatrix& T, double c) {
    OperatorMatrix S = T;
    S.gram *= c;
    return S;
}

OperatorMatrix compose(const OperatorMatrix& A, const OperatorMatrix& B) {
    if (A.domain.resolution != B.codomain.resolution)
        throw Error(ErrorKind::dimension_mismatch, "compose: operators do not chain");
    // gram(A o B) = G_A D_mid^{-1} G_B with D_mid = diag(|Q|) of the middle basis.
    const auto& wmid = measure_weights(A.domain.resolution);
    Matrix scaled_b(B.gram.rows(), B.gram.cols());
    for (std::size_t i = 0; i < B.gram.rows(); ++i) {
        double inv = 1.0 / wmid[i];
        const double* src = B.gram.row(i);
        double* dst = scaled_b.row(i);
        for (std::size_t j = 0; j < B.gram.cols(); ++j) dst[j] = src[j] * inv;
    }
    OperatorMatrix C;
    C.domain = B.domain;
    C.codomain = A.codomain;
    C.gram = A.gram * scaled_b;
    return C;
}

OperatorMatrix adjoint(const OperatorMatrix& T) {
    OperatorMatrix S;
    S.domain = T.codomain;
    S.codomain = T.domain;
    S.domain.side = T.codomain.side == Side::primal ? Side::dual : Side::primal;
    S.codomain.side = T.domain.side == Side::primal ? Side::dual : Side::primal;
    S.gram = T.gram.transposed();
    return S;
}

Matrix coefficient_action(const OperatorMatrix& T) {
    const auto& w = measure_weights(T.codomain.resolution);
    Matrix C = T.gram;
    for (std::size_t i = 0; i < C.rows(); ++i) {
        double inv = 1.0 / w[i];
        double* row = C.row(i);
        for (std::size_t j = 0; j < C.cols(); ++j) row[j] *= inv;
    }
    return C;
}

HardyElement apply(const OperatorMatrix& T, const HardyElement& f) {
    if (f.resolution != T.domain.resolution)
        throw Error(ErrorKind::dimension_mismatch, "apply: resolution mismatch");
    if (f.coefficients.size() != T.gram.cols())
        throw Error(ErrorKind::dimension_mismatch, "apply: dimension mismatch");
    HardyElement out(T.codomain.resolution);
    kernels::ops().matvec(T.gram.data(), f.coefficients.data(), out.coefficients.data(),
                          T.gram.rows(), T.gram.cols());
    const auto& w = measure_weights(T.codomain.resolution);
    for (std::size_t i = 0; i < out.coefficients.size(); ++i) out.coefficients[i] /= w[i];
    return out;
}

std::vector<double> diagonal(const OperatorMatrix& T) {
    require_square(T, "diagonal");
    std::vector<double> d(T.gram.rows());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = T.gram(i, i);
    return d;
}

DiagonalCheck has_large_diagonal(const OperatorMatrix& T, double delta) {
    require_square(T, "has_large_diagonal");
    const auto& w = measure_weights(T.domain.resolution);
    const auto basis = enumerate_basis(T.domain.resolution);
    DiagonalCheck res;
    res.worst_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < w.size(); ++i) {
        double ratio = std::fabs(T.gram(i, i)) / w[i];
        if (ratio < res.worst_ratio) {
            res.worst_ratio = ratio;
            res.worst = basis.order[i];
        }
    }
    res.ok = res.worst_ratio >= delta;
    return res;
}

OperatorMatrix multiplication_M(const OperatorMatrix& T) {
    require_square(T, "multiplication_M");
    const auto& w = measure_weights(T.domain.resolution);
    OperatorMatrix M;
    M.domain = T.domain;
    M.codomain = T.domain;
    M.gram = Matrix(T.gram.rows(), T.gram.cols());
    for (std::size_t i = 0; i < T.gram.rows(); ++i) {
        double d = T.gram(i, i);
        if (d == 0.0)
            throw Error(ErrorKind::degenerate_diagonal,
                        "multiplication_M: zero diagonal entry at index " + std::to_string(i));
        M.gram(i, i) = (d > 0.0 ? 1.0 : -1.0) * w[i];
    }
    return M;
}

namespace {

/// Similarity-weighted matrix D_out^{1/2} C D_in^{-1/2} = D_out^{-1/2} G
/// D_in^{-1/2}. Its plain spectral norm is the p=q=2 operator norm of T.
Matrix weighted_matrix(const OperatorMatrix& T) {
    const auto& wout = measure_weights(T.codomain.resolution);
    const auto& win = measure_weights(T.domain.resolution);
    Matrix M = T.gram;
    for (std::size_t i = 0; i < M.rows(); ++i) {
        double ri = 1.0 / std::sqrt(wout[i]);
        double* row = M.row(i);
        for (std::size_t j = 0; j < M.cols(); ++j) row[j] *= ri / std::sqrt(win[j]);
    }
    return M;
}

double spectral_norm_of(const Matrix& M) {
    EigenMap map(M.data(), static_cast<Eigen::Index>(M.rows()),
                 static_cast<Eigen::Index>(M.cols()));
    // Largest singular value via the smaller of the two Gram matrices.
    EigenRowMat gram = M.rows() <= M.cols() ? EigenRowMat(map * map.transpose())
                                            : EigenRowMat(map.transpose() * map);
    Eigen::SelfAdjointEigenSolver<EigenRowMat> es(gram, Eigen::EigenvaluesOnly);
    double top = es.eigenvalues()(es.eigenvalues().size() - 1);
    return top <= 0.0 ? 0.0 : std::sqrt(top);
}

/// ||h_Q||_{H^p(H^q)} = |I|^{1/p} |J|^{1/q} per basis rectangle.
std::vector<double> haar_primal_norms(int N, const ExponentPair& e) {
    auto basis = enumerate_basis(N);
    std::vector<double> out(basis.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::pow(measure(basis.order[i].x), 1.0 / e.p) *
                 std::pow(measure(basis.order[i].y), 1.0 / e.q);
    return out;
}

std::vector<double> haar_dual_norms(int N, const ExponentPair& e) {
    auto basis = enumerate_basis(N);
    std::vector<double> out(basis.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::pow(measure(basis.order[i].x), e.inv_p_dual()) *
                 std::pow(measure(basis.order[i].y), e.inv_q_dual());
    return out;
}

/// Triangle-type certified upper bound. For square operators the diagonal
/// coefficient multiplier contributes max |C_QQ| (1-unconditionality of the
/// Haar system); every other entry the norm of its rank-one piece
/// f -> (<f,h_Q>/|Q|) h_{Q'}.
double triangle_upper_bound(const OperatorMatrix& T, const ExponentPair& e) {
    Matrix C = coefficient_action(T);
    auto primal = haar_primal_norms(T.codomain.resolution, e);
    auto dual = haar_dual_norms(T.domain.resolution, e);
    const auto& w = measure_weights(T.domain.resolution);
    const bool sq = T.square();
    double diag_part = 0.0;
    double off_part = 0.0;
    for (std::size_t i = 0; i < C.rows(); ++i) {
        for (std::size_t j = 0; j < C.cols(); ++j) {
            if (sq && i == j) {
                diag_part = std::max(diag_part, std::fabs(C(i, i)));
            } else {
                off_part += std::fabs(C(i, j)) * primal[i] * dual[j] / w[j];
            }
        }
    }
    return diag_part + off_part;
}

} // namespace

double spectral_norm(const OperatorMatrix& T) { return spectral_norm_of(weighted_matrix(T)); }

double certified_norm_upper(const OperatorMatrix& T, const ExponentPair& e) {
    if (e.p == 2.0 && e.q == 2.0) return spectral_norm(T);
    return triangle_upper_bound(T, e);
}

NormEstimate norm_estimate(const OperatorMatrix& T, const ExponentPair& e, int trials,
                           std::uint64_t seed) {
    if (e.p == 2.0 && e.q == 2.0) {
        double s = spectral_norm(T);
        return {s, s, NormMethod::spectral_p2q2};
    }

    const int N = T.domain.resolution;
    const std::uint64_t dim = T.gram.cols();
    double best = 0.0;
    auto consider = [&](const HardyElement& f) {
        double nf = mixed_norm(f, e);
        if (nf == 0.0) return;
        best = std::max(best, mixed_norm(apply(T, f), e) / nf);
    };

    // Coordinate candidates.
    if (dim <= 4096) {
        HardyElement f(N);
        for (std::uint64_t i = 0; i < dim; ++i) {
            f.coefficients[i] = 1.0;
            consider(f);
            f.coefficients[i] = 0.0;
        }
    }
    // Random dense and sparse block-style candidates, seeded per index.
    Rng rng = Rng(seed).child("norm-estimate");
    for (int t = 0; t < trials; ++t) {
        Rng r = rng.child(static_cast<std::uint64_t>(t));
        HardyElement f(N);
        if (t % 2 == 0) {
            for (auto& c : f.coefficients) c = r.normal();
        } else {
            // Signed block over a random level pair.
            int lx = static_cast<int>(r.below(static_cast<std::uint64_t>(N) + 1));
            int ly = static_cast<int>(r.below(static_cast<std::uint64_t>(N) + 1));
            std::uint64_t d = interval_count(N);
            for (std::uint64_t kx = 0; kx < (std::uint64_t{1} << lx); ++kx)
                for (std::uint64_t ky = 0; ky < (std::uint64_t{1} << ly); ++ky) {
                    std::uint64_t xi = (std::uint64_t{1} << lx) - 1 + kx;
                    std::uint64_t yi = (std::uint64_t{1} << ly) - 1 + ky;
                    f.coefficients[xi * d + yi] = static_cast<double>(r.sign());
                }
        }
        consider(f);
    }
    NormEstimate est;
    est.lower = best;
    est.method = NormMethod::sampled;
    double tri = triangle_upper_bound(T, e);
    if (std::isfinite(tri) && tri >= best) {
        est.upper = tri;
        est.method = NormMethod::triangle_bound;
    }
    return est;
}

OperatorMatrix generate_test_operator(int N, double delta, double gamma, const ExponentPair& e,
                                      OperatorStructure structure, std::uint64_t seed) {
    if (!(delta > 0.0) || !(gamma > 0.0))
        throw Error(ErrorKind::config, "generate_test_operator: delta, gamma must be positive");
    if (delta > gamma)
        throw Error(ErrorKind::generation_infeasible,
                    "generate_test_operator: delta > gamma (delta <= ||T|| is forced)");
    const std::uint64_t dim = space_dim(N);
    Rng rng = Rng(seed).child("generate-operator");

    // Work on the similarity-weighted matrix M_w = D^{-1/2} G D^{-1/2}; its
    // diagonal entries are exactly <T h_Q,h_Q>/|Q| and its 2-norm is the
    // p=q=2 operator norm.
    Matrix Mw(dim, dim);
    bool exact_diag = delta == gamma;
    for (std::uint64_t i = 0; i < dim; ++i)
        Mw(i, i) = exact_diag ? delta : rng.uniform(delta, delta + 0.5 * (gamma - delta));
    double max_diag = 0.0;
    for (std::uint64_t i = 0; i < dim; ++i) max_diag = std::max(max_diag, Mw(i, i));
    double budget = gamma - max_diag;

    if (structure == OperatorStructure::diagonal_plus_noise && budget > 0.0) {
        Matrix noise(dim, dim);
        for (std::uint64_t i = 0; i < dim; ++i)
            for (std::uint64_t j = 0; j < dim; ++j)
                if (i != j) noise(i, j) = rng.normal();
        double noise_size;
        if (e.p == 2.0 && e.q == 2.0) {
            noise_size = spectral_norm_of(noise);
        } else {
            OperatorMatrix probe;
            probe.domain = {N, e, Side::primal};
            probe.codomain = probe.domain;
            const auto& w = measure_weights(N);
            probe.gram = Matrix(dim, dim);
            for (std::uint64_t i = 0; i < dim; ++i)
                for (std::uint64_t j = 0; j < dim; ++j)
                    probe.gram(i, j) = noise(i, j) * std::sqrt(w[i] * w[j]);
            noise_size = triangle_upper_bound(probe, e);
        }
        if (noise_size > 0.0) {
            double scale_to = 0.999 * budget / noise_size;
            for (std::uint64_t i = 0; i < dim; ++i)
                kernels::ops().axpy(scale_to, noise.row(i), Mw.row(i), dim);
        }
    } else if (structure == OperatorStructure::permuted_blocks && budget > 0.0) {
        // Random partial matching with +-nu entries; a matching has one entry
        // per row/column, so its 2-norm is exactly nu.
        double nu = 0.75 * budget;
        std::vector<std::uint64_t> idx(dim);
        for (std::uint64_t i = 0; i < dim; ++i) idx[i] = i;
        for (std::uint64_t i = dim; i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
        for (std::uint64_t k = 0; k + 1 < dim; k += 2) {
            double s = static_cast<double>(rng.sign());
            Mw(idx[k], idx[k + 1]) = s * nu;
            Mw(idx[k + 1], idx[k]) = -s * nu;
        }
    }

    OperatorMatrix T;
    T.domain = {N, e, Side::primal};
    T.codomain = T.domain;
    const auto& w = measure_weights(N);
    T.gram = Matrix(dim, dim);
    for (std::uint64_t i = 0; i < dim; ++i)
        for (std::uint64_t j = 0; j < dim; ++j)
            T.gram(i, j) = Mw(i, j) * std::sqrt(w[i] * w[j]);

    auto check = has_large_diagonal(T, delta);
    double upper = certified_norm_upper(T, e);
    if (!check.ok || upper > gamma * (1.0 + 1e-10))
        throw Error(ErrorKind::generation_infeasible,
                    "generate_test_operator: certificate failed (diag ratio " +
                        std::to_string(check.worst_ratio) + ", norm upper " +
                        std::to_string(upper) + ")");
    return T;
}

void write_binary(const OperatorMatrix& T, std::ostream& out) {
    require_square(T, "write_binary");
    const char magic[4] = {'H', 'F', 'G', 'M'};
    std::uint32_t version = 1;
    std::uint32_t N = static_cast<std::uint32_t>(T.domain.resolution);
    std::uint32_t side = T.domain.side == Side::primal ? 0u : 1u;
    out.write(magic, 4);
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&N), 4);
    out.write(reinterpret_cast<const char*>(&side), 4);
    out.write(reinterpret_cast<const char*>(T.gram.data()),
              static_cast<std::streamsize>(T.gram.values().size() * sizeof(double)));
}

OperatorMatrix read_binary(std::istream& in) {
    char magic[4];
    std::uint32_t version = 0, N = 0, side = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&N), 4);
    in.read(reinterpret_cast<char*>(&side), 4);
    if (!in || std::memcmp(magic, "HFGM", 4) != 0 || version != 1)
        throw Error(ErrorKind::config, "read_binary: bad HFGM header");
    if (N > static_cast<std::uint32_t>(max_resolution()))
        throw Error(ErrorKind::resolution_exceeded, "read_binary: resolution above the ceiling");
    OperatorMatrix T;
    T.domain = {static_cast<int>(N), ExponentPair(2, 2),
                side == 0 ? Side::primal : Side::dual};
    T.codomain = T.domain;
    std::uint64_t dim = space_dim(static_cast<int>(N));
    T.gram = Matrix(dim, dim);
    in.read(reinterpret_cast<char*>(T.gram.data()),
            static_cast<std::streamsize>(dim * dim * sizeof(double)));
    if (!in) throw Error(ErrorKind::config, "read_binary: truncated payload");
    return T;
}

} // namespace hardy
