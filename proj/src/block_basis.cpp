#include "hardy/block_basis.hpp"

namespace hardy {

const HardyElement& BlockBasisSystem::element(const DyadicRectangle& R) const {
    std::uint64_t d = interval_count(domain_resolution);
    std::uint64_t idx = interval_linear_index(R.x) * d + interval_linear_index(R.y);
    if (R.x.level > domain_resolution || R.y.level > domain_resolution || idx >= elements.size())
        throw Error(ErrorKind::dimension_mismatch, "block element index out of range");
    return elements[idx];
}

BlockBasisSystem build_system(const CollectionFamily& xfam, const CollectionFamily& yfam,
                              const SignAssignment& theta, const SignAssignment& eps) {
    if (xfam.domain_resolution != yfam.domain_resolution ||
        xfam.target_resolution != yfam.target_resolution)
        throw Error(ErrorKind::dimension_mismatch, "families disagree on resolutions");
    if (auto rep = check_jones(xfam); !rep.passed)
        throw InvalidFamilyError("x-family fails the Jones condition", std::move(rep));
    if (auto rep = check_jones(yfam); !rep.passed)
        throw InvalidFamilyError("y-family fails the Jones condition", std::move(rep));

    const int n = xfam.domain_resolution;
    const int N = xfam.target_resolution;
    if (theta.resolution < N || eps.resolution < N)
        throw Error(ErrorKind::incomplete_family, "sign assignments do not cover resolution N");

    BlockBasisSystem sys;
    sys.xfam = xfam;
    sys.yfam = yfam;
    sys.theta = theta;
    sys.eps = eps;
    sys.domain_resolution = n;
    sys.ambient_resolution = N;

    const std::uint64_t dN = interval_count(N);
    auto domain_intervals = intervals_up_to(n);
    sys.elements.reserve(domain_intervals.size() * domain_intervals.size());
    for (const auto& I : domain_intervals) {
        const auto& X = xfam.collection(I);
        for (const auto& J : domain_intervals) {
            const auto& Y = yfam.collection(J);
            HardyElement b(N);
            for (const auto& K : X) {
                std::uint64_t xi = interval_linear_index(K);
                double sx = static_cast<double>(theta.sign_at(xi));
                for (const auto& L : Y) {
                    std::uint64_t yi = interval_linear_index(L);
                    b.coefficients[xi * dN + yi] = sx * eps.sign_at(yi);
                }
            }
            sys.elements.push_back(std::move(b));
        }
    }
    return sys;
}

OperatorMatrix operator_B(const BlockBasisSystem& sys, const ExponentPair& e) {
    const int n = sys.domain_resolution;
    const int N = sys.ambient_resolution;
    const auto& wN = measure_weights(N);
    std::uint64_t rows = wN.size();
    std::uint64_t cols = sys.elements.size();
    OperatorMatrix B;
    B.domain = {n, e, Side::primal};
    B.codomain = {N, e, Side::primal};
    B.gram = Matrix(rows, cols);
    for (std::uint64_t r = 0; r < cols; ++r) {
        const auto& b = sys.elements[r];
        for (std::uint64_t q = 0; q < rows; ++q)
            if (b.coefficients[q] != 0.0) B.gram(q, r) = b.coefficients[q] * wN[q];
    }
    return B;
}

OperatorMatrix operator_A(const BlockBasisSystem& sys, const ExponentPair& e) {
    const int n = sys.domain_resolution;
    const int N = sys.ambient_resolution;
    const auto& wN = measure_weights(N);
    const auto& wn = measure_weights(n);
    std::uint64_t rows = sys.elements.size();
    std::uint64_t cols = wN.size();
    OperatorMatrix A;
    A.domain = {N, e, Side::primal};
    A.codomain = {n, e, Side::primal};
    A.gram = Matrix(rows, cols);
    for (std::uint64_t r = 0; r < rows; ++r) {
        const auto& b = sys.elements[r];
        double norm_sq = l2_inner(b, b); // equals |R| for kappa = 1 families
        for (std::uint64_t q = 0; q < cols; ++q)
            if (b.coefficients[q] != 0.0)
                A.gram(r, q) = b.coefficients[q] * wN[q] * wn[r] / norm_sq;
    }
    return A;
}

OperatorMatrix projection_P(const BlockBasisSystem& sys, const ExponentPair& e) {
    return compose(operator_B(sys, e), operator_A(sys, e));
}

} // namespace hardy
