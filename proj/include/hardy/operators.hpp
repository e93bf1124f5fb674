#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hardy/haar_space.hpp"
#include "hardy/matrix.hpp"

namespace hardy {

/// Operator T between Haar-coefficient spaces, stored as its bilinear-form
/// (Gram) values gram(row Q', col Q) = <T h_Q, h_{Q'}> in canonical order.
/// The action on coefficient vectors is (Tf)_{Q'} = sum_Q gram(Q',Q) a_Q / |Q'|.
struct OperatorMatrix {
    SpaceDescriptor domain;
    SpaceDescriptor codomain;
    Matrix gram;

    bool square() const { return domain.resolution == codomain.resolution; }
};

/// Identity on V_N: gram = diag(|Q|).
OperatorMatrix identity_operator(int N, const ExponentPair& e = ExponentPair(2, 2));
/// c * T.
OperatorMatrix scaled(const OperatorMatrix& T, double c);
/// Composition A after B (domains must chain). Gram composes through the
/// measure weights of the middle basis.
OperatorMatrix compose(const OperatorMatrix& A, const OperatorMatrix& B);
/// Adjoint: gram transposed, domain/codomain swapped, side flipped.
OperatorMatrix adjoint(const OperatorMatrix& T);
/// Coefficient-action matrix C = D^{-1} G (rows scaled by 1/|Q'|).
Matrix coefficient_action(const OperatorMatrix& T);

HardyElement apply(const OperatorMatrix& T, const HardyElement& f);

/// All diagonal bilinear values <T h_Q, h_Q> in canonical order.
std::vector<double> diagonal(const OperatorMatrix& T);

struct DiagonalCheck {
    bool ok = false;
    DyadicRectangle worst;      // minimizer of |<T h_Q, h_Q>| / |Q|
    double worst_ratio = 0.0;
};
/// True iff |<T h_Q, h_Q>| >= delta |Q| for every basis rectangle.
DiagonalCheck has_large_diagonal(const OperatorMatrix& T, double delta);

/// The norm-1 multiplication operator h_Q -> sign(<T h_Q, h_Q>) h_Q.
/// Zero diagonal entries are rejected rather than given a default sign; the
/// large-diagonal hypothesis excludes them.
OperatorMatrix multiplication_M(const OperatorMatrix& T);

enum class OperatorStructure { diagonal, diagonal_plus_noise, permuted_blocks };

/// Builds an operator with |<T h_Q,h_Q>| >= delta |Q| and a certified norm
/// bound <= gamma: exact spectral norm when p=q=2, otherwise a triangle-type
/// bound (diagonal multiplier plus rank-one off-diagonal pieces).
OperatorMatrix generate_test_operator(int N, double delta, double gamma, const ExponentPair& e,
                                      OperatorStructure structure, std::uint64_t seed);

enum class NormMethod { spectral_p2q2, sampled, triangle_bound };

struct NormEstimate {
    double lower = 0.0;
    std::optional<double> upper;
    NormMethod method = NormMethod::sampled;
};

/// p=q=2: exact spectral norm of the similarity-weighted matrix
/// D^{1/2} C D^{-1/2} (lower == upper). Otherwise: lower is the best sampled
/// Rayleigh quotient over random, coordinate and block candidates, and upper
/// is the triangle bound.
NormEstimate norm_estimate(const OperatorMatrix& T, const ExponentPair& e,
                           int trials = 64, std::uint64_t seed = 0x9d2c5680u);

/// Spectral norm (p=q=2 operator norm) alone.
double spectral_norm(const OperatorMatrix& T);

/// Certified upper bound for ||T|| in exponents e: spectral when p=q=2,
/// triangle bound otherwise.
double certified_norm_upper(const OperatorMatrix& T, const ExponentPair& e);

/// Binary Gram dump: 16-byte header {magic "HFGM", version u32, N u32,
/// side u32}, then row-major little-endian float64. Square operators only.
void write_binary(const OperatorMatrix& T, std::ostream& out);
OperatorMatrix read_binary(std::istream& in);

} // namespace hardy
