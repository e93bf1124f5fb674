#pragma once

#include <cstdint>
#include <vector>

#include "hardy/collections.hpp"
#include "hardy/operators.hpp"

namespace hardy {

/// Signs attached to every dyadic interval of level <= resolution, stored per
/// interval linear index; defaults to +1 everywhere.
struct SignAssignment {
    int resolution = 0;
    std::vector<std::int8_t> values;

    SignAssignment() = default;
    explicit SignAssignment(int N) : resolution(N), values(interval_count(N), 1) {}

    int sign_of(const DyadicInterval& I) const { return values[interval_linear_index(I)]; }
    int sign_at(std::uint64_t linear_index) const { return values[linear_index]; }
    void set(const DyadicInterval& I, int s) {
        values[interval_linear_index(I)] = static_cast<std::int8_t>(s < 0 ? -1 : 1);
    }
};

/// Thrown when a family handed to build_system fails the Jones condition;
/// carries the full condition report.
class InvalidFamilyError : public Error {
public:
    InvalidFamilyError(std::string what, ConditionReport report)
        : Error(ErrorKind::verification_failed, std::move(what)), report_(std::move(report)) {}
    const ConditionReport& report() const { return report_; }

private:
    ConditionReport report_;
};

/// The randomized block basis b_{IxJ} = sum_{K in X_I, L in Y_J}
/// theta_K eps_L h_{KxL}, one element per rectangle of D_{<=n} (x) D_{<=n},
/// each living at the ambient resolution of the families.
struct BlockBasisSystem {
    CollectionFamily xfam, yfam;
    SignAssignment theta, eps;
    int domain_resolution = 0;  // n
    int ambient_resolution = 0; // N
    std::vector<HardyElement> elements; // indexed like the d_n^2 enumeration

    const HardyElement& element(const DyadicRectangle& R) const;
    std::uint64_t block_count() const { return elements.size(); }
};

/// Validates both families against the Jones condition, then constructs all
/// d_n^2 block elements.
BlockBasisSystem build_system(const CollectionFamily& xfam, const CollectionFamily& yfam,
                              const SignAssignment& theta, const SignAssignment& eps);

/// B f = sum_R (<f,h_R>/|R|) b_R : V_n -> V_N. Columns of the Gram matrix are
/// the b_R coefficient vectors scaled by the codomain measures.
OperatorMatrix operator_B(const BlockBasisSystem& sys, const ExponentPair& e = ExponentPair(2, 2));

/// A f = sum_R (<f,b_R>/||b_R||_2^2) h_R : V_N -> V_n. For kappa = 1 families
/// the Gram matrix is exactly the transpose of operator_B's.
OperatorMatrix operator_A(const BlockBasisSystem& sys, const ExponentPair& e = ExponentPair(2, 2));

/// P = B A, the projection of V_N onto span{b_R}.
OperatorMatrix projection_P(const BlockBasisSystem& sys, const ExponentPair& e = ExponentPair(2, 2));

} // namespace hardy
