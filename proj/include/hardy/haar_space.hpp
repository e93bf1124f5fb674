#pragma once

#include <cstdint>
#include <vector>

#include "hardy/dyadic.hpp"

namespace hardy {

/// Exponents (p, q) of the mixed-norm space, 1 <= p, q < infinity. The dual
/// exponents p', q' satisfy 1/p + 1/p' = 1; p' is +infinity exactly when
/// p = 1, in which case x^(1/p') = x^0 = 1 for x > 0.
struct ExponentPair {
    double p = 2.0;
    double q = 2.0;

    ExponentPair() = default;
    ExponentPair(double p_, double q_);

    double inv_p_dual() const { return 1.0 - 1.0 / p; }
    double inv_q_dual() const { return 1.0 - 1.0 / q; }
    /// Explicit infinity marker when p = 1.
    double p_dual() const;
    double q_dual() const;
};

enum class Side { primal, dual };

/// Which finite-dimensional space a vector or operator lives in.
struct SpaceDescriptor {
    int resolution = 0;
    ExponentPair exponents{};
    Side side = Side::primal;
};

/// Element of the resolution-N space as a coefficient vector over the
/// bi-parameter Haar basis in canonical enumeration order (length d_N^2).
struct HardyElement {
    int resolution = 0;
    std::vector<double> coefficients;

    HardyElement() = default;
    explicit HardyElement(int N);

    std::uint64_t dim() const { return coefficients.size(); }
};

/// Dyadic grid cell [ix,ix+1) x [iy,iy+1) scaled by 2^-resolution.
struct GridCell {
    int resolution = 0;
    std::uint64_t ix = 0;
    std::uint64_t iy = 0;
};

/// Value of the tensor Haar function h_R = h_{R.x}(x) h_{R.y}(y) on a cell.
/// The cell must be fine enough that the value is constant on it.
int haar_eval(const DyadicRectangle& R, const GridCell& cell);

/// Measures |Q| of all basis rectangles at resolution N, canonical order.
/// Cached; the returned reference stays valid for the process lifetime.
const std::vector<double>& measure_weights(int N);

/// <f, g> = sum_R a_R b_R |R|, by bi-parameter Haar orthogonality.
double l2_inner(const HardyElement& f, const HardyElement& g);

/// The iterated square-function norm: per grid cell the square function
/// S^2 = sum_R a_R^2 1_R is accumulated level by level, then the inner
/// q/2-power mean in y and the outer p/q-power mean in x are applied.
double mixed_norm(const HardyElement& f, const ExponentPair& e);

/// |X|^{1/p} |Y|^{1/q} (primal) or |X|^{1/p'} |Y|^{1/q'} (dual) for a block
/// function over disjoint collections X and Y; independent of signs.
double block_norm_closed_form(const std::vector<DyadicInterval>& X,
                              const std::vector<DyadicInterval>& Y, const ExponentPair& e,
                              Side side);

/// Certified lower bound for the dual norm: the best pairing ratio
/// <f,h>/||h||_{p,q} over candidate test elements (f itself plus seeded
/// random sparse Haar combinations). Nondecreasing in trials for fixed seed.
double dual_norm_lower_bound(const HardyElement& f, const ExponentPair& e, int trials,
                             std::uint64_t seed);

/// Block function sum_{K,L} xsigns[K] ysigns[L] h_{KxL} at resolution N.
HardyElement block_element(const std::vector<DyadicInterval>& X,
                           const std::vector<DyadicInterval>& Y, const std::vector<int>& xsigns,
                           const std::vector<int>& ysigns, int N);

} // namespace hardy
