#pragma once

#include <cstdint>
#include <optional>

#include "hardy/randomization.hpp"

namespace hardy {

/// Constants of the construction for given (n, delta, gamma, eta):
///   eta0 = eta*delta / ((1+eta) 2^{8(n+2)}),
///   m0   = smallest integer with 2^{m0} > 2^{8(n+3)} gamma^4 / eta0^4,
///   N    = 41(n+3) + floor(4 log2(gamma/delta) + 4 log2(1 + 1/eta)).
/// Exact integer evaluation; m0 is computed in log space so arbitrarily large
/// parameters cannot overflow. N is computed even when far beyond anything
/// instantiable.
struct DimensionConstants {
    double eta0 = 0.0;
    long long m0 = 0;
    long long N = 0;
};
DimensionConstants constants(int n, double delta, double gamma, double eta);

enum class FactorizationMode { theoretical, practical };

struct FactorizationParams {
    int n = 1;
    double delta = 0.5;
    double gamma = 1.0;
    double eta = 1.0;
    FactorizationMode mode = FactorizationMode::practical;
    // Practical-mode overrides (ignored in theoretical mode, which derives
    // them from the formulas above).
    int N = -1;
    int m0 = -1;
    double eta0 = -1.0;
    std::uint64_t max_attempts = 10000;
    ExponentPair exponents{2, 2};
};

class SignsNotFoundError : public Error {
public:
    SignsNotFoundError(std::string what, SignSearchReport report)
        : Error(ErrorKind::signs_not_found, std::move(what)), report_(std::move(report)) {}
    const SignSearchReport& report() const { return report_; }

private:
    SignSearchReport report_;
};

/// The almost-inverse U f = sum_R <f,b_R>/<T b_R,b_R> b_R, both as a full
/// V_N -> V_N operator and in block coordinates (row R of block_coords maps
/// f to its coefficient on b_R).
struct AlmostInverse {
    OperatorMatrix full;
    Matrix block_coords;     // d_n^2 x d_N^2
    std::vector<double> tau; // <T b_R, b_R>
};
AlmostInverse build_U(const OperatorMatrix& T, const BlockBasisSystem& sys);

/// S = (U T I)^{-1} U : V_N -> Y in block coordinates. Inversion is direct;
/// the Neumann partial sums are cross-checked against the direct inverse
/// whenever the perturbation ratio is below one.
struct InverseOnRange {
    Matrix coords;              // d_n^2 x d_N^2 block coordinates of S
    Matrix uti;                 // the d_n^2 x d_n^2 matrix of U T I
    double condition = 0.0;     // spectral condition number of U T I
    bool neumann_checked = false;
    double neumann_error = 0.0; // max-entry gap of the 50-term partial sum
};
InverseOnRange build_S(const OperatorMatrix& T, const BlockBasisSystem& sys,
                       const AlmostInverse& U);

struct FactorizationArtifacts {
    FactorizationParams params;
    int N_used = 0;
    int m0_used = 0;
    double eta0_used = 0.0;
    OperatorMatrix E; // V_n -> V_N
    OperatorMatrix F; // V_N -> V_n
    BlockBasisSystem system;
    SignSearchReport search;
    double residual = 0.0;           // max entry of F T E - Id on coefficients
    double norm_product_lower = 0.0; // norm_estimate(E).lower * norm_estimate(F).lower
    double theoretical_bound = 0.0;  // (1 + eta)/delta
    double neumann_ratio = 0.0;      // eta0 2^{8(n+1)} / (delta - eta0 2^{2n})
    double eta0_achieved = 0.0;      // max of the two search maxima
    double uti_condition = 0.0;
    bool neumann_checked = false;
    double neumann_error = 0.0;
};

/// The full pipeline: multiplication correction M, Gamlen-Gaudet collections,
/// sign search, almost-inverse, direct inversion on the range, and the
/// factorization operators E = M B and F = A S with F T E = Id on V_n.
FactorizationArtifacts factorize(const OperatorMatrix& T, const FactorizationParams& params,
                                 std::uint64_t seed);

struct DiagramReport {
    double residual = 0.0;
    double norm_product_lower = 0.0;
    double theoretical_bound = 0.0;
    bool product_within_bound = false; // norm_product_lower <= (1+eta)/delta (1+1e-9)
    std::optional<double> exact_product_p2q2;
    std::optional<double> arithmetic_bound; // 1/(delta - eta0(2^{2n} + 2^{8(n+1)})) when > 0
    bool within_arithmetic = false;
};

/// Re-checks the factorization: residual by plain matrix products, the norm
/// product against (1+eta)/delta, and (p=q=2) the exact product against the
/// delta-eta0 arithmetic bound when that bound is positive.
DiagramReport verify_diagram(const FactorizationArtifacts& artifacts, const OperatorMatrix& T,
                             const ExponentPair& e, int samples, std::uint64_t seed);

} // namespace hardy
