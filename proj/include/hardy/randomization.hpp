#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hardy/block_basis.hpp"

namespace hardy {

/// The four block-pairing random variables of the almost-diagonalization
/// argument, as functions of the signs (theta, eps):
///   W = <T b_{IxJ}, b_{I'xJ'}>            (I != I', J != J')
///   X = <T b_{IxJ}, b_{I'xJ}>             (I != I')
///   Y = <T b_{IxJ}, b_{IxJ'}>             (J != J')
///   Z = <T b_{IxJ}, b_{IxJ}> - sum_{K,L} <T h_{KxL}, h_{KxL}>
enum class PairingVariable { W, X, Y, Z };

const char* pairing_variable_name(PairingVariable v);
PairingVariable pairing_variable_from_name(const std::string& name);

/// Index tuple (I, I', J, J'); the unused primes must equal their partners
/// (X: J' = J, Y: I' = I, Z: both).
struct VariableIndices {
    DyadicInterval I, I2, J, J2;
};

double eval_rv(const OperatorMatrix& T, const CollectionFamily& xfam,
               const CollectionFamily& yfam, const SignAssignment& theta,
               const SignAssignment& eps, PairingVariable variable, const VariableIndices& idx);

struct MomentReport {
    PairingVariable variable = PairingVariable::W;
    VariableIndices indices;
    std::uint64_t trials = 0; // number of sign assignments visited
    double mean = 0.0;
    double second_moment = 0.0;
    double stderr_mean = 0.0;   // zero for the exhaustive method
    double stderr_second = 0.0; // zero for the exhaustive method
    double bound = 0.0;         // variance-theorem RHS with certified ||T||
    bool exhaustive = false;
    double norm_upper = 0.0; // the certified ||T|| upper bound used
    double alpha_value = 0.0;
};

/// Exact mean and second moment by full enumeration of the sign assignments
/// on the supporting intervals (signs outside the support cannot affect the
/// value). Means are accumulated with exact floating-point summation, so the
/// zero-mean identity holds exactly, not just to rounding.
/// Support of more than 14 intervals on either axis is rejected.
MomentReport exhaustive_moments(const OperatorMatrix& T, const CollectionFamily& xfam,
                                const CollectionFamily& yfam, PairingVariable variable,
                                const VariableIndices& idx, double norm_upper_hint = -1.0);

/// Monte Carlo moments with standard errors; deterministic for a fixed seed.
/// trace, when non-null, receives every sampled value in trial order.
MomentReport mc_moments(const OperatorMatrix& T, const CollectionFamily& xfam,
                        const CollectionFamily& yfam, PairingVariable variable,
                        const VariableIndices& idx, std::uint64_t trials, std::uint64_t seed,
                        std::vector<double>* trace = nullptr, double norm_upper_hint = -1.0);

/// All admissible index tuples for a variable over D_{<=n}.
std::vector<VariableIndices> admissible_tuples(PairingVariable variable, int n);

struct SignSearchReport {
    bool accepted = false;
    std::uint64_t attempts = 0;
    SignAssignment theta, eps; // populated when accepted
    double max_offdiag = 0.0;
    double max_diag_deviation = 0.0;
    double eta0 = 0.0;
};

/// Rejection sampling over uniform signs on the collection supports.
/// Acceptance: max_{R != R'} |<T b_R, b_{R'}>| <= eta0 and, for every block,
/// |<T b_R, b_R> - sum <T h_{KxL}, h_{KxL}>| <= eta0 (both non-strict).
/// When not accepted, the report carries the maxima of the best attempt.
/// attempt_trace, when non-null, receives max(offdiag, diag deviation) per
/// attempt.
SignSearchReport search_signs(const OperatorMatrix& T, const CollectionFamily& xfam,
                              const CollectionFamily& yfam, double eta0,
                              std::uint64_t max_attempts, std::uint64_t seed,
                              std::vector<double>* attempt_trace = nullptr);

} // namespace hardy
