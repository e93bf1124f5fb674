#pragma once

#include <string>
#include <vector>

#include "hardy/dyadic.hpp"

namespace hardy {

/// The map I -> X_I assigning a finite collection of dyadic intervals (inside
/// resolution target_resolution) to every interval of level <= domain_resolution.
/// Assignments are indexed by interval_linear_index; an empty collection means
/// "missing" and is rejected by the checkers.
struct CollectionFamily {
    int domain_resolution = 0; // n
    int target_resolution = 0; // N
    double kappa = 1.0;
    std::vector<std::vector<DyadicInterval>> assignments;

    CollectionFamily() = default;
    CollectionFamily(int n, int N, double kappa_);

    const std::vector<DyadicInterval>& collection(const DyadicInterval& I) const;
    std::vector<DyadicInterval>& collection(const DyadicInterval& I);

    /// Throws incomplete-family if any interval of level <= n has no
    /// assignment or an assigned interval exceeds target_resolution.
    void validate_complete() const;
};

struct Violation {
    std::string condition;            // "J1".."J4" or "P1".."P4"
    std::vector<std::string> witness; // serialized intervals / rectangles
    double ratio = 0.0;               // measured quantity behind the failure
    std::string detail;
};

struct ConditionReport {
    bool passed = true;
    std::vector<Violation> violations;
};

/// Verifies (J1) disjointness within and across collections, (J2) nesting of
/// the unions under halving, (J3) the two-sided measure comparability with
/// constant kappa, and (J4) the local density inequality, by brute-force
/// enumeration of every participating tuple. Set measures are integer cell
/// counts on the target-resolution grid, so the inequalities are exact.
ConditionReport check_jones(const CollectionFamily& fam);

/// Verifies the local product conditions (P1)-(P4) for the product collections
/// X_I (x) Y_J, with constants C_X = C_Y = max of the two kappas.
ConditionReport check_capon(const CollectionFamily& xfam, const CollectionFamily& yfam);

/// The halving construction: X_{[0,1)} = D_{m0} and X_{I+-} = {K+- : K in X_I}.
/// Both returned families are defined on levels <= n, reach exactly level
/// m0 + n, and satisfy the Jones condition with kappa = 1.
/// ambient_resolution (default m0+n) sets target_resolution for both.
std::pair<CollectionFamily, CollectionFamily> gamlen_gaudet(int n, int m0,
                                                            int ambient_resolution = -1);

/// Largest interval measure appearing in either family (the quantity that
/// controls all second-moment bounds).
double alpha(const CollectionFamily& xfam, const CollectionFamily& yfam);

/// Smallest constant that would pass (J3) and (J4); +infinity when (J4) has a
/// zero-overlap witness. Always >= 1.
double min_kappa(const CollectionFamily& fam);

} // namespace hardy
