#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hardy/errors.hpp"

namespace hardy {

/// Hard ceiling for interval levels; measures 2^-level stay exactly
/// representable and indices fit comfortably in 64 bits.
inline constexpr int kMaxIntervalLevel = 62;

/// Resolution ceiling for basis enumerations. Defaults to 6, can be raised
/// via the HARDY_FACTOR_MAX_N environment variable (read once).
int max_resolution();

/// Dyadic interval [index*2^-level, (index+1)*2^-level) inside [0,1).
/// Stored as integers; membership and disjointness are exact tests.
struct DyadicInterval {
    int level = 0;
    std::uint64_t index = 0;

    constexpr DyadicInterval() = default;
    DyadicInterval(int level_, std::uint64_t index_);

    friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
    /// Canonical order: (level, index) lexicographic.
    friend auto operator<=>(const DyadicInterval&, const DyadicInterval&) = default;
};

double measure(const DyadicInterval& I);

/// Left ("plus") and right ("minus") halves, both one level deeper.
struct SplitResult {
    DyadicInterval plus;
    DyadicInterval minus;
};
SplitResult split(const DyadicInterval& I);

bool contains(const DyadicInterval& outer, const DyadicInterval& inner);
bool disjoint(const DyadicInterval& a, const DyadicInterval& b);

/// Serialized as "level:index".
std::string to_string(const DyadicInterval& I);
DyadicInterval interval_from_string(const std::string& s);

struct DyadicRectangle {
    DyadicInterval x;
    DyadicInterval y;

    friend bool operator==(const DyadicRectangle&, const DyadicRectangle&) = default;
    /// Canonical order: (x.level, x.index, y.level, y.index) lexicographic.
    friend auto operator<=>(const DyadicRectangle&, const DyadicRectangle&) = default;
};

double measure(const DyadicRectangle& R);

/// Serialized as "n:k,m:j".
std::string to_string(const DyadicRectangle& R);
DyadicRectangle rectangle_from_string(const std::string& s);

/// Number of dyadic intervals of level <= N.
inline std::uint64_t interval_count(int N) { return (std::uint64_t{2} << N) - 1; }

/// Linear index of an interval in the canonical (level, index) order,
/// i.e. 2^level - 1 + index.
std::uint64_t interval_linear_index(const DyadicInterval& I);
DyadicInterval interval_from_linear_index(std::uint64_t li);

/// All intervals of exactly level n, in index order.
std::vector<DyadicInterval> level_intervals(int n);
/// All intervals of level <= N in canonical order.
std::vector<DyadicInterval> intervals_up_to(int N);

/// Canonical enumeration of the rectangles of resolution <= N.
/// Rectangle linear index = xi * d_N + yi with xi, yi interval linear indices.
struct BasisEnumeration {
    int resolution = 0;
    std::vector<DyadicRectangle> order;

    std::uint64_t d() const { return interval_count(resolution); }
    std::uint64_t size() const { return order.size(); }
    std::uint64_t index_of(const DyadicRectangle& R) const;
};

BasisEnumeration enumerate_basis(int N);

/// Tensor product {I x J : I in A, J in B}.
std::vector<DyadicRectangle> tensor(const std::vector<DyadicInterval>& A,
                                    const std::vector<DyadicInterval>& B);

} // namespace hardy
