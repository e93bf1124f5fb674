#include "hardy/collections.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>

namespace hardy {

CollectionFamily::CollectionFamily(int n, int N, double kappa_)
    : domain_resolution(n), target_resolution(N), kappa(kappa_) {
    if (n < 0 || N < n || N > max_resolution())
        throw Error(ErrorKind::resolution_exceeded, "collection family resolutions out of range");
    if (kappa < 1.0) throw Error(ErrorKind::config, "kappa must be >= 1");
    assignments.resize(interval_count(n));
}

const std::vector<DyadicInterval>& CollectionFamily::collection(const DyadicInterval& I) const {
    std::uint64_t li = interval_linear_index(I);
    if (I.level > domain_resolution || li >= assignments.size())
        throw Error(ErrorKind::incomplete_family, "no collection assigned to " + to_string(I));
    return assignments[li];
}

std::vector<DyadicInterval>& CollectionFamily::collection(const DyadicInterval& I) {
    std::uint64_t li = interval_linear_index(I);
    if (I.level > domain_resolution || li >= assignments.size())
        throw Error(ErrorKind::incomplete_family, "no collection assigned to " + to_string(I));
    return assignments[li];
}

void CollectionFamily::validate_complete() const {
    if (assignments.size() != interval_count(domain_resolution))
        throw Error(ErrorKind::incomplete_family, "assignment table has wrong size");
    for (std::uint64_t li = 0; li < assignments.size(); ++li) {
        if (assignments[li].empty())
            throw Error(ErrorKind::incomplete_family,
                        "empty collection for " + to_string(interval_from_linear_index(li)));
        for (const auto& K : assignments[li])
            if (K.level > target_resolution)
                throw Error(ErrorKind::resolution_exceeded,
                            "collection interval " + to_string(K) + " beyond target resolution");
    }
}

namespace {

/// Cell bitset on the 2^N grid; all measures are exact integer cell counts.
class CellSet {
public:
    explicit CellSet(int N) : grid_(std::uint64_t{1} << N), bits_((grid_ + 63) / 64, 0) {}

    void add_interval(const DyadicInterval& I, int N) {
        std::uint64_t lo = I.index << (N - I.level);
        std::uint64_t hi = (I.index + 1) << (N - I.level);
        for (std::uint64_t c = lo; c < hi; ++c) bits_[c >> 6] |= (std::uint64_t{1} << (c & 63));
    }

    std::uint64_t count() const {
        std::uint64_t n = 0;
        for (auto b : bits_) n += std::popcount(b);
        return n;
    }

    std::uint64_t intersection_count(const CellSet& o) const {
        std::uint64_t n = 0;
        for (std::size_t i = 0; i < bits_.size(); ++i) n += std::popcount(bits_[i] & o.bits_[i]);
        return n;
    }

    bool subset_of(const CellSet& o) const {
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] & ~o.bits_[i]) return false;
        return true;
    }

    std::uint64_t grid() const { return grid_; }

private:
    std::uint64_t grid_;
    std::vector<std::uint64_t> bits_;
};

std::uint64_t interval_cell_count(const DyadicInterval& I, int N) {
    return std::uint64_t{1} << (N - I.level);
}

std::uint64_t overlap_cells(const DyadicInterval& K, const CellSet& Z, int N) {
    CellSet k(N);
    k.add_interval(K, N);
    return k.intersection_count(Z);
}

struct FamilyCells {
    std::vector<CellSet> unions; // Z_I per linear index
};

FamilyCells build_unions(const CollectionFamily& fam) {
    FamilyCells fc;
    int N = fam.target_resolution;
    fc.unions.reserve(fam.assignments.size());
    for (const auto& coll : fam.assignments) {
        CellSet z(N);
        for (const auto& K : coll) z.add_interval(K, N);
        fc.unions.push_back(std::move(z));
    }
    return fc;
}

void add_violation(ConditionReport& rep, std::string cond, std::vector<std::string> witness,
                   double ratio, std::string detail) {
    rep.passed = false;
    rep.violations.push_back({std::move(cond), std::move(witness), ratio, std::move(detail)});
}

bool interval_sets_intersect(const std::vector<DyadicInterval>& a,
                             const std::vector<DyadicInterval>& b, DyadicInterval* shared) {
    std::set<DyadicInterval> sa(a.begin(), a.end());
    for (const auto& K : b)
        if (sa.count(K)) {
            if (shared) *shared = K;
            return true;
        }
    return false;
}

// Axis checks shared by (J1)..(J4) and the per-axis halves of (P2)..(P4).
// Tags come from the caller so the same enumeration serves both reports.
void check_axis_disjointness(const CollectionFamily& fam, const char* tag_internal,
                             const char* tag_cross, ConditionReport& rep) {
    auto intervals = intervals_up_to(fam.domain_resolution);
    for (const auto& I : intervals) {
        const auto& coll = fam.collection(I);
        for (std::size_t i = 0; i < coll.size(); ++i)
            for (std::size_t j = i + 1; j < coll.size(); ++j)
                if (!disjoint(coll[i], coll[j]))
                    add_violation(rep, tag_internal,
                                  {to_string(I), to_string(coll[i]), to_string(coll[j])}, 0.0,
                                  "collection intervals overlap");
    }
    for (std::size_t a = 0; a < intervals.size(); ++a)
        for (std::size_t b = a + 1; b < intervals.size(); ++b) {
            DyadicInterval shared;
            if (interval_sets_intersect(fam.collection(intervals[a]),
                                        fam.collection(intervals[b]), &shared))
                add_violation(rep, tag_cross,
                              {to_string(intervals[a]), to_string(intervals[b]), to_string(shared)},
                              0.0, "collections share an interval");
        }
}

void check_axis_measure_bounds(const CollectionFamily& fam, const FamilyCells& fc, double kappa,
                               const char* tag, ConditionReport& rep) {
    int N = fam.target_resolution;
    auto intervals = intervals_up_to(fam.domain_resolution);
    double grid = std::ldexp(1.0, N);
    for (const auto& I : intervals) {
        double zI = static_cast<double>(fc.unions[interval_linear_index(I)].count()) / grid;
        double mI = measure(I);
        if (!(zI * kappa >= mI) || !(zI <= kappa * mI))
            add_violation(rep, tag, {to_string(I)}, zI / mI,
                          "union measure not within kappa of |I|");
    }
}

void check_axis_density(const CollectionFamily& fam, const FamilyCells& fc, double kappa,
                        const char* tag, ConditionReport& rep) {
    int N = fam.target_resolution;
    auto intervals = intervals_up_to(fam.domain_resolution);
    for (const auto& I : intervals) {
        const auto& collI = fam.collection(I);
        std::uint64_t zI = fc.unions[interval_linear_index(I)].count();
        if (zI == 0) continue; // reported by the measure bound already
        for (const auto& I0 : intervals) {
            if (!contains(I, I0)) continue;
            const CellSet& z0 = fc.unions[interval_linear_index(I0)];
            std::uint64_t z0count = z0.count();
            for (const auto& K : collI) {
                std::uint64_t kc = interval_cell_count(K, N);
                std::uint64_t ov = overlap_cells(K, z0, N);
                // |K cap Z_{I0}| / |K| >= kappa^{-1} |Z_{I0}| / |Z_I|,
                // cross-multiplied over exact integer cell counts.
                double lhs = static_cast<double>(ov) * static_cast<double>(zI);
                double rhs = static_cast<double>(z0count) * static_cast<double>(kc) / kappa;
                if (lhs < rhs) {
                    double ratio = z0count ? (static_cast<double>(ov) / kc) /
                                                 (static_cast<double>(z0count) / zI)
                                           : 0.0;
                    add_violation(rep, tag, {to_string(I0), to_string(I), to_string(K)}, ratio,
                                  "local density below kappa^{-1}");
                }
            }
        }
    }
}

} // namespace

ConditionReport check_jones(const CollectionFamily& fam) {
    fam.validate_complete();
    ConditionReport rep;
    const FamilyCells fc = build_unions(fam);
    const int n = fam.domain_resolution;

    check_axis_disjointness(fam, "J1", "J1", rep);

    // (J2): union nesting under halving, for every I whose children are in
    // the domain.
    for (const auto& I : intervals_up_to(n)) {
        if (I.level >= n) continue;
        auto [plus, minus] = split(I);
        const CellSet& zI = fc.unions[interval_linear_index(I)];
        const CellSet& zp = fc.unions[interval_linear_index(plus)];
        const CellSet& zm = fc.unions[interval_linear_index(minus)];
        if (!zp.subset_of(zI) || !zm.subset_of(zI))
            add_violation(rep, "J2", {to_string(I)}, 0.0, "children unions escape Z_I");
        if (zp.intersection_count(zm) != 0)
            add_violation(rep, "J2", {to_string(I)},
                          static_cast<double>(zp.intersection_count(zm)),
                          "children unions overlap");
    }

    check_axis_measure_bounds(fam, fc, fam.kappa, "J3", rep);
    check_axis_density(fam, fc, fam.kappa, "J4", rep);
    return rep;
}

ConditionReport check_capon(const CollectionFamily& xfam, const CollectionFamily& yfam) {
    xfam.validate_complete();
    yfam.validate_complete();
    if (xfam.domain_resolution != yfam.domain_resolution)
        throw Error(ErrorKind::dimension_mismatch, "families have different domain resolutions");
    ConditionReport rep;
    const double C = std::max(xfam.kappa, yfam.kappa);
    const FamilyCells xc = build_unions(xfam);
    const FamilyCells yc = build_unions(yfam);
    const int n = xfam.domain_resolution;
    auto intervals = intervals_up_to(n);

    // (P1): product collections are internally disjoint and pairwise disjoint
    // as rectangle sets. B_{R0} and B_{R1} share a rectangle iff both axis
    // collections share an interval.
    check_axis_disjointness(xfam, "P1", "P1", rep);
    check_axis_disjointness(yfam, "P1", "P1", rep);
    for (const auto& I0 : intervals)
        for (const auto& I1 : intervals) {
            bool xshare = (I0 == I1) ||
                          interval_sets_intersect(xfam.collection(I0), xfam.collection(I1), nullptr);
            if (!xshare) continue;
            for (const auto& J0 : intervals)
                for (const auto& J1 : intervals) {
                    if (I0 == I1 && J0 == J1) continue;
                    if (std::tie(I0, J0) > std::tie(I1, J1)) continue;
                    if (interval_sets_intersect(yfam.collection(J0), yfam.collection(J1), nullptr))
                        add_violation(rep, "P1",
                                      {to_string(DyadicRectangle{I0, J0}),
                                       to_string(DyadicRectangle{I1, J1})},
                                      0.0, "product collections share a rectangle");
                }
        }

    // (P2): disjoint unions nest. Enumerate I0, I1 disjoint with I0 u I1 in I.
    auto check_p2_axis = [&](const FamilyCells& fc) {
        for (const auto& I0 : intervals)
            for (const auto& I1 : intervals) {
                if (!(I0 < I1) || !disjoint(I0, I1)) continue;
                const CellSet& z0 = fc.unions[interval_linear_index(I0)];
                const CellSet& z1 = fc.unions[interval_linear_index(I1)];
                bool disjoint_unions = z0.intersection_count(z1) == 0;
                if (!disjoint_unions)
                    add_violation(rep, "P2", {to_string(I0), to_string(I1)}, 0.0,
                                  "unions of disjoint intervals overlap");
                for (const auto& I : intervals) {
                    if (!contains(I, I0) || !contains(I, I1)) continue;
                    const CellSet& zI = fc.unions[interval_linear_index(I)];
                    if (!z0.subset_of(zI) || !z1.subset_of(zI))
                        add_violation(rep, "P2", {to_string(I0), to_string(I1), to_string(I)}, 0.0,
                                      "unions escape the containing union");
                }
            }
    };
    check_p2_axis(xc);
    check_p2_axis(yc);

    check_axis_measure_bounds(xfam, xc, C, "P3", rep);
    check_axis_measure_bounds(yfam, yc, C, "P3", rep);
    check_axis_density(xfam, xc, C, "P4", rep);
    check_axis_density(yfam, yc, C, "P4", rep);
    return rep;
}

std::pair<CollectionFamily, CollectionFamily> gamlen_gaudet(int n, int m0,
                                                            int ambient_resolution) {
    if (n < 0 || m0 < 0) throw Error(ErrorKind::config, "gamlen_gaudet: n, m0 must be >= 0");
    int reach = m0 + n;
    int N = ambient_resolution < 0 ? reach : ambient_resolution;
    if (reach > N || N > max_resolution())
        throw Error(ErrorKind::resolution_exceeded,
                    "gamlen_gaudet: m0 + n = " + std::to_string(reach) +
                        " exceeds resolution " + std::to_string(N));

    CollectionFamily fam(n, N, 1.0);
    fam.collection(DyadicInterval(0, 0)) = level_intervals(m0);
    for (int k = 0; k < n; ++k) {
        for (const auto& I : level_intervals(k)) {
            const auto& parent = fam.collection(I);
            auto [ip, im] = split(I);
            auto& plus_coll = fam.collection(ip);
            auto& minus_coll = fam.collection(im);
            plus_coll.reserve(parent.size());
            minus_coll.reserve(parent.size());
            for (const auto& K : parent) {
                auto [kp, km] = split(K);
                plus_coll.push_back(kp);
                minus_coll.push_back(km);
            }
        }
    }
    return {fam, fam};
}

double alpha(const CollectionFamily& xfam, const CollectionFamily& yfam) {
    double a = 0.0;
    for (const auto* fam : {&xfam, &yfam})
        for (const auto& coll : fam->assignments)
            for (const auto& K : coll) a = std::max(a, measure(K));
    if (a == 0.0) throw Error(ErrorKind::incomplete_family, "alpha of empty families");
    return a;
}

double min_kappa(const CollectionFamily& fam) {
    fam.validate_complete();
    const FamilyCells fc = build_unions(fam);
    const int N = fam.target_resolution;
    auto intervals = intervals_up_to(fam.domain_resolution);
    double grid = std::ldexp(1.0, N);
    double k = 1.0;
    for (const auto& I : intervals) {
        double zI = static_cast<double>(fc.unions[interval_linear_index(I)].count()) / grid;
        if (zI == 0.0) return std::numeric_limits<double>::infinity();
        double mI = measure(I);
        k = std::max({k, mI / zI, zI / mI});
    }
    for (const auto& I : intervals) {
        const auto& collI = fam.collection(I);
        double zI = static_cast<double>(fc.unions[interval_linear_index(I)].count());
        for (const auto& I0 : intervals) {
            if (!contains(I, I0)) continue;
            const CellSet& z0 = fc.unions[interval_linear_index(I0)];
            double z0count = static_cast<double>(z0.count());
            for (const auto& K : collI) {
                double kc = static_cast<double>(interval_cell_count(K, N));
                double ov = static_cast<double>(overlap_cells(K, z0, N));
                if (ov == 0.0 && z0count > 0.0)
                    return std::numeric_limits<double>::infinity();
                if (ov > 0.0) k = std::max(k, (z0count * kc) / (ov * zI));
            }
        }
    }
    return k;
}

} // namespace hardy
