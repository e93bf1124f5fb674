#include "hardy/dyadic.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace hardy {

int max_resolution() {
    static const int cached = [] {
        if (const char* env = std::getenv("HARDY_FACTOR_MAX_N")) {
            int v = std::atoi(env);
            if (v >= 0 && v <= 20) return v;
        }
        return 6;
    }();
    return cached;
}

DyadicInterval::DyadicInterval(int level_, std::uint64_t index_) : level(level_), index(index_) {
    if (level < 0 || level > kMaxIntervalLevel)
        throw Error(ErrorKind::resolution_exceeded,
                    "interval level " + std::to_string(level_) + " out of range");
    if (index >= (std::uint64_t{1} << level))
        throw Error(ErrorKind::config, "interval index " + std::to_string(index_) +
                                           " out of range for level " + std::to_string(level_));
}

double measure(const DyadicInterval& I) { return std::ldexp(1.0, -I.level); }
double measure(const DyadicRectangle& R) { return measure(R.x) * measure(R.y); }

SplitResult split(const DyadicInterval& I) {
    if (I.level >= kMaxIntervalLevel)
        throw Error(ErrorKind::resolution_exceeded, "cannot split interval at level " +
                                                        std::to_string(I.level));
    return {DyadicInterval(I.level + 1, 2 * I.index), DyadicInterval(I.level + 1, 2 * I.index + 1)};
}

bool contains(const DyadicInterval& outer, const DyadicInterval& inner) {
    if (inner.level < outer.level) return false;
    return (inner.index >> (inner.level - outer.level)) == outer.index;
}

bool disjoint(const DyadicInterval& a, const DyadicInterval& b) {
    return !contains(a, b) && !contains(b, a);
}

std::string to_string(const DyadicInterval& I) {
    return std::to_string(I.level) + ":" + std::to_string(I.index);
}

namespace {

std::uint64_t parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(ErrorKind::config, "bad integer in interval string: " + std::string(s));
    return v;
}

} // namespace

DyadicInterval interval_from_string(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos)
        throw Error(ErrorKind::config, "bad interval string: " + s);
    std::uint64_t level = parse_u64(std::string_view(s).substr(0, colon));
    std::uint64_t index = parse_u64(std::string_view(s).substr(colon + 1));
    if (level > kMaxIntervalLevel)
        throw Error(ErrorKind::resolution_exceeded, "interval level too large: " + s);
    return DyadicInterval(static_cast<int>(level), index);
}

std::string to_string(const DyadicRectangle& R) {
    return to_string(R.x) + "," + to_string(R.y);
}

DyadicRectangle rectangle_from_string(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos)
        throw Error(ErrorKind::config, "bad rectangle string: " + s);
    return {interval_from_string(s.substr(0, comma)), interval_from_string(s.substr(comma + 1))};
}

std::uint64_t interval_linear_index(const DyadicInterval& I) {
    return (std::uint64_t{1} << I.level) - 1 + I.index;
}

DyadicInterval interval_from_linear_index(std::uint64_t li) {
    int level = 0;
    while ((std::uint64_t{2} << level) - 1 <= li) ++level;
    return DyadicInterval(level, li - ((std::uint64_t{1} << level) - 1));
}

std::vector<DyadicInterval> level_intervals(int n) {
    std::vector<DyadicInterval> out;
    out.reserve(std::uint64_t{1} << n);
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) out.emplace_back(n, k);
    return out;
}

std::vector<DyadicInterval> intervals_up_to(int N) {
    std::vector<DyadicInterval> out;
    out.reserve(interval_count(N));
    for (int n = 0; n <= N; ++n)
        for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) out.emplace_back(n, k);
    return out;
}

std::uint64_t BasisEnumeration::index_of(const DyadicRectangle& R) const {
    return interval_linear_index(R.x) * d() + interval_linear_index(R.y);
}

BasisEnumeration enumerate_basis(int N) {
    if (N < 0 || N > max_resolution())
        throw Error(ErrorKind::resolution_exceeded,
                    "resolution " + std::to_string(N) + " exceeds maximum " +
                        std::to_string(max_resolution()));
    BasisEnumeration e;
    e.resolution = N;
    auto intervals = intervals_up_to(N);
    e.order.reserve(intervals.size() * intervals.size());
    for (const auto& I : intervals)
        for (const auto& J : intervals) e.order.push_back({I, J});
    return e;
}

std::vector<DyadicRectangle> tensor(const std::vector<DyadicInterval>& A,
                                    const std::vector<DyadicInterval>& B) {
    std::vector<DyadicRectangle> out;
    out.reserve(A.size() * B.size());
    for (const auto& I : A)
        for (const auto& J : B) out.push_back({I, J});
    return out;
}

} // namespace hardy
