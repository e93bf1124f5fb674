#include "hardy/haar_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "hardy/kernels.hpp"
#include "hardy/rng.hpp"

namespace hardy {

ExponentPair::ExponentPair(double p_, double q_) : p(p_), q(q_) {
    if (!(p >= 1.0) || !(q >= 1.0) || !std::isfinite(p) || !std::isfinite(q))
        throw Error(ErrorKind::config, "exponents must be finite and >= 1");
}

double ExponentPair::p_dual() const {
    return p == 1.0 ? std::numeric_limits<double>::infinity() : p / (p - 1.0);
}

double ExponentPair::q_dual() const {
    return q == 1.0 ? std::numeric_limits<double>::infinity() : q / (q - 1.0);
}

HardyElement::HardyElement(int N) : resolution(N) {
    std::uint64_t d = interval_count(N);
    coefficients.assign(d * d, 0.0);
}

namespace {

int haar_eval_1d(const DyadicInterval& I, int cell_resolution, std::uint64_t cell_index) {
    if (cell_resolution < I.level + 1)
        throw Error(ErrorKind::resolution_exceeded,
                    "cell resolution too coarse for interval level " + std::to_string(I.level));
    int shift = cell_resolution - I.level;
    if ((cell_index >> shift) != I.index) return 0;
    return ((cell_index >> (shift - 1)) & 1) ? -1 : 1; // left half +1, right half -1
}

} // namespace

int haar_eval(const DyadicRectangle& R, const GridCell& cell) {
    int vx = haar_eval_1d(R.x, cell.resolution, cell.ix);
    if (vx == 0) return 0;
    int vy = haar_eval_1d(R.y, cell.resolution, cell.iy);
    return vx * vy;
}

const std::vector<double>& measure_weights(int N) {
    static std::map<int, std::vector<double>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(N);
    if (it != cache.end()) return it->second;
    std::uint64_t d = interval_count(N);
    std::vector<double> w(d * d);
    auto intervals = intervals_up_to(N);
    for (std::uint64_t xi = 0; xi < d; ++xi) {
        double mx = measure(intervals[xi]);
        for (std::uint64_t yi = 0; yi < d; ++yi) w[xi * d + yi] = mx * measure(intervals[yi]);
    }
    return cache.emplace(N, std::move(w)).first->second;
}

double l2_inner(const HardyElement& f, const HardyElement& g) {
    if (f.resolution != g.resolution)
        throw Error(ErrorKind::dimension_mismatch, "l2_inner: resolution mismatch");
    const auto& w = measure_weights(f.resolution);
    return kernels::ops().weighted_dot(f.coefficients.data(), g.coefficients.data(), w.data(),
                                       w.size());
}

double mixed_norm(const HardyElement& f, const ExponentPair& e) {
    const int N = f.resolution;
    const std::uint64_t d = interval_count(N);
    const std::uint64_t grid = std::uint64_t{1} << N;
    const double cell_measure = std::ldexp(1.0, -N);
    const auto& k = kernels::ops();

    std::vector<double> a2(f.coefficients.size());
    for (std::size_t i = 0; i < a2.size(); ++i) a2[i] = f.coefficients[i] * f.coefficients[i];

    // Per x-cell: build the row S^2(x, .) by accumulating, for each level
    // pair (lx, ly), the squared coefficients of the rectangles containing
    // the cell. Each level-ly coefficient is constant on a span of
    // 2^(N-ly) grid cells.
    std::vector<double> row(grid);
    std::vector<double> inner(grid);
    for (std::uint64_t i = 0; i < grid; ++i) {
        std::fill(row.begin(), row.end(), 0.0);
        for (int lx = 0; lx <= N; ++lx) {
            std::uint64_t kx = i >> (N - lx);
            std::uint64_t xi = (std::uint64_t{1} << lx) - 1 + kx;
            const double* base = a2.data() + xi * d;
            for (int ly = 0; ly <= N; ++ly) {
                const double* c = base + ((std::uint64_t{1} << ly) - 1);
                std::uint64_t span = std::uint64_t{1} << (N - ly);
                if (span == 1) {
                    k.axpy(1.0, c, row.data(), grid);
                } else {
                    std::uint64_t blocks = std::uint64_t{1} << ly;
                    for (std::uint64_t ky = 0; ky < blocks; ++ky)
                        if (c[ky] != 0.0) k.add_const(c[ky], row.data() + ky * span, span);
                }
            }
        }
        inner[i] = k.pow_sum(row.data(), e.q / 2.0, grid) * cell_measure;
    }
    double outer = k.pow_sum(inner.data(), e.p / e.q, grid) * cell_measure;
    return std::pow(outer, 1.0 / e.p);
}

namespace {

double disjoint_total_measure(const std::vector<DyadicInterval>& xs, const char* which) {
    if (xs.empty()) throw Error(ErrorKind::config, std::string(which) + " collection is empty");
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = i + 1; j < xs.size(); ++j)
            if (!disjoint(xs[i], xs[j]))
                throw Error(ErrorKind::disjointness, std::string(which) + " collection overlaps: " +
                                                         to_string(xs[i]) + " vs " +
                                                         to_string(xs[j]));
        total += measure(xs[i]);
    }
    return total;
}

} // namespace

double block_norm_closed_form(const std::vector<DyadicInterval>& X,
                              const std::vector<DyadicInterval>& Y, const ExponentPair& e,
                              Side side) {
    double mx = disjoint_total_measure(X, "X");
    double my = disjoint_total_measure(Y, "Y");
    if (side == Side::primal) return std::pow(mx, 1.0 / e.p) * std::pow(my, 1.0 / e.q);
    return std::pow(mx, e.inv_p_dual()) * std::pow(my, e.inv_q_dual());
}

HardyElement block_element(const std::vector<DyadicInterval>& X,
                           const std::vector<DyadicInterval>& Y, const std::vector<int>& xsigns,
                           const std::vector<int>& ysigns, int N) {
    if (xsigns.size() != X.size() || ysigns.size() != Y.size())
        throw Error(ErrorKind::config, "sign vectors must match collection sizes");
    HardyElement b(N);
    std::uint64_t d = interval_count(N);
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i].level > N) throw Error(ErrorKind::resolution_exceeded, "block interval too fine");
        std::uint64_t xi = interval_linear_index(X[i]);
        for (std::size_t j = 0; j < Y.size(); ++j) {
            if (Y[j].level > N)
                throw Error(ErrorKind::resolution_exceeded, "block interval too fine");
            b.coefficients[xi * d + interval_linear_index(Y[j])] =
                static_cast<double>(xsigns[i] * ysigns[j]);
        }
    }
    return b;
}

double dual_norm_lower_bound(const HardyElement& f, const ExponentPair& e, int trials,
                             std::uint64_t seed) {
    if (trials < 1) throw Error(ErrorKind::config, "dual_norm_lower_bound: trials must be >= 1");
    bool zero = true;
    for (double c : f.coefficients)
        if (c != 0.0) {
            zero = false;
            break;
        }
    if (zero) return 0.0;

    const auto& w = measure_weights(f.resolution);
    auto ratio = [&](const HardyElement& h) -> double {
        double denom = mixed_norm(h, e);
        if (denom == 0.0) return 0.0;
        double pairing =
            kernels::ops().weighted_dot(f.coefficients.data(), h.coefficients.data(), w.data(),
                                        w.size());
        return pairing / denom;
    };

    // The self-pairing candidate attains the closed-form dual norm for block
    // functions; always test it first.
    double best = ratio(f);

    Rng rng = Rng(seed).child("dual-lb");
    std::uint64_t dim = f.dim();
    for (int t = 0; t < trials; ++t) {
        Rng r = rng.child(static_cast<std::uint64_t>(t));
        HardyElement h(f.resolution);
        std::uint64_t nnz = 1 + r.below(std::min<std::uint64_t>(dim, 8));
        for (std::uint64_t s = 0; s < nnz; ++s)
            h.coefficients[r.below(dim)] = static_cast<double>(r.sign());
        best = std::max(best, ratio(h));
    }
    return best;
}

} // namespace hardy
