#include "hardy/randomization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hardy/exact_sum.hpp"
#include "hardy/parallel.hpp"
#include "hardy/rng.hpp"

namespace hardy {

const char* pairing_variable_name(PairingVariable v) {
    switch (v) {
        case PairingVariable::W: return "W";
        case PairingVariable::X: return "X";
        case PairingVariable::Y: return "Y";
        case PairingVariable::Z: return "Z";
    }
    return "?";
}

PairingVariable pairing_variable_from_name(const std::string& name) {
    if (name == "W") return PairingVariable::W;
    if (name == "X") return PairingVariable::X;
    if (name == "Y") return PairingVariable::Y;
    if (name == "Z") return PairingVariable::Z;
    throw Error(ErrorKind::config, "unknown pairing variable: " + name);
}

namespace {

/// Gram entries of T restricted to a pair of blocks:
/// g[(k2*nl2+l2)*(nk*nl) + k*nl+l] = <T h_{K_k x L_l}, h_{K'_{k2} x L'_{l2}}>.
struct PairingTable {
    std::size_t nk = 0, nl = 0, nk2 = 0, nl2 = 0;
    std::vector<double> g;
    std::vector<std::uint64_t> kx, ly, kx2, ly2; // interval linear indices
    double diag_sum = 0.0; // sum of g[(k,l),(k,l)] when left == right block

    double eval(const double* tsign, const double* esign) const {
        double v = 0.0;
        const std::size_t left = nk * nl;
        for (std::size_t k2 = 0; k2 < nk2; ++k2) {
            double sk2 = tsign[kx2[k2]];
            for (std::size_t l2 = 0; l2 < nl2; ++l2) {
                const double* row = g.data() + (k2 * nl2 + l2) * left;
                double inner = 0.0;
                for (std::size_t k = 0; k < nk; ++k) {
                    double sk = tsign[kx[k]];
                    for (std::size_t l = 0; l < nl; ++l)
                        inner += sk * esign[ly[l]] * row[k * nl + l];
                }
                v += sk2 * esign[ly2[l2]] * inner;
            }
        }
        return v;
    }
};

PairingTable build_table(const OperatorMatrix& T, const std::vector<DyadicInterval>& X,
                         const std::vector<DyadicInterval>& Y,
                         const std::vector<DyadicInterval>& X2,
                         const std::vector<DyadicInterval>& Y2) {
    const std::uint64_t dN = interval_count(T.domain.resolution);
    PairingTable t;
    t.nk = X.size();
    t.nl = Y.size();
    t.nk2 = X2.size();
    t.nl2 = Y2.size();
    auto lin = [](const std::vector<DyadicInterval>& v) {
        std::vector<std::uint64_t> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = interval_linear_index(v[i]);
        return out;
    };
    t.kx = lin(X);
    t.ly = lin(Y);
    t.kx2 = lin(X2);
    t.ly2 = lin(Y2);
    t.g.resize(t.nk * t.nl * t.nk2 * t.nl2);
    const std::size_t left = t.nk * t.nl;
    for (std::size_t k2 = 0; k2 < t.nk2; ++k2)
        for (std::size_t l2 = 0; l2 < t.nl2; ++l2) {
            std::uint64_t row_q = t.kx2[k2] * dN + t.ly2[l2];
            double* row = t.g.data() + (k2 * t.nl2 + l2) * left;
            for (std::size_t k = 0; k < t.nk; ++k)
                for (std::size_t l = 0; l < t.nl; ++l)
                    row[k * t.nl + l] = T.gram(row_q, t.kx[k] * dN + t.ly[l]);
        }
    if (t.nk == t.nk2 && t.nl == t.nl2 && t.kx == t.kx2 && t.ly == t.ly2) {
        for (std::size_t k = 0; k < t.nk; ++k)
            for (std::size_t l = 0; l < t.nl; ++l)
                t.diag_sum += t.g[(k * t.nl + l) * left + k * t.nl + l];
    }
    return t;
}

VariableIndices normalize_indices(PairingVariable variable, VariableIndices idx, int n) {
    auto require_domain = [n](const DyadicInterval& I, const char* name) {
        if (I.level > n)
            throw Error(ErrorKind::config,
                        std::string("index ") + name + " outside the block domain");
    };
    switch (variable) {
        case PairingVariable::W:
            if (idx.I == idx.I2 || idx.J == idx.J2)
                throw Error(ErrorKind::config, "W requires I != I' and J != J'");
            break;
        case PairingVariable::X:
            if (idx.I == idx.I2) throw Error(ErrorKind::config, "X requires I != I'");
            idx.J2 = idx.J;
            break;
        case PairingVariable::Y:
            if (idx.J == idx.J2) throw Error(ErrorKind::config, "Y requires J != J'");
            idx.I2 = idx.I;
            break;
        case PairingVariable::Z:
            idx.I2 = idx.I;
            idx.J2 = idx.J;
            break;
    }
    require_domain(idx.I, "I");
    require_domain(idx.I2, "I'");
    require_domain(idx.J, "J");
    require_domain(idx.J2, "J'");
    return idx;
}

struct SignBuffers {
    std::vector<double> theta, eps; // per interval linear index at resolution N
    explicit SignBuffers(int N)
        : theta(interval_count(N), 1.0), eps(interval_count(N), 1.0) {}

    void load(const SignAssignment& th, const SignAssignment& ep) {
        for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = th.values[i];
        for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = ep.values[i];
    }
};

std::vector<std::uint64_t> sorted_support(std::vector<std::uint64_t> v, const char* axis) {
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) != v.end())
        throw Error(ErrorKind::disjointness,
                    std::string("collections share an interval on the ") + axis + " axis");
    return v;
}

double variance_coefficient(PairingVariable v) {
    switch (v) {
        case PairingVariable::W: return 1.0;
        case PairingVariable::X: return 4.0;
        case PairingVariable::Y: return 4.0;
        case PairingVariable::Z: return 12.0;
    }
    return 0.0;
}

void fill_bound(MomentReport& rep, const OperatorMatrix& T, const CollectionFamily& xfam,
                const CollectionFamily& yfam, double norm_upper_hint) {
    rep.alpha_value = alpha(xfam, yfam);
    rep.norm_upper =
        norm_upper_hint >= 0.0 ? norm_upper_hint : certified_norm_upper(T, T.domain.exponents);
    rep.bound = variance_coefficient(rep.variable) * rep.norm_upper * rep.norm_upper *
                std::sqrt(rep.alpha_value);
}

struct VariableSetup {
    PairingTable table;
    std::vector<std::uint64_t> tsupport, esupport; // sorted linear indices
};

VariableSetup setup_variable(const OperatorMatrix& T, const CollectionFamily& xfam,
                             const CollectionFamily& yfam, PairingVariable variable,
                             const VariableIndices& idx) {
    if (T.domain.resolution != xfam.target_resolution ||
        T.domain.resolution != yfam.target_resolution)
        throw Error(ErrorKind::dimension_mismatch,
                    "operator resolution does not match the families");
    const auto& X = xfam.collection(idx.I);
    const auto& X2 = xfam.collection(idx.I2);
    const auto& Y = yfam.collection(idx.J);
    const auto& Y2 = yfam.collection(idx.J2);
    VariableSetup s;
    s.table = build_table(T, X, Y, X2, Y2);
    std::vector<std::uint64_t> ts = s.table.kx;
    if (idx.I != idx.I2) ts.insert(ts.end(), s.table.kx2.begin(), s.table.kx2.end());
    std::vector<std::uint64_t> es = s.table.ly;
    if (idx.J != idx.J2) es.insert(es.end(), s.table.ly2.begin(), s.table.ly2.end());
    s.tsupport = sorted_support(std::move(ts), "x");
    s.esupport = sorted_support(std::move(es), "y");
    (void)variable;
    return s;
}

void apply_mask(const std::vector<std::uint64_t>& support, std::uint64_t mask,
                std::vector<double>& signs) {
    for (std::size_t b = 0; b < support.size(); ++b)
        signs[support[b]] = (mask >> b) & 1 ? -1.0 : 1.0;
}

void reset_support(const std::vector<std::uint64_t>& support, std::vector<double>& signs) {
    for (auto li : support) signs[li] = 1.0;
}

} // namespace

double eval_rv(const OperatorMatrix& T, const CollectionFamily& xfam,
               const CollectionFamily& yfam, const SignAssignment& theta,
               const SignAssignment& eps, PairingVariable variable, const VariableIndices& raw) {
    VariableIndices idx = normalize_indices(variable, raw, xfam.domain_resolution);
    VariableSetup s = setup_variable(T, xfam, yfam, variable, idx);
    SignBuffers buf(T.domain.resolution);
    buf.load(theta, eps);
    double v = s.table.eval(buf.theta.data(), buf.eps.data());
    if (variable == PairingVariable::Z) v -= s.table.diag_sum;
    return v;
}

std::vector<VariableIndices> admissible_tuples(PairingVariable variable, int n) {
    auto intervals = intervals_up_to(n);
    std::vector<VariableIndices> out;
    for (const auto& I : intervals)
        for (const auto& J : intervals) {
            switch (variable) {
                case PairingVariable::W:
                    for (const auto& I2 : intervals) {
                        if (I2 == I) continue;
                        for (const auto& J2 : intervals)
                            if (!(J2 == J)) out.push_back({I, I2, J, J2});
                    }
                    break;
                case PairingVariable::X:
                    for (const auto& I2 : intervals)
                        if (!(I2 == I)) out.push_back({I, I2, J, J});
                    break;
                case PairingVariable::Y:
                    for (const auto& J2 : intervals)
                        if (!(J2 == J)) out.push_back({I, I, J, J2});
                    break;
                case PairingVariable::Z:
                    out.push_back({I, I, J, J});
                    break;
            }
        }
    return out;
}

MomentReport exhaustive_moments(const OperatorMatrix& T, const CollectionFamily& xfam,
                                const CollectionFamily& yfam, PairingVariable variable,
                                const VariableIndices& raw, double norm_upper_hint) {
    VariableIndices idx = normalize_indices(variable, raw, xfam.domain_resolution);
    VariableSetup s = setup_variable(T, xfam, yfam, variable, idx);
    const PairingTable& t = s.table;
    const std::size_t st = s.tsupport.size();
    const std::size_t se = s.esupport.size();
    if (st > 14 || se > 14)
        throw Error(ErrorKind::enumeration_cap,
                    "sign support too large for exhaustive enumeration (" + std::to_string(st) +
                        " x, " + std::to_string(se) + " y)");

    const int N = T.domain.resolution;
    SignBuffers buf(N);
    ExactSum mean_acc, m2_acc;
    const std::uint64_t tcount = std::uint64_t{1} << st;
    const std::uint64_t ecount = std::uint64_t{1} << se;
    const std::size_t left = t.nk * t.nl;

    if (variable == PairingVariable::Y) {
        // theta outer, eps inner: in Y the two eps index groups come from the
        // disjoint collections Y_J and Y_{J'}, so every inner contribution
        // theta-quad * eps-pair is balanced over the eps cube.
        std::vector<double> u(t.nl2 * t.nl);
        for (std::uint64_t tm = 0; tm < tcount; ++tm) {
            apply_mask(s.tsupport, tm, buf.theta);
            for (std::size_t l2 = 0; l2 < t.nl2; ++l2)
                for (std::size_t l = 0; l < t.nl; ++l) {
                    double acc = 0.0;
                    for (std::size_t k2 = 0; k2 < t.nk2; ++k2) {
                        double sk2 = buf.theta[t.kx2[k2]];
                        const double* row = t.g.data() + (k2 * t.nl2 + l2) * left;
                        for (std::size_t k = 0; k < t.nk; ++k)
                            acc += sk2 * buf.theta[t.kx[k]] * row[k * t.nl + l];
                    }
                    u[l2 * t.nl + l] = acc;
                }
            for (std::uint64_t em = 0; em < ecount; ++em) {
                apply_mask(s.esupport, em, buf.eps);
                double v = 0.0;
                for (std::size_t l2 = 0; l2 < t.nl2; ++l2) {
                    double sl2 = buf.eps[t.ly2[l2]];
                    for (std::size_t l = 0; l < t.nl; ++l) {
                        double term = sl2 * buf.eps[t.ly[l]] * u[l2 * t.nl + l];
                        v += term;
                        mean_acc.add(term);
                    }
                }
                m2_acc.add(v * v);
            }
        }
    } else if (variable == PairingVariable::Z) {
        // eps outer; the K != K' part is balanced over the theta cube, the
        // K = K' part over the eps cube (its terms have L != L').
        std::vector<double> z(t.nk * t.nk);
        std::vector<double> u(t.nk);
        const double tscale = static_cast<double>(tcount);
        for (std::uint64_t em = 0; em < ecount; ++em) {
            apply_mask(s.esupport, em, buf.eps);
            for (std::size_t k2 = 0; k2 < t.nk; ++k2)
                for (std::size_t k = 0; k < t.nk; ++k) {
                    if (k2 == k) continue;
                    double acc = 0.0;
                    for (std::size_t l2 = 0; l2 < t.nl2; ++l2) {
                        double sl2 = buf.eps[t.ly2[l2]];
                        const double* row = t.g.data() + (k2 * t.nl2 + l2) * left;
                        for (std::size_t l = 0; l < t.nl; ++l)
                            acc += sl2 * buf.eps[t.ly[l]] * row[k * t.nl + l];
                    }
                    z[k2 * t.nk + k] = acc;
                }
            double su = 0.0;
            for (std::size_t k = 0; k < t.nk; ++k) {
                double acc = 0.0;
                for (std::size_t l2 = 0; l2 < t.nl2; ++l2) {
                    double sl2 = buf.eps[t.ly2[l2]];
                    const double* row = t.g.data() + (k * t.nl2 + l2) * left;
                    for (std::size_t l = 0; l < t.nl; ++l) {
                        if (l == l2) continue;
                        double term = sl2 * buf.eps[t.ly[l]] * row[k * t.nl + l];
                        acc += term;
                        mean_acc.add(term * tscale);
                    }
                }
                u[k] = acc;
                su += acc;
            }
            for (std::uint64_t tm = 0; tm < tcount; ++tm) {
                apply_mask(s.tsupport, tm, buf.theta);
                double v = su;
                for (std::size_t k2 = 0; k2 < t.nk; ++k2) {
                    double sk2 = buf.theta[t.kx[k2]];
                    for (std::size_t k = 0; k < t.nk; ++k) {
                        if (k2 == k) continue;
                        double term = sk2 * buf.theta[t.kx[k]] * z[k2 * t.nk + k];
                        v += term;
                        mean_acc.add(term);
                    }
                }
                m2_acc.add(v * v);
            }
        }
    } else {
        // W and X: eps outer, theta inner; the theta index groups come from
        // the disjoint collections X_I and X_{I'}.
        std::vector<double> w(t.nk2 * t.nk);
        for (std::uint64_t em = 0; em < ecount; ++em) {
            apply_mask(s.esupport, em, buf.eps);
            for (std::size_t k2 = 0; k2 < t.nk2; ++k2)
                for (std::size_t k = 0; k < t.nk; ++k) {
                    double acc = 0.0;
                    for (std::size_t l2 = 0; l2 < t.nl2; ++l2) {
                        double sl2 = buf.eps[t.ly2[l2]];
                        const double* row = t.g.data() + (k2 * t.nl2 + l2) * left;
                        for (std::size_t l = 0; l < t.nl; ++l)
                            acc += sl2 * buf.eps[t.ly[l]] * row[k * t.nl + l];
                    }
                    w[k2 * t.nk + k] = acc;
                }
            for (std::uint64_t tm = 0; tm < tcount; ++tm) {
                apply_mask(s.tsupport, tm, buf.theta);
                double v = 0.0;
                for (std::size_t k2 = 0; k2 < t.nk2; ++k2) {
                    double sk2 = buf.theta[t.kx2[k2]];
                    for (std::size_t k = 0; k < t.nk; ++k) {
                        double term = sk2 * buf.theta[t.kx[k]] * w[k2 * t.nk + k];
                        v += term;
                        mean_acc.add(term);
                    }
                }
                m2_acc.add(v * v);
            }
        }
    }

    MomentReport rep;
    rep.variable = variable;
    rep.indices = idx;
    rep.trials = tcount * ecount;
    double scale = 1.0 / static_cast<double>(rep.trials);
    rep.mean = mean_acc.value() * scale;
    rep.second_moment = m2_acc.value() * scale;
    rep.exhaustive = true;
    fill_bound(rep, T, xfam, yfam, norm_upper_hint);
    return rep;
}

MomentReport mc_moments(const OperatorMatrix& T, const CollectionFamily& xfam,
                        const CollectionFamily& yfam, PairingVariable variable,
                        const VariableIndices& raw, std::uint64_t trials, std::uint64_t seed,
                        std::vector<double>* trace, double norm_upper_hint) {
    if (trials < 100) throw Error(ErrorKind::config, "mc_moments: trials must be >= 100");
    VariableIndices idx = normalize_indices(variable, raw, xfam.domain_resolution);
    VariableSetup s = setup_variable(T, xfam, yfam, variable, idx);
    const int N = T.domain.resolution;

    std::vector<double> values(trials);
    Rng base = Rng(seed).child("mc");
    parallel_for(trials, [&](std::size_t i) {
        thread_local SignBuffers buf(0);
        if (buf.theta.size() != interval_count(N)) buf = SignBuffers(N);
        Rng r = base.child("trial").child(static_cast<std::uint64_t>(i));
        for (auto li : s.tsupport) buf.theta[li] = r.sign();
        for (auto li : s.esupport) buf.eps[li] = r.sign();
        double v = s.table.eval(buf.theta.data(), buf.eps.data());
        if (variable == PairingVariable::Z) v -= s.table.diag_sum;
        values[i] = v;
        reset_support(s.tsupport, buf.theta);
        reset_support(s.esupport, buf.eps);
    });

    ExactSum sv, sv2, sv4;
    for (double v : values) {
        sv.add(v);
        sv2.add(v * v);
        sv4.add(v * v * v * v);
    }
    double n = static_cast<double>(trials);
    MomentReport rep;
    rep.variable = variable;
    rep.indices = idx;
    rep.trials = trials;
    rep.mean = sv.value() / n;
    rep.second_moment = sv2.value() / n;
    double var_v = std::max(0.0, (sv2.value() - n * rep.mean * rep.mean) / (n - 1.0));
    double var_v2 =
        std::max(0.0, (sv4.value() - n * rep.second_moment * rep.second_moment) / (n - 1.0));
    rep.stderr_mean = std::sqrt(var_v / n);
    rep.stderr_second = std::sqrt(var_v2 / n);
    rep.exhaustive = false;
    fill_bound(rep, T, xfam, yfam, norm_upper_hint);
    if (trace) *trace = std::move(values);
    return rep;
}

SignSearchReport search_signs(const OperatorMatrix& T, const CollectionFamily& xfam,
                              const CollectionFamily& yfam, double eta0,
                              std::uint64_t max_attempts, std::uint64_t seed,
                              std::vector<double>* attempt_trace) {
    if (!(eta0 >= 0.0)) throw Error(ErrorKind::config, "search_signs: eta0 must be >= 0");
    if (max_attempts < 1) throw Error(ErrorKind::config, "search_signs: max_attempts must be >= 1");
    xfam.validate_complete();
    yfam.validate_complete();
    if (T.domain.resolution != xfam.target_resolution)
        throw Error(ErrorKind::dimension_mismatch, "operator/family resolution mismatch");

    const int n = xfam.domain_resolution;
    const int N = xfam.target_resolution;
    auto domain_intervals = intervals_up_to(n);
    const std::size_t blocks = domain_intervals.size() * domain_intervals.size();

    // Pairing tables for every ordered block pair (row: right block).
    std::vector<PairingTable> tables(blocks * blocks);
    for (std::size_t a = 0; a < domain_intervals.size(); ++a)
        for (std::size_t b = 0; b < domain_intervals.size(); ++b) {
            const auto& XL = xfam.collection(domain_intervals[a]);
            const auto& YL = yfam.collection(domain_intervals[b]);
            std::size_t rleft = a * domain_intervals.size() + b;
            for (std::size_t c = 0; c < domain_intervals.size(); ++c)
                for (std::size_t d = 0; d < domain_intervals.size(); ++d) {
                    std::size_t rright = c * domain_intervals.size() + d;
                    tables[rright * blocks + rleft] =
                        build_table(T, XL, YL, xfam.collection(domain_intervals[c]),
                                    yfam.collection(domain_intervals[d]));
                }
        }

    std::vector<std::uint64_t> tsupport, esupport;
    for (const auto& coll : xfam.assignments)
        for (const auto& K : coll) tsupport.push_back(interval_linear_index(K));
    for (const auto& coll : yfam.assignments)
        for (const auto& K : coll) esupport.push_back(interval_linear_index(K));
    std::sort(tsupport.begin(), tsupport.end());
    tsupport.erase(std::unique(tsupport.begin(), tsupport.end()), tsupport.end());
    std::sort(esupport.begin(), esupport.end());
    esupport.erase(std::unique(esupport.begin(), esupport.end()), esupport.end());

    SignBuffers buf(N);
    Rng base = Rng(seed).child("search");
    SignSearchReport rep;
    rep.eta0 = eta0;
    double best_score = std::numeric_limits<double>::infinity();
    if (attempt_trace) attempt_trace->clear();

    for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
        Rng r = base.child("attempt").child(attempt);
        for (auto li : tsupport) buf.theta[li] = r.sign();
        for (auto li : esupport) buf.eps[li] = r.sign();

        double maxoff = 0.0;
        double diagdev = 0.0;
        for (std::size_t rr = 0; rr < blocks; ++rr)
            for (std::size_t rl = 0; rl < blocks; ++rl) {
                const PairingTable& t = tables[rr * blocks + rl];
                double v = t.eval(buf.theta.data(), buf.eps.data());
                if (rr == rl)
                    diagdev = std::max(diagdev, std::fabs(v - t.diag_sum));
                else
                    maxoff = std::max(maxoff, std::fabs(v));
            }
        double score = std::max(maxoff, diagdev);
        if (attempt_trace) attempt_trace->push_back(score);
        if (score < best_score) {
            best_score = score;
            rep.max_offdiag = maxoff;
            rep.max_diag_deviation = diagdev;
        }
        if (maxoff <= eta0 && diagdev <= eta0) {
            rep.accepted = true;
            rep.attempts = attempt + 1;
            rep.max_offdiag = maxoff;
            rep.max_diag_deviation = diagdev;
            rep.theta = SignAssignment(N);
            rep.eps = SignAssignment(N);
            for (auto li : tsupport)
                rep.theta.values[li] = static_cast<std::int8_t>(buf.theta[li] < 0 ? -1 : 1);
            for (auto li : esupport)
                rep.eps.values[li] = static_cast<std::int8_t>(buf.eps[li] < 0 ? -1 : 1);
            return rep;
        }
        reset_support(tsupport, buf.theta);
        reset_support(esupport, buf.eps);
    }
    rep.accepted = false;
    rep.attempts = max_attempts;
    return rep;
}

} // namespace hardy
