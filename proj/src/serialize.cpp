#include "hardy/serialize.hpp"

#include <charconv>

namespace hardy {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

json element_to_json(const HardyElement& f) {
    return json{{"resolution", f.resolution}, {"coefficients", f.coefficients}};
}

HardyElement element_from_json(const json& j) {
    int N = j.at("resolution").get<int>();
    if (N < 0 || N > max_resolution())
        throw Error(ErrorKind::resolution_exceeded,
                    "element resolution " + std::to_string(N) + " outside [0, " +
                        std::to_string(max_resolution()) + "]");
    HardyElement f(N);
    auto coeffs = j.at("coefficients").get<std::vector<double>>();
    if (coeffs.size() != f.coefficients.size())
        throw Error(ErrorKind::config, "element coefficient count does not match resolution");
    f.coefficients = std::move(coeffs);
    return f;
}

json family_to_json(const CollectionFamily& fam) {
    json assignments = json::object();
    for (std::uint64_t li = 0; li < fam.assignments.size(); ++li) {
        json coll = json::array();
        for (const auto& K : fam.assignments[li]) coll.push_back(to_string(K));
        assignments[to_string(interval_from_linear_index(li))] = std::move(coll);
    }
    return json{{"n", fam.domain_resolution},
                {"N", fam.target_resolution},
                {"kappa", fam.kappa},
                {"assignments", std::move(assignments)}};
}

CollectionFamily family_from_json(const json& j) {
    CollectionFamily fam(j.at("n").get<int>(), j.at("N").get<int>(),
                         j.value("kappa", 1.0));
    for (const auto& [key, coll] : j.at("assignments").items()) {
        DyadicInterval I = interval_from_string(key);
        auto& target = fam.collection(I);
        for (const auto& s : coll) target.push_back(interval_from_string(s.get<std::string>()));
    }
    return fam;
}

json sign_assignment_to_json(const SignAssignment& s) {
    std::vector<int> values(s.values.begin(), s.values.end());
    return json{{"resolution", s.resolution}, {"values", values}};
}

SignAssignment sign_assignment_from_json(const json& j) {
    SignAssignment s(j.at("resolution").get<int>());
    auto values = j.at("values").get<std::vector<int>>();
    if (values.size() != s.values.size())
        throw Error(ErrorKind::config, "sign assignment length does not match resolution");
    for (std::size_t i = 0; i < values.size(); ++i)
        s.values[i] = static_cast<std::int8_t>(values[i] < 0 ? -1 : 1);
    return s;
}

namespace {

json space_to_json(const SpaceDescriptor& s) {
    return json{{"resolution", s.resolution},
                {"p", s.exponents.p},
                {"q", s.exponents.q},
                {"side", s.side == Side::primal ? "primal" : "dual"}};
}

SpaceDescriptor space_from_json(const json& j) {
    SpaceDescriptor s;
    s.resolution = j.at("resolution").get<int>();
    s.exponents = ExponentPair(j.value("p", 2.0), j.value("q", 2.0));
    s.side = j.value("side", std::string("primal")) == "dual" ? Side::dual : Side::primal;
    return s;
}

} // namespace

json operator_to_json(const OperatorMatrix& T) {
    return json{{"domain", space_to_json(T.domain)},
                {"codomain", space_to_json(T.codomain)},
                {"order", "canonical-v1"},
                {"rows", T.gram.rows()},
                {"cols", T.gram.cols()},
                {"gram", T.gram.values()}};
}

OperatorMatrix operator_from_json(const json& j) {
    if (j.value("order", std::string()) != "canonical-v1")
        throw Error(ErrorKind::config, "operator JSON must declare order canonical-v1");
    OperatorMatrix T;
    T.domain = space_from_json(j.at("domain"));
    T.codomain = space_from_json(j.at("codomain"));
    for (int r : {T.domain.resolution, T.codomain.resolution})
        if (r < 0 || r > max_resolution())
            throw Error(ErrorKind::resolution_exceeded,
                        "operator resolution " + std::to_string(r) + " outside [0, " +
                            std::to_string(max_resolution()) + "]");
    std::size_t rows = j.at("rows").get<std::size_t>();
    std::size_t cols = j.at("cols").get<std::size_t>();
    std::uint64_t dd = interval_count(T.codomain.resolution);
    std::uint64_t dc = interval_count(T.domain.resolution);
    if (rows != dd * dd || cols != dc * dc)
        throw Error(ErrorKind::config, "operator JSON shape does not match its resolutions");
    auto values = j.at("gram").get<std::vector<double>>();
    if (values.size() != rows * cols)
        throw Error(ErrorKind::config, "operator JSON gram size mismatch");
    T.gram = Matrix(rows, cols);
    T.gram.values() = std::move(values);
    return T;
}

json condition_report_to_json(const ConditionReport& rep) {
    json violations = json::array();
    for (const auto& v : rep.violations)
        violations.push_back(json{{"condition", v.condition},
                                  {"witness", v.witness},
                                  {"ratio", v.ratio},
                                  {"detail", v.detail}});
    return json{{"passed", rep.passed}, {"violations", std::move(violations)}};
}

json moment_report_to_json(const MomentReport& rep) {
    return json{{"variable", pairing_variable_name(rep.variable)},
                {"I", to_string(rep.indices.I)},
                {"I2", to_string(rep.indices.I2)},
                {"J", to_string(rep.indices.J)},
                {"J2", to_string(rep.indices.J2)},
                {"trials", rep.trials},
                {"mean", rep.mean},
                {"second_moment", rep.second_moment},
                {"stderr_mean", rep.stderr_mean},
                {"stderr_second", rep.stderr_second},
                {"bound", rep.bound},
                {"method", rep.exhaustive ? "exhaustive" : "monte-carlo"},
                {"norm_upper", rep.norm_upper},
                {"alpha", rep.alpha_value}};
}

json search_report_to_json(const SignSearchReport& rep) {
    json j{{"accepted", rep.accepted},
           {"attempts", rep.attempts},
           {"max_offdiag", rep.max_offdiag},
           {"max_diag_deviation", rep.max_diag_deviation},
           {"eta0", rep.eta0}};
    if (rep.accepted) {
        j["theta"] = sign_assignment_to_json(rep.theta);
        j["eps"] = sign_assignment_to_json(rep.eps);
    }
    return j;
}

json diagram_report_to_json(const DiagramReport& rep) {
    json j{{"residual", rep.residual},
           {"norm_product_lower", rep.norm_product_lower},
           {"theoretical_bound", rep.theoretical_bound},
           {"product_within_bound", rep.product_within_bound},
           {"within_arithmetic", rep.within_arithmetic}};
    if (rep.exact_product_p2q2) j["exact_product_p2q2"] = *rep.exact_product_p2q2;
    if (rep.arithmetic_bound) j["arithmetic_bound"] = *rep.arithmetic_bound;
    return j;
}

json artifacts_to_json(const FactorizationArtifacts& art, const OperatorMatrix& T) {
    json params{{"n", art.params.n},
                {"delta", art.params.delta},
                {"gamma", art.params.gamma},
                {"eta", art.params.eta},
                {"mode", art.params.mode == FactorizationMode::practical ? "practical"
                                                                         : "theoretical"},
                {"max_attempts", art.params.max_attempts},
                {"p", art.params.exponents.p},
                {"q", art.params.exponents.q},
                {"N", art.N_used},
                {"m0", art.m0_used},
                {"eta0", art.eta0_used}};
    return json{{"params", std::move(params)},
                {"search", search_report_to_json(art.search)},
                {"xfam", family_to_json(art.system.xfam)},
                {"yfam", family_to_json(art.system.yfam)},
                {"E", operator_to_json(art.E)},
                {"F", operator_to_json(art.F)},
                {"operator", operator_to_json(T)},
                {"residual", art.residual},
                {"norm_product_lower", art.norm_product_lower},
                {"theoretical_bound", art.theoretical_bound},
                {"neumann_ratio", art.neumann_ratio},
                {"eta0_achieved", art.eta0_achieved},
                {"uti_condition", art.uti_condition},
                {"neumann_checked", art.neumann_checked},
                {"neumann_error", art.neumann_error}};
}

} // namespace hardy
