// hardy-factor: batch experiment runner over the dyadic Hardy-space modules.
//
//   hardy-factor <subcommand> --config <path> [--seed u64] [--threads k]
//                [--out dir] [--plot-data] [--set key=json ...]
//
// Subcommands: norm, check-collections, gamlen-gaudet, moments, search-signs,
// factorize, dim-formula. Exit codes: 0 success, 2 verification failure,
// 3 infeasibility, 4 configuration error. Errors also go to stderr as JSON.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "hardy/factorization.hpp"
#include "hardy/kernels.hpp"
#include "hardy/parallel.hpp"
#include "hardy/rng.hpp"
#include "hardy/serialize.hpp"

namespace fs = std::filesystem;
using hardy::json;

namespace {

int exit_code_for(hardy::ErrorKind kind) {
    switch (kind) {
        case hardy::ErrorKind::verification_failed: return 2;
        case hardy::ErrorKind::degenerate_diagonal:
        case hardy::ErrorKind::enumeration_cap:
        case hardy::ErrorKind::generation_infeasible:
        case hardy::ErrorKind::signs_not_found:
        case hardy::ErrorKind::factorization_infeasible: return 3;
        default: return 4;
    }
}

struct CliContext {
    std::string config_path;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out_dir = ".";
    bool plot_data = false;
    std::vector<std::string> overrides;
    json config;

    fs::path out(const std::string& name) const { return fs::path(out_dir) / name; }
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw hardy::Error(hardy::ErrorKind::config, "cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw hardy::Error(hardy::ErrorKind::config,
                           "malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

void apply_overrides(json& config, const std::vector<std::string>& overrides) {
    for (const auto& ov : overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw hardy::Error(hardy::ErrorKind::config, "--set expects key=json: " + ov);
        std::string key = ov.substr(0, eq);
        json value;
        try {
            value = json::parse(ov.substr(eq + 1));
        } catch (const json::exception&) {
            value = ov.substr(eq + 1); // plain strings allowed unquoted
        }
        config[key] = value;
    }
}

void prepare(CliContext& ctx) {
    if (!ctx.config_path.empty())
        ctx.config = load_json_file(ctx.config_path);
    else
        ctx.config = json::object();
    apply_overrides(ctx.config, ctx.overrides);
    if (ctx.config.contains("seed") && ctx.seed == 0)
        ctx.seed = ctx.config["seed"].get<std::uint64_t>();
    hardy::set_thread_cap(ctx.threads);
    fs::create_directories(ctx.out_dir);
}

void render_lines(const json& j, const std::string& prefix, std::ostream& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (prefix.empty() && it.key() == "meta") continue;
            render_lines(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
        }
    } else if (j.is_array()) {
        if (j.size() > 16) {
            out << prefix << " = [" << j.size() << " values]\n";
        } else {
            for (std::size_t i = 0; i < j.size(); ++i)
                render_lines(j[i], prefix + "[" + std::to_string(i) + "]", out);
        }
    } else {
        out << prefix << " = " << j.dump() << "\n";
    }
}

/// Deterministic flat summary of a bundle: sorted keys, "meta" excluded.
std::string render_summary(const json& bundle) {
    std::ostringstream os;
    render_lines(bundle, "", os);
    return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw hardy::Error(hardy::ErrorKind::config, "cannot write " + path.string());
    out << text;
}

void emit_bundle(const CliContext& ctx, const std::string& name, json bundle,
                 std::chrono::steady_clock::time_point started) {
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);
    std::string summary = render_summary(bundle);
    bundle["meta"] = json{{"generated_unix_ms",
                           std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::system_clock::now().time_since_epoch())
                               .count()},
                          {"duration_seconds", elapsed.count()},
                          {"kernel", hardy::kernels::active_name()}};
    write_text(ctx.out(name + ".json"), bundle.dump(2) + "\n");
    write_text(ctx.out(name + "-summary.txt"), summary);
    std::cout << summary;
}

void emit_series(const CliContext& ctx, const std::string& name,
                 const std::vector<std::pair<double, double>>& series) {
    if (!ctx.plot_data) return;
    std::ostringstream os;
    os << "x,y\n";
    for (const auto& [x, y] : series)
        os << hardy::format_double(x) << "," << hardy::format_double(y) << "\n";
    write_text(ctx.out(name + ".csv"), os.str());
}

json subconfig(const json& config, const char* key) {
    if (!config.contains(key))
        throw hardy::Error(hardy::ErrorKind::config, std::string("config missing '") + key + "'");
    const json& v = config.at(key);
    if (v.is_string()) return load_json_file(v.get<std::string>());
    return v;
}

hardy::ExponentPair exponents_from(const json& j) {
    return hardy::ExponentPair(j.value("p", 2.0), j.value("q", 2.0));
}

hardy::OperatorMatrix load_operator(const json& desc, std::uint64_t seed) {
    std::string kind = desc.value("kind", "file");
    if (kind == "identity") {
        return hardy::identity_operator(desc.at("N").get<int>(), exponents_from(desc));
    }
    if (kind == "scaled-identity") {
        return hardy::scaled(
            hardy::identity_operator(desc.at("N").get<int>(), exponents_from(desc)),
            desc.at("scale").get<double>());
    }
    if (kind == "generate") {
        std::string structure = desc.value("structure", "diagonal-plus-noise");
        hardy::OperatorStructure st;
        if (structure == "diagonal")
            st = hardy::OperatorStructure::diagonal;
        else if (structure == "diagonal-plus-noise")
            st = hardy::OperatorStructure::diagonal_plus_noise;
        else if (structure == "permuted-blocks")
            st = hardy::OperatorStructure::permuted_blocks;
        else
            throw hardy::Error(hardy::ErrorKind::config, "unknown structure: " + structure);
        std::uint64_t opseed = desc.contains("seed")
                                   ? desc.at("seed").get<std::uint64_t>()
                                   : hardy::Rng(seed).child("operator").next_u64();
        return hardy::generate_test_operator(desc.at("N").get<int>(),
                                             desc.at("delta").get<double>(),
                                             desc.at("gamma").get<double>(), exponents_from(desc),
                                             st, opseed);
    }
    if (kind == "file") {
        std::string path = desc.at("path").get<std::string>();
        std::string format = desc.value("format", path.ends_with(".hfgm") ? "hfgm" : "json");
        if (format == "hfgm") {
            std::ifstream in(path, std::ios::binary);
            if (!in) throw hardy::Error(hardy::ErrorKind::config, "cannot open " + path);
            return hardy::read_binary(in);
        }
        return hardy::operator_from_json(load_json_file(path));
    }
    throw hardy::Error(hardy::ErrorKind::config, "unknown operator kind: " + kind);
}

std::pair<hardy::CollectionFamily, hardy::CollectionFamily> load_families(const json& desc) {
    if (desc.contains("xfam")) {
        auto xf = desc.at("xfam").is_string()
                      ? hardy::family_from_json(load_json_file(desc.at("xfam").get<std::string>()))
                      : hardy::family_from_json(desc.at("xfam"));
        auto yf = desc.contains("yfam")
                      ? (desc.at("yfam").is_string()
                             ? hardy::family_from_json(
                                   load_json_file(desc.at("yfam").get<std::string>()))
                             : hardy::family_from_json(desc.at("yfam")))
                      : xf;
        return {std::move(xf), std::move(yf)};
    }
    std::string kind = desc.value("kind", "gamlen-gaudet");
    if (kind == "gamlen-gaudet")
        return hardy::gamlen_gaudet(desc.at("n").get<int>(), desc.at("m0").get<int>(),
                                    desc.value("N", -1));
    if (kind == "identity") {
        int n = desc.at("n").get<int>();
        int N = desc.value("N", n);
        hardy::CollectionFamily fam(n, N, 1.0);
        for (const auto& I : hardy::intervals_up_to(n)) fam.collection(I) = {I};
        return {fam, fam};
    }
    throw hardy::Error(hardy::ErrorKind::config, "unknown family kind: " + kind);
}

// ---------------------------------------------------------------------------

int run_norm(CliContext& ctx) {
    auto started = std::chrono::steady_clock::now();
    hardy::HardyElement f = hardy::element_from_json(subconfig(ctx.config, "element"));
    hardy::ExponentPair e = exponents_from(ctx.config);
    int dual_trials = ctx.config.value("dual_trials", 200);
    json bundle{{"resolution", f.resolution},
                {"p", e.p},
                {"q", e.q},
                {"mixed_norm", hardy::mixed_norm(f, e)},
                {"dual_norm_lower_bound",
                 hardy::dual_norm_lower_bound(f, e, dual_trials, ctx.seed)},
                {"l2_norm", std::sqrt(hardy::l2_inner(f, f))}};
    emit_bundle(ctx, "norm", std::move(bundle), started);
    return 0;
}

int run_check_collections(CliContext& ctx) {
    auto started = std::chrono::steady_clock::now();
    auto [xfam, yfam] = load_families(
        ctx.config.contains("families") ? subconfig(ctx.config, "families") : ctx.config);
    auto jx = hardy::check_jones(xfam);
    auto jy = hardy::check_jones(yfam);
    auto cap = hardy::check_capon(xfam, yfam);
    bool passed = jx.passed && jy.passed && cap.passed;
    json bundle{{"jones_x", hardy::condition_report_to_json(jx)},
                {"jones_y", hardy::condition_report_to_json(jy)},
                {"capon", hardy::condition_report_to_json(cap)},
                {"passed", passed},
                {"min_kappa_x", hardy::min_kappa(xfam)},
                {"min_kappa_y", hardy::min_kappa(yfam)}};
    emit_bundle(ctx, "check-collections", std::move(bundle), started);
    return passed ? 0 : 2;
}

int run_gamlen_gaudet(CliContext& ctx) {
    auto started = std::chrono::steady_clock::now();
    int n = ctx.config.at("n").get<int>();
    int m0 = ctx.config.at("m0").get<int>();
    int N = ctx.config.value("N", -1);
    auto [xfam, yfam] = hardy::gamlen_gaudet(n, m0, N);
    json bundle{{"n", n},
                {"m0", m0},
                {"N", xfam.target_resolution},
                {"alpha", hardy::alpha(xfam, yfam)},
                {"xfam", hardy::family_to_json(xfam)},
                {"yfam", hardy::family_to_json(yfam)},
                {"jones_passed", hardy::check_jones(xfam).passed},
                {"capon_passed", hardy::check_capon(xfam, yfam).passed}};
    emit_bundle(ctx, "gamlen-gaudet", std::move(bundle), started);
    return 0;
}

int run_moments(CliContext& ctx) {
    auto started = std::chrono::steady_clock::now();
    hardy::OperatorMatrix T = load_operator(subconfig(ctx.config, "operator"), ctx.seed);
    auto [xfam, yfam] = load_families(subconfig(ctx.config, "families"));
    std::vector<hardy::PairingVariable> variables;
    if (ctx.config.contains("variables"))
        for (const auto& v : ctx.config.at("variables"))
            variables.push_back(hardy::pairing_variable_from_name(v.get<std::string>()));
    else
        variables = {hardy::PairingVariable::W, hardy::PairingVariable::X,
                     hardy::PairingVariable::Y, hardy::PairingVariable::Z};
    std::uint64_t trials = ctx.config.value("trials", 10000);
    bool want_exhaustive = ctx.config.value("exhaustive", true);
    bool want_mc = ctx.config.value("monte_carlo", true);
    bool trace_csv = ctx.config.value("trace_csv", false);

    json reports = json::array();
    std::ostringstream table;
    table << "variable,I,I2,J,J2,method,trials,mean,second_moment,stderr_mean,stderr_second,"
             "bound\n";
    std::ostringstream trace;
    trace << "trial,variable,I,I2,J,J2,value\n";
    bool ok = true;
    std::vector<std::pair<double, double>> m2_series, bound_series;
    double tuple_index = 0.0;

    for (auto variable : variables) {
        auto tuples = hardy::admissible_tuples(variable, xfam.domain_resolution);
        for (const auto& idx : tuples) {
            auto add_row = [&](const hardy::MomentReport& rep) {
                reports.push_back(hardy::moment_report_to_json(rep));
                table << hardy::pairing_variable_name(rep.variable) << ','
                      << to_string(rep.indices.I) << ',' << to_string(rep.indices.I2) << ','
                      << to_string(rep.indices.J) << ',' << to_string(rep.indices.J2) << ','
                      << (rep.exhaustive ? "exhaustive" : "monte-carlo") << ',' << rep.trials
                      << ',' << hardy::format_double(rep.mean) << ','
                      << hardy::format_double(rep.second_moment) << ','
                      << hardy::format_double(rep.stderr_mean) << ','
                      << hardy::format_double(rep.stderr_second) << ','
                      << hardy::format_double(rep.bound) << "\n";
            };
            if (want_exhaustive) {
                auto rep = hardy::exhaustive_moments(T, xfam, yfam, variable, idx);
                add_row(rep);
                if (rep.mean != 0.0 || rep.second_moment > rep.bound * (1.0 + 1e-12)) ok = false;
                m2_series.emplace_back(tuple_index, rep.second_moment);
                bound_series.emplace_back(tuple_index, rep.bound);
            }
            if (want_mc) {
                std::vector<double> values;
                auto rep = hardy::mc_moments(T, xfam, yfam, variable, idx, trials, ctx.seed,
                                             trace_csv ? &values : nullptr);
                add_row(rep);
                if (rep.second_moment - 3.0 * rep.stderr_second > rep.bound) ok = false;
                if (trace_csv)
                    for (std::size_t t = 0; t < values.size(); ++t)
                        trace << t << ',' << hardy::pairing_variable_name(variable) << ','
                              << to_string(idx.I) << ',' << to_string(idx.I2) << ','
                              << to_string(idx.J) << ',' << to_string(idx.J2) << ','
                              << hardy::format_double(values[t]) << "\n";
            }
            tuple_index += 1.0;
        }
    }

    write_text(ctx.out("moments-table.csv"), table.str());
    if (trace_csv) write_text(ctx.out("moments-trace.csv"), trace.str());
    emit_series(ctx, "moments-plot-second-moment", m2_series);
    emit_series(ctx, "moments-plot-bound", bound_series);
    json bundle{{"passed", ok}, {"trials", trials}, {"reports", std::move(reports)}};
    emit_bundle(ctx, "moments", std::move(bundle), started);
    return ok ? 0 : 2;
}

int run_search_signs(CliContext& ctx) {
    auto started = std::chrono::steady_clock::now();
    hardy::OperatorMatrix T = load_operator(subconfig(ctx.config, "operator"), ctx.seed);
    auto [xfam, yfam] = load_families(subconfig(ctx.config, "families"));
    double eta0 = ctx.config.at("eta0").get<double>();
    std::uint64_t max_attempts = ctx.config.value("max_attempts", 10000);
    std::vector<double> attempt_scores;
    auto rep = hardy::search_signs(T, xfam, yfam, eta0, max_attempts, ctx.seed,
                                   ctx.plot_data ? &attempt_scores : nullptr);
    if (ctx.plot_data) {
        std::vector<std::pair<double, double>> series;
        for (std::size_t i = 0; i < attempt_scores.size(); ++i)
            series.emplace_back(static_cast<double>(i + 1), attempt_scores[i]);
        emit_series(ctx, "search-signs-plot-attempts", series);
    }
    json bundle = hardy::search_report_to_json(rep);
    emit_bundle(ctx, "search-signs", std::move(bundle), started);
    return rep.accepted ? 0 : 3;
}

hardy::FactorizationParams params_from_config(const json& config) {
    hardy::FactorizationParams p;
    p.n = config.value("n", 1);
    p.delta = config.value("delta", 0.5);
    p.gamma = config.value("gamma", 1.0);
    p.eta = config.value("eta", 1.0);
    p.mode = config.value("mode", std::string("practical")) == "theoretical"
                 ? hardy::FactorizationMode::theoretical
                 : hardy::FactorizationMode::practical;
    p.N = config.value("N", -1);
    p.m0 = config.value("m0", -1);
    p.eta0 = config.value("eta0", -1.0);
    p.max_attempts = config.value("max_attempts", 10000);
    p.exponents = exponents_from(config);
    return p;
}

int run_factorize(CliContext& ctx) {
    auto started = std::chrono::steady_clock::now();
    double tolerance = ctx.config.value("residual_tolerance", 1e-9);
    int samples = ctx.config.value("verify_samples", 32);

    if (ctx.config.contains("reverify")) {
        json bundle = load_json_file(ctx.config.at("reverify").get<std::string>());
        hardy::OperatorMatrix T = hardy::operator_from_json(bundle.at("operator"));
        hardy::FactorizationArtifacts art;
        art.params = params_from_config(bundle.at("params"));
        art.N_used = bundle.at("params").at("N").get<int>();
        art.m0_used = bundle.at("params").at("m0").get<int>();
        art.eta0_used = bundle.at("params").at("eta0").get<double>();
        art.E = hardy::operator_from_json(bundle.at("E"));
        art.F = hardy::operator_from_json(bundle.at("F"));
        auto rep = hardy::verify_diagram(art, T, art.params.exponents, samples, ctx.seed);
        bool ok = rep.residual <= tolerance && rep.product_within_bound;
        json out{{"reverified", true},
                 {"passed", ok},
                 {"stored_residual", bundle.at("residual").get<double>()},
                 {"diagram", hardy::diagram_report_to_json(rep)}};
        emit_bundle(ctx, "factorize-verify", std::move(out), started);
        return ok ? 0 : 2;
    }

    hardy::OperatorMatrix T = load_operator(subconfig(ctx.config, "operator"), ctx.seed);
    hardy::FactorizationParams params = params_from_config(ctx.config);
    auto art = hardy::factorize(T, params, ctx.seed);
    auto rep = hardy::verify_diagram(art, T, params.exponents, samples, ctx.seed);
    bool ok = rep.residual <= tolerance && rep.product_within_bound;
    json bundle = hardy::artifacts_to_json(art, T);
    bundle["diagram"] = hardy::diagram_report_to_json(rep);
    bundle["passed"] = ok;
    bundle["residual_tolerance"] = tolerance;
    emit_bundle(ctx, "factorize", std::move(bundle), started);
    return ok ? 0 : 2;
}

int run_dim_formula(CliContext& ctx) {
    auto started = std::chrono::steady_clock::now();
    int n_min = ctx.config.value("n_min", 0);
    int n_max = ctx.config.value("n_max", 5);
    json grid = ctx.config.contains("grid") ? ctx.config.at("grid") : json::array();
    if (grid.empty())
        grid.push_back(json{{"delta", ctx.config.value("delta", 1.0)},
                            {"gamma", ctx.config.value("gamma", 1.0)},
                            {"eta", ctx.config.value("eta", 1.0)}});

    json rows = json::array();
    std::ostringstream csv;
    csv << "n,delta,gamma,eta,eta0,m0,N\n";
    std::vector<std::pair<double, double>> series;
    for (const auto& cell : grid) {
        double delta = cell.at("delta").get<double>();
        double gamma = cell.at("gamma").get<double>();
        double eta = cell.at("eta").get<double>();
        for (int n = n_min; n <= n_max; ++n) {
            auto c = hardy::constants(n, delta, gamma, eta);
            rows.push_back(json{{"n", n},
                                {"delta", delta},
                                {"gamma", gamma},
                                {"eta", eta},
                                {"eta0", c.eta0},
                                {"m0", c.m0},
                                {"N", c.N}});
            csv << n << ',' << hardy::format_double(delta) << ',' << hardy::format_double(gamma)
                << ',' << hardy::format_double(eta) << ',' << hardy::format_double(c.eta0) << ','
                << c.m0 << ',' << c.N << "\n";
            series.emplace_back(static_cast<double>(n), static_cast<double>(c.N));
        }
    }
    write_text(ctx.out("dim-formula-table.csv"), csv.str());
    emit_series(ctx, "dim-formula-plot-N", series);
    json bundle{{"rows", std::move(rows)}};
    emit_bundle(ctx, "dim-formula", std::move(bundle), started);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-dimensional bi-parameter Hardy space laboratory"};
    app.require_subcommand(1);

    CliContext ctx;
    std::map<std::string, std::function<int(CliContext&)>> runners = {
        {"norm", run_norm},
        {"check-collections", run_check_collections},
        {"gamlen-gaudet", run_gamlen_gaudet},
        {"moments", run_moments},
        {"search-signs", run_search_signs},
        {"factorize", run_factorize},
        {"dim-formula", run_dim_formula},
    };

    std::vector<CLI::App*> subs;
    for (const auto& [name, fn] : runners) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", ctx.config_path, "JSON config file");
        sub->add_option("--seed", ctx.seed, "top-level RNG seed");
        sub->add_option("--threads", ctx.threads, "worker thread cap");
        sub->add_option("--out", ctx.out_dir, "output directory");
        sub->add_flag("--plot-data", ctx.plot_data, "emit (x,y) series files");
        sub->add_option("--set", ctx.overrides, "config override key=json (flags win)");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 4;
    }

    try {
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) {
                prepare(ctx);
                return runners.at(subs[i]->get_name())(ctx);
            }
        return 4;
    } catch (const hardy::Error& e) {
        json err{{"error",
                  {{"kind", hardy::error_kind_name(e.kind())}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return exit_code_for(e.kind());
    } catch (const json::exception& e) {
        json err{{"error", {{"kind", "config"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 4;
    } catch (const std::exception& e) {
        json err{{"error", {{"kind", "internal"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
