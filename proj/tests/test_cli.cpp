#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hardy/operators.hpp"
#include "hardy/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(HARDY_FACTOR_BIN) + " " + args + " > /dev/null 2> /dev/null";
    int rc = std::system(cmd.c_str());
    return {WEXITSTATUS(rc)};
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("hardy-cli-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    json j;
    in >> j;
    return j;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

const std::string kConfigs = [] {
    fs::path here = fs::path(HARDY_FACTOR_BIN).parent_path();
    for (fs::path p = here; !p.empty() && p != p.root_path(); p = p.parent_path())
        if (fs::exists(p / "configs" / "dim-formula.json")) return (p / "configs").string();
    return std::string("configs");
}();

} // namespace

TEST_CASE("dim-formula reproduces the linear law") {
    auto dir = fresh_dir("dim");
    auto r = run_cli("dim-formula --config " + kConfigs + "/dim-formula.json --out " +
                     dir.string() + " --plot-data");
    CHECK(r.exit_code == 0);
    auto j = read_json(dir / "dim-formula.json");
    std::vector<long long> expect{127, 168, 209, 250, 291, 332};
    REQUIRE(j.at("rows").size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i)
        CHECK(j.at("rows")[i].at("N").get<long long>() == expect[i]);
    CHECK(fs::exists(dir / "dim-formula-table.csv"));
    CHECK(fs::exists(dir / "dim-formula-plot-N.csv"));
}

TEST_CASE("factorize on the bundled diagonal example") {
    auto dir = fresh_dir("fact-diag");
    auto r = run_cli("factorize --config " + kConfigs + "/factorize-diagonal.json --out " +
                     dir.string());
    CHECK(r.exit_code == 0);
    auto j = read_json(dir / "factorize.json");
    CHECK(j.at("passed").get<bool>());
    CHECK(j.at("residual").get<double>() <= 1e-12);
    CHECK(j.at("search").at("accepted").get<bool>());
}

TEST_CASE("factorize bundle reverifies in a separate process") {
    auto dir = fresh_dir("fact-noise");
    auto r = run_cli("factorize --config " + kConfigs + "/factorize-noise.json --out " +
                     dir.string());
    CHECK(r.exit_code == 0);
    auto verify_dir = fresh_dir("fact-verify");
    auto r2 = run_cli("factorize --set reverify=" + (dir / "factorize.json").string() +
                      " --out " + verify_dir.string());
    CHECK(r2.exit_code == 0);
    auto v = read_json(verify_dir / "factorize-verify.json");
    CHECK(v.at("passed").get<bool>());
    CHECK(v.at("diagram").at("residual").get<double>() <= 1e-9);
}

TEST_CASE("moments on the identity operator are all zero") {
    auto dir = fresh_dir("moments-id");
    auto r = run_cli("moments --config " + kConfigs + "/moments-identity.json --out " +
                     dir.string());
    CHECK(r.exit_code == 0);
    auto j = read_json(dir / "moments.json");
    CHECK(j.at("passed").get<bool>());
    for (const auto& rep : j.at("reports")) {
        CHECK(rep.at("mean").get<double>() == 0.0);
        CHECK(rep.at("second_moment").get<double>() == 0.0);
    }
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    auto strip_meta = [](json j) {
        j.erase("meta");
        return j.dump(2);
    };
    for (const std::string spec :
         {std::string("moments --config ") + kConfigs + "/moments-noise.json",
          std::string("factorize --config ") + kConfigs + "/factorize-noise.json",
          std::string("search-signs --config ") + kConfigs + "/search-signs.json"}) {
        auto d1 = fresh_dir("det-a");
        auto d2 = fresh_dir("det-b");
        run_cli(spec + " --out " + d1.string());
        run_cli(spec + " --out " + d2.string());
        for (const auto& entry : fs::directory_iterator(d1)) {
            fs::path name = entry.path().filename();
            REQUIRE(fs::exists(d2 / name));
            if (name.extension() == ".json")
                CHECK(strip_meta(read_json(entry.path())) == strip_meta(read_json(d2 / name)));
            else
                CHECK(read_file(entry.path()) == read_file(d2 / name));
        }
    }
}

TEST_CASE("thread cap does not change the outputs") {
    auto d1 = fresh_dir("thr-1");
    auto d4 = fresh_dir("thr-4");
    std::string spec = std::string("moments --config ") + kConfigs + "/moments-noise.json";
    run_cli(spec + " --threads 1 --out " + d1.string());
    run_cli(spec + " --threads 4 --out " + d4.string());
    CHECK(read_file(d1 / "moments-table.csv") == read_file(d4 / "moments-table.csv"));
    CHECK(read_file(d1 / "moments-trace.csv") == read_file(d4 / "moments-trace.csv"));
}

TEST_CASE("gamlen-gaudet emission feeds check-collections") {
    auto dir = fresh_dir("gg");
    auto r = run_cli("gamlen-gaudet --set n=2 --set m0=1 --out " + dir.string());
    CHECK(r.exit_code == 0);
    auto j = read_json(dir / "gamlen-gaudet.json");
    CHECK(j.at("jones_passed").get<bool>());
    CHECK(j.at("capon_passed").get<bool>());
    CHECK(j.at("alpha").get<double>() == 0.5);

    // feed the emitted family back through the checker
    write_file(dir / "xfam.json", j.at("xfam").dump());
    auto r2 = run_cli("check-collections --set 'xfam=" + (dir / "xfam.json").string() +
                      "' --out " + dir.string());
    CHECK(r2.exit_code == 0);
    auto rep = read_json(dir / "check-collections.json");
    CHECK(rep.at("passed").get<bool>());
    CHECK(rep.at("min_kappa_x").get<double>() == 1.0);
}

TEST_CASE("norm command evaluates an element file") {
    auto dir = fresh_dir("norm");
    hardy::HardyElement f(2);
    f.coefficients[0] = 1.0;
    write_file(dir / "element.json", hardy::element_to_json(f).dump());
    auto r = run_cli("norm --set 'element=" + (dir / "element.json").string() +
                     "' --set p=1.0 --set q=2.0 --out " + dir.string());
    CHECK(r.exit_code == 0);
    auto j = read_json(dir / "norm.json");
    CHECK(j.at("mixed_norm").get<double>() == 1.0);
}

TEST_CASE("binary gram files load through the CLI") {
    auto dir = fresh_dir("hfgm");
    auto T = hardy::scaled(hardy::identity_operator(2), 0.5);
    {
        std::ofstream out(dir / "op.hfgm", std::ios::binary);
        hardy::write_binary(T, out);
    }
    auto r = run_cli("factorize --set 'operator={\"kind\":\"file\",\"path\":\"" +
                     (dir / "op.hfgm").string() +
                     "\"}' --set n=1 --set delta=0.5 --set N=2 --set m0=1 --set eta0=0.05 "
                     "--out " + dir.string());
    CHECK(r.exit_code == 0);
    auto j = read_json(dir / "factorize.json");
    CHECK(j.at("residual").get<double>() <= 1e-12);
}

TEST_CASE("the resolution ceiling env var is honored") {
    auto dir = fresh_dir("env");
    std::string lower = "HARDY_FACTOR_MAX_N=2 " + std::string(HARDY_FACTOR_BIN) +
                        " gamlen-gaudet --set n=2 --set m0=1 --out " + dir.string() +
                        " > /dev/null 2> /dev/null";
    CHECK(WEXITSTATUS(std::system(lower.c_str())) == 4);
    std::string higher = "HARDY_FACTOR_MAX_N=8 " + std::string(HARDY_FACTOR_BIN) +
                         " gamlen-gaudet --set n=3 --set m0=5 --out " + dir.string() +
                         " > /dev/null 2> /dev/null";
    CHECK(WEXITSTATUS(std::system(higher.c_str())) == 0);
}

TEST_CASE("exit code contract") {
    auto dir = fresh_dir("exit");

    // 4: malformed config file
    write_file(dir / "broken.json", "{ not json");
    CHECK(run_cli("moments --config " + (dir / "broken.json").string() + " --out " +
                  dir.string())
              .exit_code == 4);

    // 4: missing required keys (empty bundle)
    write_file(dir / "empty.json", "{}");
    CHECK(run_cli("factorize --set reverify=" + (dir / "empty.json").string() + " --out " +
                  dir.string())
              .exit_code == 4);

    // 3: sign search cannot reach an exact-zero threshold
    CHECK(run_cli("search-signs --config " + kConfigs +
                  "/search-signs.json --set eta0=0.0 --set max_attempts=25 --out " +
                  dir.string())
              .exit_code == 3);

    // 2: violated collection conditions
    json bad{{"n", 0},
             {"N", 2},
             {"kappa", 1.0},
             {"assignments", {{"0:0", {"1:0", "2:0"}}}}};
    write_file(dir / "bad-family.json", bad.dump());
    CHECK(run_cli("check-collections --set 'xfam=" + (dir / "bad-family.json").string() +
                  "' --out " + dir.string())
              .exit_code == 2);

    // 4: unknown operator kind
    CHECK(run_cli("moments --set 'operator={\"kind\":\"bogus\"}' --set "
                  "'families={\"kind\":\"gamlen-gaudet\",\"n\":1,\"m0\":1}' --out " +
                  dir.string())
              .exit_code == 4);
}
