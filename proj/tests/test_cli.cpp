#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pss/cli.hpp"
#include "pss/io.hpp"

using namespace pss;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("pss_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("catalog") {
    auto r = run_cli({"catalog", "list", "--deterministic"});
    CHECK(r.code == kExitOk);
    auto j = json::parse(r.out);
    CHECK(j["presets"].size() == preset_names().size());
    CHECK(j["tool"] == "pss");
    CHECK(j["version"] == tool_version());
    CHECK_FALSE(j.contains("timestamp"));

    CHECK(run_cli({"catalog", "validate", "--preset", "novikov"}).code == kExitOk);
    auto path = temp("bad_family.json");
    write_text_file(path, R"({"branch": "T24", "params": {"lambda": 0, "eta2": 5, "C": 0}, "f": "s", "phi12": "z1"})");
    auto bad = run_cli({"catalog", "validate", "--family", path});
    CHECK(bad.code == kExitFailed);
    CHECK(json::parse(bad.out)["violations"][0]["constraint"] == "(λη2)² + C² ≠ 0");
    std::filesystem::remove(path);
}

TEST_CASE("verify") {
    auto r = run_cli({"verify", "--preset", "novikov", "--samples", "1000", "--tol", "1e-8"});
    CHECK(r.code == kExitOk);
    auto j = json::parse(r.out);
    CHECK(j["verdict"] == "pass");
    CHECK(j["residuals"]["R1_max"].get<double>() < 1e-8);
    CHECK(j["config"]["samples"] == 1000);
    CHECK(j.contains("timestamp"));
}

TEST_CASE("sff exit codes") {
    auto no = run_cli({"sff", "--preset", "t23-demo"});
    CHECK(no.code == kExitNoImmersion);
    CHECK(json::parse(no.out)["proposition"] == "Prop 4.2");
    CHECK(run_cli({"sff", "--preset", "t25i-demo"}).code == kExitNoImmersion);
    CHECK(run_cli({"sff", "--preset", "t25ii-demo"}).code == kExitNoImmersion);

    auto csv = temp("triple.csv");
    auto ok = run_cli({"sff", "--preset", "t22-demo", "--out", csv});
    CHECK(ok.code == kExitOk);
    CHECK(json::parse(ok.out)["triple"]["proposition"] == "Prop 4.1(i)");
    CHECK(json::parse(ok.out)["gauss_residual_max"].get<double>() < 1e-12);
    CHECK(slurp(csv).rfind("s,a,b,c,gauss_residual\n", 0) == 0);
    std::filesystem::remove(csv);

    CHECK(run_cli({"sff", "--preset", "t22-demo", "--Cstrip", "1", "--beta", "1"}).code == kExitUsage);
}

TEST_CASE("usage errors") {
    CHECK(run_cli({}).code == kExitUsage);
    CHECK(run_cli({"frobnicate"}).code == kExitUsage);
    CHECK(run_cli({"verify"}).code == kExitUsage);
    CHECK(run_cli({"verify", "--preset", "nope"}).code == kExitUsage);
    CHECK(run_cli({"verify", "--preset", "novikov", "--tol", "-1"}).code == kExitUsage);
    CHECK(run_cli({"verify", "--preset", "novikov", "--sign", "x"}).code == kExitUsage);
    CHECK(run_cli({"verify", "--preset", "novikov", "--family", "f.json"}).code == kExitUsage);
    CHECK(run_cli({"reconstruct", "--preset", "sine-gordon"}).code == kExitUsage);
    CHECK(run_cli({"pde", "--grid", "12by3"}).code == kExitUsage);
    CHECK(run_cli({"--help"}).code == kExitOk);
}

TEST_CASE("config files mirror flags and flags win") {
    auto cfg = temp("config.json");
    write_text_file(cfg, R"({"preset": "t22-demo", "samples": 50, "seed": 7, "deterministic": true})");
    auto a = run_cli({"verify", "--config", cfg});
    CHECK(a.code == kExitOk);
    auto ja = json::parse(a.out);
    CHECK(ja["samples"] == 50);
    CHECK(ja["seed"] == 7);
    CHECK(ja["config"]["preset"] == "t22-demo");
    CHECK_FALSE(ja.contains("timestamp"));

    auto b = run_cli({"verify", "--config", cfg, "--samples", "20"});
    CHECK(json::parse(b.out)["samples"] == 20);

    write_text_file(cfg, R"({"preset": "t22-demo", "colour": "red"})");
    auto c = run_cli({"verify", "--config", cfg});
    CHECK(c.code == kExitUsage);
    CHECK(c.err.find("colour") != std::string::npos);
    std::filesystem::remove(cfg);
}

TEST_CASE("reports are byte-identical under --deterministic") {
    for (std::vector<std::string> args : {std::vector<std::string>{"verify", "--preset", "t24-demo", "--samples", "200"},
                                          std::vector<std::string>{"codazzi", "--preset", "novikov", "--samples", "100"},
                                          std::vector<std::string>{"sff", "--preset", "t22-ode-demo"}}) {
        args.push_back("--deterministic");
        auto a = run_cli(args), b = run_cli(args);
        CHECK(a.code == b.code);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("reports go to --report") {
    auto rep = temp("report.json");
    auto r = run_cli({"codazzi", "--preset", "t22-demo", "--samples", "200", "--report", rep});
    CHECK(r.code == kExitOk);
    CHECK(r.out.empty());
    auto j = json::parse(slurp(rep));
    CHECK(j["codazzi_max"].get<double>() < 1e-9);
    std::filesystem::remove(rep);
}

TEST_CASE("pde and reconstruct pipeline") {
    auto field = temp("field.pssf");
    auto r = run_cli({"pde", "--preset", "sine-gordon", "--grid", "256x3", "--t-max", "0.5", "--out", field, "--deterministic"});
    REQUIRE(r.code == kExitOk);
    CHECK(json::parse(r.out)["kink_error_inf"].get<double>() < 1e-3);

    auto nov = run_cli({"pde", "--grid", "64x3", "--t-max", "0.2"});
    CHECK(nov.code == kExitOk);
    CHECK(json::parse(nov.out)["h1_relative_drift"].get<double>() < 1e-6);

    auto obj = temp("mesh.obj");
    auto rec = run_cli({"reconstruct", "--preset", "sine-gordon", "--soliton", "--grid", "30x30", "--domain", "-3,3,-3,3",
                        "--out", obj});
    CHECK(rec.code == kExitOk);
    auto side = json::parse(slurp(temp("mesh.json")));
    CHECK(side.contains("K_mean"));
    CHECK(slurp(obj).rfind("v ", 0) == 0);

    auto none = run_cli({"reconstruct", "--preset", "t23-demo", "--u-expr", "x"});
    CHECK(none.code == kExitNoImmersion);
    for (const auto& p : {field, obj, temp("mesh.json")}) std::filesystem::remove(p);
}
