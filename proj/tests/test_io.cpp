#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "pss/io.hpp"

using namespace pss;

namespace {

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("family specs roundtrip through JSON") {
    for (const auto& name : preset_names()) {
        FamilySpec s = preset_spec(name);
        json j = family_to_json(s);
        FamilySpec back = family_from_json(json::parse(j.dump()));
        CHECK(family_to_json(back) == j);
        CHECK(Family(back).id() == Family(s).id());
    }
    auto path = (std::filesystem::temp_directory_path() / "pss_io_family.json").string();
    write_family_file(path, preset_spec("t23-demo"));
    FamilySpec t23 = read_family_file(path);
    CHECK(t23.branch == Branch::T23);
    CHECK(*t23.params.mu3 == 0.3);
    std::filesystem::remove(path);
}

TEST_CASE("family JSON rejects malformed documents") {
    json ok = {{"branch", "T22"}, {"params", {{"eta2", 1.0}}}, {"f", "s"}, {"phi12", "z1"}};
    CHECK_NOTHROW(family_from_json(ok));
    json extra = ok;
    extra["colour"] = "red";
    CHECK_THROWS_AS(family_from_json(extra), FormatError);
    json inner = ok;
    inner["params"]["kappa"] = 2;
    CHECK_THROWS_AS(family_from_json(inner), FormatError);
    json branch = ok;
    branch["branch"] = "T99";
    CHECK_THROWS_AS(family_from_json(branch), FormatError);
    json sign = ok;
    sign["sign"] = 2;
    CHECK_THROWS_AS(family_from_json(sign), FormatError);
    json type = ok;
    type["params"]["eta2"] = "one";
    CHECK_THROWS_AS(family_from_json(type), FormatError);
    CHECK_THROWS_AS(family_from_json(json::array()), FormatError);
    CHECK_THROWS_AS(read_json_file("/nonexistent/pss.json"), FormatError);
}

TEST_CASE("verification report layout") {
    VerifyOptions opt;
    opt.samples = 10;
    auto j = report_to_json(verify_family(novikov_preset(), opt));
    CHECK(j["family"] == "novikov");
    CHECK(j["seed"] == kDefaultSeed);
    CHECK(j["samples"] == 10);
    CHECK(j["verdict"] == "pass");
    for (const char* k : {"R1_max", "R2_max", "R3_max", "c36", "c42_min"}) CHECK(j["residuals"].contains(k));
    CHECK(j["failing"].empty());
}

TEST_CASE("PSSF fields roundtrip") {
    Grid1D g{-1.5, 2.5, 20, false};
    auto f = sine_gordon_kink_field(1.0, g, {0.0, 0.25, 0.5});
    std::stringstream buf;
    write_field(buf, f);
    CHECK(buf.str().size() == 4 + 4 * 3 + 8 * 2 + 8 * 3 + 4 + 8 * 21 * 3);
    CHECK(buf.str().substr(0, 4) == "PSSF");
    auto back = read_field(buf);
    CHECK(back.provenance == Provenance::Numeric);
    CHECK(back.grid.nx == 20);
    CHECK(back.grid.x_min == -1.5);
    CHECK(back.grid.x_max == 2.5);
    CHECK_FALSE(back.grid.periodic);
    CHECK(back.times == f.times);
    CHECK(back.u == f.u);

    std::stringstream bad("PSSX");
    CHECK_THROWS_AS(read_field(bad), FormatError);
    std::string cut = buf.str().substr(0, 30);
    std::stringstream trunc;
    write_field(trunc, f);
    std::stringstream half(trunc.str().substr(0, trunc.str().size() / 2));
    CHECK_THROWS_AS(read_field(half), FormatError);
}

TEST_CASE("field CSV") {
    auto f = exact_field("x + t", Grid1D{0.0, 1.0, 16, true}, {0.0, 1.0});
    std::ostringstream os;
    write_field_csv(os, f);
    auto ls = lines(os.str());
    CHECK(ls.front() == "t,x,u");
    CHECK(ls.size() == 1 + 2 * 16);
    CHECK(ls[17].rfind("1,0,1", 0) == 0);
}

TEST_CASE("triple CSV") {
    auto closed = std::get<ImmersionTriple>(solve_triple(preset("t22-demo"), {}));
    std::ostringstream a;
    write_triple_csv(a, closed);
    auto la = lines(a.str());
    CHECK(la.front() == "s,a,b,c,gauss_residual");
    CHECK(la.size() == 202);

    auto ode = std::get<ImmersionTriple>(solve_triple(preset("t22-ode-demo"), {}));
    std::ostringstream b;
    write_triple_csv(b, ode);
    auto lb = lines(b.str());
    CHECK(lb.front() == "s,a,b,c,gauss_residual,bprime");
    CHECK(lb.size() == ode.table.s.size() + 1);

    auto sg = std::get<ImmersionTriple>(solve_triple(sine_gordon_preset(), {}));
    std::ostringstream c;
    write_triple_csv(c, sg, 11);
    CHECK(lines(c.str()).size() == 12);
}

TEST_CASE("OBJ export and diagnostics") {
    Family sg = sine_gordon_preset();
    auto trip = std::get<ImmersionTriple>(solve_triple(sg, {}));
    auto field = sine_gordon_kink_field(1.0, Grid1D{-1, 1, 16, false}, {0.0});
    auto m = integrate_frame(sg, trip, field, -1.01, -0.99, 5, 4, 0.1, 0.1);
    std::ostringstream os;
    write_obj(os, m);
    int v = 0, vn = 0, f = 0;
    for (const auto& l : lines(os.str())) {
        if (l.rfind("v ", 0) == 0) ++v;
        if (l.rfind("vn ", 0) == 0) ++vn;
        if (l.rfind("f ", 0) == 0) {
            ++f;
            CHECK(l.find("//") != std::string::npos);
        }
    }
    CHECK(v == 20);
    CHECK(vn == 20);
    CHECK(f == 2 * 4 * 3);
    auto d = mesh_diagnostics(m);
    for (const char* k : {"K_min", "K_max", "K_mean", "drift_max", "compat_max"}) CHECK(d.contains(k));
    CHECK(d["interior_vertices"] == 6);
    CHECK(d["order"] == 4);
}
