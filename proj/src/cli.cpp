#include "pss/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "pss/family.hpp"
#include "pss/frame.hpp"
#include "pss/immersion.hpp"
#include "pss/io.hpp"
#include "pss/pde.hpp"
#include "pss/verifier.hpp"

namespace pss {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::string action = "list";  // catalog
    std::string preset, family, config;
    int samples = 1000;
    std::uint64_t seed = kDefaultSeed;
    double tol = 1e-8;
    std::string sign, a_sign = "+";
    double beta = 1.0, Cstrip = 3.0, sigma = 3.0, b0 = 2.0, h = 1e-3, eps = 0.5, s0 = 0.0;
    std::string grid;
    std::string out, report;
    bool deterministic = false;
    // pde
    std::string u0 = "0.1 + 0.05*cos(x)";
    double t_max = 1.0, dt = 0.0;
    std::string method = "spectral";
    int order = 4;
    // reconstruct
    bool soliton = false;
    std::string u_expr, field, domain;
    int substeps = 8;
};

std::pair<int, int> parse_grid(const std::string& g) {
    static const std::regex re(R"((\d+)x(\d+))");
    std::smatch m;
    if (!std::regex_match(g, m, re)) throw UsageError("--grid must look like NXxNT, got '" + g + "'");
    return {std::stoi(m[1]), std::stoi(m[2])};
}

int parse_sign(const std::string& s, const char* flag) {
    if (s == "+" || s == "1" || s == "+1") return 1;
    if (s == "-" || s == "-1") return -1;
    throw UsageError(std::string(flag) + " must be + or -");
}

json config_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    if (c.command == "catalog") j["action"] = c.action;
    if (!c.preset.empty()) j["preset"] = c.preset;
    if (!c.family.empty()) j["family"] = c.family;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    j["tol"] = c.tol;
    if (!c.sign.empty()) j["sign"] = c.sign;
    j["a-sign"] = c.a_sign;
    j["beta"] = c.beta;
    j["Cstrip"] = c.Cstrip;
    j["sigma"] = c.sigma;
    j["b0"] = c.b0;
    j["h"] = c.h;
    j["eps"] = c.eps;
    j["s0"] = c.s0;
    if (!c.grid.empty()) j["grid"] = c.grid;
    if (c.command == "pde") {
        j["u0"] = c.u0;
        j["t-max"] = c.t_max;
        j["dt"] = c.dt;
        j["method"] = c.method;
        j["order"] = c.order;
    }
    if (c.command == "reconstruct") {
        j["soliton"] = c.soliton;
        if (!c.u_expr.empty()) j["u-expr"] = c.u_expr;
        if (!c.field.empty()) j["field"] = c.field;
        if (!c.domain.empty()) j["domain"] = c.domain;
        j["substeps"] = c.substeps;
    }
    if (!c.out.empty()) j["out"] = c.out;
    j["deterministic"] = c.deterministic;
    return j;
}

json envelope(const RunConfig& c) {
    json j;
    j["tool"] = "pss";
    j["version"] = tool_version();
    j["config"] = config_json(c);
    if (!c.deterministic) {
        std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::ostringstream os;
        os << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
        j["timestamp"] = os.str();
    }
    return j;
}

void emit(const RunConfig& c, const json& rep, std::ostream& out) {
    const std::string text = rep.dump(2) + "\n";
    if (c.report.empty()) out << text;
    else write_text_file(c.report, text);
}

void merge(json& into, const json& from) {
    for (const auto& [k, v] : from.items()) into[k] = v;
}

json finite(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

FamilySpec resolve_spec(const RunConfig& c, const std::string& fallback) {
    if (!c.preset.empty() && !c.family.empty()) throw UsageError("give either --preset or --family, not both");
    FamilySpec s;
    if (!c.family.empty()) s = read_family_file(c.family);
    else if (!c.preset.empty()) s = preset_spec(c.preset);
    else if (!fallback.empty()) s = preset_spec(fallback);
    else throw UsageError("--preset or --family is required");
    if (!c.sign.empty()) s.sign = parse_sign(c.sign, "--sign");
    return s;
}

ImmersionParams immersion_params(const RunConfig& c) {
    ImmersionParams ip;
    ip.beta = c.beta;
    ip.C_strip = c.Cstrip;
    ip.sigma = c.sigma;
    ip.b0 = c.b0;
    ip.s0 = c.s0;
    ip.h = c.h;
    ip.eps = c.eps;
    ip.a_sign = parse_sign(c.a_sign, "--a-sign");
    return ip;
}

json triple_json(const ImmersionTriple& t) {
    json j;
    j["proposition"] = t.label();
    j["representation"] = t.representation == Representation::ClosedForm ? "closed-form"
                          : t.representation == Representation::OdeTable ? "ode-table"
                                                                          : "solution-dependent";
    j["a_sign"] = t.a_sign;
    if (t.universal()) {
        j["reduced_coordinate"] = {{"kx", t.kx}, {"kt", t.kt}};
        j["s_lo"] = finite(t.s_lo);
        j["s_hi"] = finite(t.s_hi);
    }
    if (t.representation == Representation::OdeTable) {
        j["points"] = t.table.s.size();
        j["stop_lo"] = t.table.stop_lo;
        j["stop_hi"] = t.table.stop_hi;
    }
    return j;
}

json no_immersion_json(const NoImmersion& n) {
    return {{"proposition", n.proposition}, {"reason", n.reason}, {"verdict", "no-immersion"}};
}

// ---------------------------------------------------------------- commands

int cmd_catalog(const RunConfig& c, std::ostream& out) {
    json rep = envelope(c);
    if (c.action == "list") {
        json list = json::array();
        for (const auto& n : preset_names()) {
            FamilySpec s = preset_spec(n);
            list.push_back({{"name", n}, {"branch", to_string(s.branch)}, {"family", family_to_json(s)}});
        }
        rep["presets"] = list;
        emit(c, rep, out);
        return kExitOk;
    }
    if (c.action != "validate") throw UsageError("catalog action must be list or validate");
    FamilySpec s = resolve_spec(c, "");
    auto v = validate_params(s);
    json vs = json::array();
    for (const auto& x : v) vs.push_back({{"constraint", x.constraint}, {"detail", x.detail}});
    rep["family"] = family_to_json(s);
    rep["violations"] = vs;
    if (v.empty()) rep["id"] = build_family(s).id();
    rep["verdict"] = v.empty() ? "valid" : "invalid";
    emit(c, rep, out);
    return v.empty() ? kExitOk : kExitFailed;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
    Family fam = build_family(resolve_spec(c, ""));
    VerifyOptions opt;
    opt.samples = c.samples;
    opt.seed = c.seed;
    opt.tol = c.tol;
    VerificationReport r = verify_family(fam, opt);
    json rep = envelope(c);
    merge(rep, report_to_json(r));
    emit(c, rep, out);
    return r.pass ? kExitOk : kExitFailed;
}

int cmd_sff(const RunConfig& c, std::ostream& out) {
    Family fam = build_family(resolve_spec(c, ""));
    json rep = envelope(c);
    rep["family"] = fam.id();
    auto res = solve_triple(fam, immersion_params(c));
    if (auto* no = std::get_if<NoImmersion>(&res)) {
        merge(rep, no_immersion_json(*no));
        emit(c, rep, out);
        return kExitNoImmersion;
    }
    const auto& t = std::get<ImmersionTriple>(res);
    rep["triple"] = triple_json(t);
    std::ostringstream csv;
    write_triple_csv(csv, t);
    double gmax = 0.0;
    {
        std::istringstream in(csv.str());
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            std::vector<double> cols;
            std::stringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ',')) cols.push_back(std::stod(cell));
            gmax = std::max(gmax, std::abs(cols[4]));
        }
    }
    rep["gauss_residual_max"] = gmax;
    if (!c.out.empty()) write_text_file(c.out, csv.str());
    rep["verdict"] = "immersion";
    emit(c, rep, out);
    return kExitOk;
}

int cmd_codazzi(const RunConfig& c, std::ostream& out) {
    Family fam = build_family(resolve_spec(c, ""));
    json rep = envelope(c);
    rep["family"] = fam.id();
    auto res = solve_triple(fam, immersion_params(c));
    if (auto* no = std::get_if<NoImmersion>(&res)) {
        merge(rep, no_immersion_json(*no));
        emit(c, rep, out);
        return kExitNoImmersion;
    }
    const auto& t = std::get<ImmersionTriple>(res);
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double lo = t.s_lo, hi = t.s_hi;
    if (!std::isfinite(lo)) lo = hi - 3.0;
    if (!std::isfinite(hi)) hi = lo + 3.0;
    double emax = 0.0;
    for (int i = 0; i < c.samples; ++i) {
        JetPoint p = random_jet(fam, rng);
        double x = 0.0, tt = 0.0;
        if (t.universal()) {
            const double s = lo + (hi - lo) * (0.005 + 0.99 * U(rng));
            tt = 2.0 * U(rng) - 1.0;
            if (t.kx != 0.0) {
                x = (s - t.kt * tt) / t.kx;
            } else {
                x = 2.0 * U(rng) - 1.0;
                tt = s / t.kt;
            }
        }
        auto [e1, e2] = codazzi_residuals(fam, t, p, x, tt);
        emax = std::max({emax, std::abs(e1), std::abs(e2)});
    }
    rep["triple"] = triple_json(t);
    rep["samples"] = c.samples;
    rep["codazzi_max"] = emax;
    rep["tol"] = c.tol;
    const bool pass = emax <= c.tol;
    rep["verdict"] = pass ? "pass" : "fail";
    emit(c, rep, out);
    return pass ? kExitOk : kExitFailed;
}

HelmholtzMethod parse_method(const std::string& m) {
    if (m == "spectral") return HelmholtzMethod::Spectral;
    if (m == "tridiagonal" || m == "cyclic-tridiagonal") return HelmholtzMethod::CyclicTridiagonal;
    throw UsageError("--method must be spectral or tridiagonal");
}

void write_field_file(const std::string& path, const SolutionField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot write " + path);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") write_field_csv(os, f);
    else write_field(os, f);
}

int cmd_pde(const RunConfig& c, std::ostream& out) {
    Family fam = build_family(resolve_spec(c, "novikov"));
    json rep = envelope(c);
    rep["family"] = fam.id();
    auto [nx, S] = parse_grid(c.grid.empty() ? (fam.in_class() ? "256x11" : "512x11") : c.grid);
    MolOptions opt;
    opt.t_max = c.t_max;
    opt.snapshots = S;
    opt.order = c.order;
    opt.method = parse_method(c.method);
    SolutionField f;
    if (!fam.in_class()) {
        const double eta = fam.params().eta;
        Grid1D g{-30.0, 15.0, nx, false};
        opt.dt = c.dt > 0.0 ? c.dt : 0.5 * g.dx();
        std::vector<double> u0;
        for (int i = 0; i < g.points(); ++i) u0.push_back(exact_sine_gordon_kink(eta, g.x(i), 0.0));
        f = solve_sine_gordon(g, u0, 0.0, opt);
        double err = 0.0;
        for (int i = 0; i < g.points(); ++i)
            err = std::max(err, std::abs(f.u.back()[static_cast<std::size_t>(i)] - exact_sine_gordon_kink(eta, g.x(i), opt.t_max)));
        rep["kink_error_inf"] = err;
        rep["boundary"] = "non-periodic; u_t fixed by decay at x_min";
    } else {
        Grid1D g{0.0, 2.0 * std::numbers::pi, nx, true};
        opt.dt = c.dt > 0.0 ? c.dt : 1e-3;
        Expression e = parse_expression(c.u0, {"x"});
        std::vector<double> u0;
        for (int i = 0; i < g.points(); ++i) u0.push_back(e.eval<double>({g.x(i)}));
        f = solve_mol(fam, g, u0, opt);
        const double H0 = h1_norm(g, f.u.front());
        double drift = 0.0, umax = 0.0;
        for (const auto& u : f.u) {
            drift = std::max(drift, std::abs(h1_norm(g, u) - H0) / std::max(H0, 1e-300));
            for (double v : u) umax = std::max(umax, std::abs(v));
        }
        rep["h1_initial"] = H0;
        rep["h1_relative_drift"] = drift;
        rep["u_inf_max"] = umax;
        rep["boundary"] = "periodic";
    }
    rep["method"] = f.method;
    rep["dt"] = opt.dt;
    rep["times"] = f.times;
    if (!c.out.empty()) write_field_file(c.out, f);
    rep["verdict"] = "solved";
    emit(c, rep, out);
    return kExitOk;
}

std::string sidecar_path(const std::string& obj) {
    auto dot = obj.find_last_of('.');
    auto slash = obj.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return obj + ".json";
    return obj.substr(0, dot) + ".json";
}

int cmd_reconstruct(const RunConfig& c, std::ostream& out) {
    Family fam = build_family(resolve_spec(c, ""));
    json rep = envelope(c);
    rep["family"] = fam.id();
    auto res = solve_triple(fam, immersion_params(c));
    if (auto* no = std::get_if<NoImmersion>(&res)) {
        merge(rep, no_immersion_json(*no));
        emit(c, rep, out);
        return kExitNoImmersion;
    }
    const auto& trip = std::get<ImmersionTriple>(res);
    const int sources = (c.soliton ? 1 : 0) + (c.u_expr.empty() ? 0 : 1) + (c.field.empty() ? 0 : 1);
    if (sources != 1) throw UsageError("give exactly one of --soliton, --u-expr, --field");
    FrameOptions fo;
    fo.substeps = c.substeps;
    SolutionField field;
    int nx, nt;
    double x0, t0, hx, ht;
    if (c.field.empty()) {
        std::tie(nx, nt) = parse_grid(c.grid.empty() ? "200x200" : c.grid);
        if (nx < 2 || nt < 2) throw UsageError("--grid needs at least 2x2 vertices");
        double dom[4] = {-6.0, 6.0, -6.0, 6.0};
        if (!c.domain.empty()) {
            std::stringstream ss(c.domain);
            std::string cell;
            for (int k = 0; k < 4; ++k) {
                if (!std::getline(ss, cell, ',')) throw UsageError("--domain must be xmin,xmax,tmin,tmax");
                dom[k] = std::stod(cell);
            }
        }
        hx = (dom[1] - dom[0]) / (nx - 1);
        ht = (dom[3] - dom[2]) / (nt - 1);
        x0 = dom[0];
        t0 = dom[2];
        if (c.soliton) {
            if (fam.in_class()) throw UsageError("--soliton needs the sine-gordon family");
            // keep vertices off the cuspidal line eta x + t/eta = 0
            x0 += hx / 4;
            t0 += ht / 4;
            field = sine_gordon_kink_field(fam.params().eta, Grid1D{x0, x0 + hx * (nx - 1), nx - 1, false}, {t0});
        } else {
            field = exact_field(c.u_expr, Grid1D{x0, x0 + hx * (nx - 1), nx - 1, false}, {t0});
        }
    } else {
        std::ifstream in(c.field, std::ios::binary);
        if (!in) throw FormatError("cannot open " + c.field);
        field = read_field(in);
        for (const auto& u : field.u)
            field.ut.push_back(fam.in_class() ? mol_rhs(fam, field.grid, u, HelmholtzMethod::Spectral)
                                              : sine_gordon_ut(field.grid, u, field.accuracy));
        nx = field.grid.points();
        nt = static_cast<int>(field.times.size());
        x0 = field.grid.x_min;
        hx = field.grid.dx();
        t0 = field.times.front();
        ht = nt > 1 ? field.times[1] - field.times[0] : 0.0;
        for (int k = 1; k < nt; ++k)
            if (std::abs(field.times[static_cast<std::size_t>(k)] - t0 - k * ht) > 1e-9 * std::max(1.0, std::abs(t0 + k * ht)))
                throw UsageError("field snapshots must be equally spaced");
    }
    SurfaceMesh m = integrate_frame(fam, trip, field, x0, t0, nx, nt, hx, ht, fo);
    json diag = mesh_diagnostics(m);
    if (!c.out.empty()) {
        std::ofstream os(c.out);
        if (!os) throw FormatError("cannot write " + c.out);
        write_obj(os, m);
        write_text_file(sidecar_path(c.out), diag.dump(2) + "\n");
    }
    rep["triple"] = triple_json(trip);
    rep["origin"] = {x0, t0};
    rep["steps"] = {hx, ht};
    rep["diagnostics"] = diag;
    rep["verdict"] = "reconstructed";
    emit(c, rep, out);
    return kExitOk;
}

// ---------------------------------------------------------------- wiring

void add_common(CLI::App* sub, RunConfig& c) {
    sub->add_option("--config", c.config, "JSON file mirroring the flags (flags win)");
    sub->add_option("--preset", c.preset, "preset family name");
    sub->add_option("--family", c.family, "family spec JSON file");
    sub->add_option("--samples", c.samples, "number of random jets")->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "RNG seed");
    sub->add_option("--tol", c.tol, "tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--sign", c.sign, "global sign of the family (+ or -)");
    sub->add_option("--a-sign", c.a_sign, "sign of a in the triple (+ or -)");
    sub->add_option("--beta", c.beta, "triple constant beta");
    sub->add_option("--Cstrip", c.Cstrip, "strip constant of the x-only closed form")->check(CLI::PositiveNumber);
    sub->add_option("--sigma", c.sigma, "strip constant of the t and mixed closed forms")->check(CLI::PositiveNumber);
    sub->add_option("--b0", c.b0, "initial value of b for the ODE branches");
    sub->add_option("--s0", c.s0, "initial point of the ODE march");
    sub->add_option("--h", c.h, "ODE step")->check(CLI::PositiveNumber);
    sub->add_option("--eps", c.eps, "ODE march half-width")->check(CLI::PositiveNumber);
    sub->add_option("--grid", c.grid, "NXxNT");
    sub->add_option("--out", c.out, "output file");
    sub->add_option("--report", c.report, "report file (default: standard output)");
    sub->add_flag("--deterministic", c.deterministic, "omit timestamps from reports");
}

void apply_config_file(CLI::App* sub, const std::string& path) {
    json j = read_json_file(path);
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    for (const auto& [key, val] : j.items()) {
        if (key == "config") throw UsageError("config files cannot nest --config");
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt) throw UsageError("unknown config key '" + key + "'");
        if (opt->count() > 0) continue;
        std::string s = val.is_string() ? val.get<std::string>() : val.dump();
        opt->add_result(s);
        opt->run_callback();
    }
}

void validate(const RunConfig& c) {
    if (!(c.tol > 0.0)) throw UsageError("--tol must be > 0");
    if (c.samples < 1) throw UsageError("--samples must be >= 1");
    if (!(c.h > 0.0) || !(c.eps > 0.0)) throw UsageError("--h and --eps must be > 0");
    if (!c.sign.empty()) parse_sign(c.sign, "--sign");
    parse_sign(c.a_sign, "--a-sign");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"pseudospherical surfaces toolkit", "pss"};
    app.set_help_flag("--help", "print help");
    app.set_version_flag("--version", tool_version());
    app.require_subcommand(1);
    RunConfig c;
    auto* catalog = app.add_subcommand("catalog", "list presets or validate a family");
    catalog->add_option("action", c.action, "list | validate")->check(CLI::IsMember({"list", "validate"}));
    auto* verify = app.add_subcommand("verify", "certify structure equations and classification conditions");
    auto* sff = app.add_subcommand("sff", "compute the second fundamental form triple");
    auto* codazzi = app.add_subcommand("codazzi", "cross-check a triple against the Codazzi system");
    auto* pde = app.add_subcommand("pde", "march the equation and export the field");
    auto* rec = app.add_subcommand("reconstruct", "integrate the moving frame into a mesh");
    for (auto* s : {catalog, verify, sff, codazzi, pde, rec}) add_common(s, c);
    pde->add_option("--u0", c.u0, "initial data u0(x) on [0, 2pi)");
    pde->add_option("--t-max", c.t_max, "final time")->check(CLI::PositiveNumber);
    pde->add_option("--dt", c.dt, "time step (default 1e-3, or dx/2 for sine-Gordon)");
    pde->add_option("--method", c.method, "spectral | tridiagonal");
    pde->add_option("--order", c.order, "sine-Gordon march order (2 or 4)");
    rec->add_flag("--soliton", c.soliton, "use the exact sine-Gordon kink");
    rec->add_option("--u-expr", c.u_expr, "exact field u(x, t)");
    rec->add_option("--field", c.field, "PSSF field file from `pss pde`");
    rec->add_option("--domain", c.domain, "xmin,xmax,tmin,tmax (default -6,6,-6,6)");
    rec->add_option("--substeps", c.substeps, "RK4 substeps per cell")->check(CLI::PositiveNumber);

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }
    CLI::App* sub = app.get_subcommands().front();
    c.command = sub->get_name();
    try {
        if (!c.config.empty()) apply_config_file(sub, c.config);
        validate(c);
        if (c.command == "catalog") return cmd_catalog(c, out);
        if (c.command == "verify") return cmd_verify(c, out);
        if (c.command == "sff") return cmd_sff(c, out);
        if (c.command == "codazzi") return cmd_codazzi(c, out);
        if (c.command == "pde") return cmd_pde(c, out);
        return cmd_reconstruct(c, out);
    } catch (const InvalidFamily& e) {
        err << "pss: invalid family:";
        for (const auto& v : e.violations()) err << "\n  " << v.constraint << ": " << v.detail;
        err << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "pss: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FormatError& e) {
        err << "pss: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CLI::Error& e) {
        err << "pss: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidStrip& e) {
        err << "pss: invalid strip: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "pss: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "pss: " << e.what() << '\n';
        return kExitUsage;
    } catch (const OdeCollapse& e) {
        err << "pss: ODE collapse at s = " << e.s() << ": " << e.what() << '\n';
        return kExitFailed;
    } catch (const std::exception& e) {
        err << "pss: " << e.what() << '\n';
        return kExitFailed;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace pss
