#include "pss/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace pss {

std::string tool_version() { return PSS_VERSION; }

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw FormatError(where + " must be a JSON object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw FormatError("unknown key '" + k + "' in " + where);
}

double num(const json& j, const std::string& key) {
    if (!j.is_number()) throw FormatError("'" + key + "' must be a number");
    return j.get<double>();
}

json jet_to_json(const JetPoint& p) {
    json j;
    j["z"] = p.z;
    j["w1"] = p.w.empty() ? 0.0 : p.w[0];
    j["v1"] = p.v.empty() ? 0.0 : p.v[0];
    return j;
}

}  // namespace

json family_to_json(const FamilySpec& spec) {
    const auto& q = spec.params;
    json p;
    p["lambda"] = q.lambda;
    p["mu2"] = q.mu2;
    p["eta2"] = q.eta2;
    p["C"] = q.C;
    if (q.mu3) p["mu3"] = *q.mu3;
    if (q.eta3) p["eta3"] = *q.eta3;
    p["root"] = q.root;
    p["theta"] = q.theta;
    p["B"] = q.B;
    if (q.m1) p["m1"] = *q.m1;
    p["m"] = q.m;
    p["n"] = q.n;
    p["tau"] = q.tau;
    p["m2"] = q.m2;
    p["eta"] = q.eta;
    json j;
    if (!spec.name.empty()) j["name"] = spec.name;
    j["branch"] = to_string(spec.branch);
    j["params"] = p;
    j["f"] = spec.f;
    j["phi12"] = spec.phi12;
    j["phi"] = spec.phi;
    j["sign"] = spec.sign;
    return j;
}

FamilySpec family_from_json(const json& j) {
    reject_unknown(j, {"name", "branch", "params", "f", "phi12", "phi", "sign"}, "family spec");
    FamilySpec s;
    if (!j.contains("branch") || !j["branch"].is_string()) throw FormatError("family spec needs a 'branch' string");
    auto b = parse_branch(j["branch"].get<std::string>());
    if (!b) throw FormatError("unknown branch '" + j["branch"].get<std::string>() + "'");
    s.branch = *b;
    auto str = [&](const char* key, std::string& out) {
        if (!j.contains(key)) return;
        if (!j[key].is_string()) throw FormatError(std::string("'") + key + "' must be a string");
        out = j[key].get<std::string>();
    };
    str("name", s.name);
    str("f", s.f);
    str("phi12", s.phi12);
    str("phi", s.phi);
    if (j.contains("sign")) {
        if (!j["sign"].is_number_integer() || std::abs(j["sign"].get<int>()) != 1) throw FormatError("'sign' must be 1 or -1");
        s.sign = j["sign"].get<int>();
    }
    if (j.contains("params")) {
        const json& p = j["params"];
        reject_unknown(p, {"lambda", "mu2", "eta2", "C", "mu3", "eta3", "root", "theta", "B", "m1", "m", "n", "tau", "m2", "eta"},
                       "params");
        auto& q = s.params;
        for (const auto& [k, v] : p.items()) {
            if (k == "root") {
                if (!v.is_number_integer() || std::abs(v.get<int>()) != 1) throw FormatError("'root' must be 1 or -1");
                q.root = v.get<int>();
                continue;
            }
            const double x = num(v, k);
            if (k == "lambda") q.lambda = x;
            else if (k == "mu2") q.mu2 = x;
            else if (k == "eta2") q.eta2 = x;
            else if (k == "C") q.C = x;
            else if (k == "mu3") q.mu3 = x;
            else if (k == "eta3") q.eta3 = x;
            else if (k == "theta") q.theta = x;
            else if (k == "B") q.B = x;
            else if (k == "m1") q.m1 = x;
            else if (k == "m") q.m = x;
            else if (k == "n") q.n = x;
            else if (k == "tau") q.tau = x;
            else if (k == "m2") q.m2 = x;
            else if (k == "eta") q.eta = x;
        }
    }
    return s;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    out << text;
}

FamilySpec read_family_file(const std::string& path) { return family_from_json(read_json_file(path)); }

void write_family_file(const std::string& path, const FamilySpec& spec) {
    write_text_file(path, family_to_json(spec).dump(2) + "\n");
}

json report_to_json(const VerificationReport& rep) {
    json j;
    j["family"] = rep.family;
    j["seed"] = rep.seed;
    j["samples"] = rep.samples;
    j["tol"] = rep.tol;
    j["conditions_applicable"] = rep.conditions_applicable;
    json r = json::object();
    for (const auto& [k, v] : rep.residuals) r[k] = v;
    j["residuals"] = r;
    json f = json::array();
    for (const auto& s : rep.failing) f.push_back({{"jet", jet_to_json(s.jet)}, {"residuals", s.residuals}});
    j["failing"] = f;
    j["verdict"] = rep.pass ? "pass" : "fail";
    return j;
}

void write_triple_csv(std::ostream& os, const ImmersionTriple& trip, int n, double clip) {
    os << std::setprecision(17);
    if (trip.representation == Representation::OdeTable) {
        os << "s,a,b,c,gauss_residual,bprime\n";
        for (std::size_t i = 0; i < trip.table.s.size(); ++i) {
            TripleValue v = trip.eval(trip.table.s[i]);
            os << trip.table.s[i] << ',' << v.a << ',' << v.b << ',' << v.c << ',' << gauss_residual(v.a, v.b, v.c) << ','
               << trip.table.bp[i] << '\n';
        }
        return;
    }
    os << "s,a,b,c,gauss_residual\n";
    double lo, hi;
    if (trip.universal()) {
        lo = std::max(trip.s_lo, -clip);
        hi = std::min(trip.s_hi, clip);
    } else {
        lo = 0.0;  // u over one period of the pole-free window
        hi = std::numbers::pi;
    }
    for (int k = 0; k < n; ++k) {
        const double s = lo + (hi - lo) * (k + 1) / (n + 1);
        TripleValue v = trip.universal() ? trip.eval(s) : trip.eval_u(s);
        os << s << ',' << v.a << ',' << v.b << ',' << v.c << ',' << gauss_residual(v.a, v.b, v.c) << '\n';
    }
}

void write_obj(std::ostream& os, const SurfaceMesh& m) {
    os << std::setprecision(12);
    for (const auto& r : m.r) os << "v " << r.x() << ' ' << r.y() << ' ' << r.z() << '\n';
    for (const auto& e : m.e3) os << "vn " << e.x() << ' ' << e.y() << ' ' << e.z() << '\n';
    for (const auto& t : m.tris)
        os << "f " << t[0] + 1 << "//" << t[0] + 1 << ' ' << t[1] + 1 << "//" << t[1] + 1 << ' ' << t[2] + 1 << "//"
           << t[2] + 1 << '\n';
}

json mesh_diagnostics(const SurfaceMesh& m) {
    MeshStats s = mesh_stats(m);
    auto finite_or_null = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
    json j;
    j["K_min"] = finite_or_null(s.K_min);
    j["K_max"] = finite_or_null(s.K_max);
    j["K_mean"] = finite_or_null(s.K_mean);
    j["drift_max"] = m.drift_max;
    j["compat_max"] = m.compat_max;
    j["K_band_fraction"] = s.fraction_within;
    j["interior_vertices"] = s.interior;
    j["grid"] = {m.nx, m.nt};
    j["scheme"] = m.scheme;
    j["order"] = m.order;
    return j;
}

namespace {

template <class T> void put(std::ostream& os, T v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }
template <class T> T get(std::istream& is) {
    T v;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError("truncated field file");
    return v;
}

}  // namespace

void write_field(std::ostream& os, const SolutionField& f) {
    os.write("PSSF", 4);
    put<std::uint32_t>(os, 1);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.nx));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.times.size()));
    put<double>(os, f.grid.x_min);
    put<double>(os, f.grid.x_max);
    for (double t : f.times) put<double>(os, t);
    put<std::uint32_t>(os, f.grid.periodic ? 1u : 0u);
    for (const auto& row : f.u)
        for (double v : row) put<double>(os, v);
}

SolutionField read_field(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "PSSF", 4) != 0) throw FormatError("not a PSSF field file");
    if (get<std::uint32_t>(is) != 1) throw FormatError("unsupported PSSF version");
    SolutionField f;
    f.provenance = Provenance::Numeric;
    f.grid.nx = static_cast<int>(get<std::uint32_t>(is));
    const auto S = get<std::uint32_t>(is);
    f.grid.x_min = get<double>(is);
    f.grid.x_max = get<double>(is);
    for (std::uint32_t k = 0; k < S; ++k) f.times.push_back(get<double>(is));
    f.grid.periodic = get<std::uint32_t>(is) != 0;
    for (std::uint32_t k = 0; k < S; ++k) {
        std::vector<double> row(static_cast<std::size_t>(f.grid.points()));
        for (double& v : row) v = get<double>(is);
        f.u.push_back(std::move(row));
    }
    return f;
}

void write_field_csv(std::ostream& os, const SolutionField& f) {
    os << std::setprecision(17) << "t,x,u\n";
    for (std::size_t k = 0; k < f.times.size(); ++k)
        for (int i = 0; i < f.grid.points(); ++i)
            os << f.times[k] << ',' << f.grid.x(i) << ',' << f.u[k][static_cast<std::size_t>(i)] << '\n';
}

}  // namespace pss
