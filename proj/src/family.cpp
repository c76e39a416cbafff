#include "pss/family.hpp"

#include <algorithm>
#include <sstream>

namespace pss {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

struct Derived {
    double r = 1.0, mu3 = 0.0, eta3 = 0.0, gamma = 0.0, m1 = 0.0, kk = 0.0;
    bool eta3_ok = true;
};

Derived derive(const FamilySpec& s) {
    const auto& q = s.params;
    const double sg = s.sign;
    Derived d;
    d.r = std::sqrt(1.0 + q.mu2 * q.mu2);
    switch (s.branch) {
        case Branch::T22:
        case Branch::T24:
            d.mu3 = sg * d.r;
            d.eta3 = sg * q.mu2 * q.eta2 / d.r;
            break;
        case Branch::T23: {
            d.mu3 = q.mu3.value_or(0.0);
            if (q.eta3) {
                d.eta3 = *q.eta3;
            } else {
                auto e = solve_t23_eta3(q.mu2, q.eta2, d.mu3, q.root);
                d.eta3_ok = e.has_value();
                d.eta3 = e.value_or(0.0);
            }
            d.gamma = q.mu2 * d.mu3 * q.eta2 - (1.0 + q.mu2 * q.mu2) * d.eta3;
            break;
        }
        case Branch::T25i:
            d.mu3 = sg * d.r;
            if (q.m != 0.0) d.eta3 = sg * (q.theta + q.m * q.mu2 * q.eta2) / (q.m * d.r);
            if (q.m != 0.0 && q.theta != 0.0)
                d.m1 = 2.0 * q.n / q.m + (q.eta2 * q.eta2 - d.eta3 * d.eta3 - 1.0) / q.theta;
            break;
        case Branch::T25ii:
            if (q.m != 0.0 && q.eta2 != 0.0) {
                d.kk = sg * q.tau * (q.n / q.m - q.m2);
                d.mu3 = d.kk * (1.0 + q.mu2 * q.mu2) / q.eta2 - sg * q.tau * q.mu2 / q.m;
                d.eta3 = d.kk * q.mu2 - sg * q.tau * q.eta2 / q.m;
            }
            break;
        case Branch::SineGordon: break;
    }
    return d;
}

double quadratic(double mu2, double eta2, double mu3, double eta3) {
    double t = mu2 * eta3 - mu3 * eta2;
    return eta2 * eta2 - eta3 * eta3 - t * t;
}

void check_expr(std::vector<Violation>& out, const std::string& key, const std::string& src,
                std::vector<std::string> vars) {
    if (src.empty()) {
        out.push_back({"missing expression '" + key + "'", "required by this branch"});
        return;
    }
    try {
        parse_expression(src, std::move(vars));
    } catch (const ParseError& e) {
        out.push_back({"expression '" + key + "' must parse", e.what()});
    }
}

}  // namespace

std::string to_string(Branch b) {
    switch (b) {
        case Branch::T22: return "T22";
        case Branch::T23: return "T23";
        case Branch::T24: return "T24";
        case Branch::T25i: return "T25i";
        case Branch::T25ii: return "T25ii";
        case Branch::SineGordon: return "SINE_GORDON";
    }
    return "?";
}

std::optional<Branch> parse_branch(std::string_view s) {
    for (Branch b : {Branch::T22, Branch::T23, Branch::T24, Branch::T25i, Branch::T25ii, Branch::SineGordon})
        if (to_string(b) == s) return b;
    if (s == "sine-gordon") return Branch::SineGordon;
    return std::nullopt;
}

std::optional<double> solve_t23_eta3(double mu2, double eta2, double mu3, int root) {
    double disc = 1.0 + mu2 * mu2 - mu3 * mu3;
    if (disc < 0.0) return std::nullopt;
    return eta2 * (mu2 * mu3 + (root >= 0 ? 1.0 : -1.0) * std::sqrt(disc)) / (1.0 + mu2 * mu2);
}

double solve_t25ii_tau(double mu2, double eta2, double m, double n, double m2) {
    double p = n - m * m2;
    double a = p * mu2 - eta2;
    return std::abs(m * eta2) / std::sqrt(a * a + p * p);
}

std::vector<Violation> validate_params(const FamilySpec& s) {
    std::vector<Violation> v;
    const auto& q = s.params;
    if (s.sign != 1 && s.sign != -1) v.push_back({"sign ∈ {+1, −1}", "sign = " + std::to_string(s.sign)});
    Derived d = derive(s);
    switch (s.branch) {
        case Branch::T22:
            if (q.eta2 == 0.0) v.push_back({"η2 ≠ 0", "η2 = 0"});
            if (q.lambda != 0.0) v.push_back({"T22: λ = 0", "λ = " + fmt(q.lambda) + " (f12 = φ12 carries no λz0²z3 term)"});
            check_expr(v, "f", s.f, {"s"});
            check_expr(v, "phi12", s.phi12, {"z0", "z1"});
            break;
        case Branch::T23: {
            if (q.lambda == 0.0) v.push_back({"λ ≠ 0", "λ = 0"});
            if (q.eta2 == 0.0) v.push_back({"η2 ≠ 0", "η2 = 0"});
            if (!q.mu3) {
                v.push_back({"μ3 required", "T23 needs μ3"});
            } else if (!d.eta3_ok) {
                v.push_back({"μ3² ≤ 1 + μ2²", "no real η3 solves η2² − η3² − (μ2η3 − μ3η2)² = 0 for μ3 = " + fmt(*q.mu3)});
            } else {
                if (d.gamma == 0.0 || std::abs(d.gamma) < 1e-12 * std::max(1.0, std::abs(q.eta2)))
                    v.push_back({"γ = μ2μ3η2 − (1+μ2²)η3 ≠ 0", "γ = " + fmt(d.gamma)});
                double res = quadratic(q.mu2, q.eta2, d.mu3, d.eta3);
                if (std::abs(res) > 1e-10 * std::max(1.0, q.eta2 * q.eta2))
                    v.push_back({"η2² − η3² − (μ2η3 − μ3η2)² = 0", "value " + fmt(res) + " at η3 = " + fmt(d.eta3)});
            }
            check_expr(v, "f", s.f, {"s"});
            break;
        }
        case Branch::T24:
            if (q.lambda * q.eta2 * q.lambda * q.eta2 + q.C * q.C == 0.0)
                v.push_back({"(λη2)² + C² ≠ 0", "λ = " + fmt(q.lambda) + ", η2 = " + fmt(q.eta2) + ", C = " + fmt(q.C)});
            check_expr(v, "f", s.f, {"s"});
            check_expr(v, "phi12", s.phi12, {"z0", "z1"});
            break;
        case Branch::T25i:
            if (q.theta == 0.0) v.push_back({"θ ≠ 0", "θ = 0"});
            if (q.lambda * q.lambda + q.B * q.B == 0.0) v.push_back({"λ² + B² ≠ 0", "λ = 0, B = 0"});
            if (q.m == 0.0) v.push_back({"m ≠ 0", "m = 0"});
            if (q.m1 && q.m != 0.0 && q.theta != 0.0 && std::abs(*q.m1 - d.m1) > 1e-9 * std::max(1.0, std::abs(d.m1)))
                v.push_back({"m1 = 2n/m + (η2² − η3² − 1)/θ", "m1 = " + fmt(*q.m1) + ", structure equations need " + fmt(d.m1)});
            break;
        case Branch::T25ii: {
            if (!(q.tau > 0.0)) v.push_back({"τ > 0", "τ = " + fmt(q.tau)});
            if (q.m * q.eta2 == 0.0) v.push_back({"mη2 ≠ 0", "m = " + fmt(q.m) + ", η2 = " + fmt(q.eta2)});
            if (q.tau > 0.0 && q.m * q.eta2 != 0.0) {
                double res = quadratic(q.mu2, q.eta2, d.mu3, d.eta3);
                if (std::abs(res) > 1e-9 * std::max(1.0, q.eta2 * q.eta2))
                    v.push_back({"η2² − η3² − (μ2η3 − μ3η2)² = 0",
                                 "value " + fmt(res) + "; τ = " + fmt(solve_t25ii_tau(q.mu2, q.eta2, q.m, q.n, q.m2)) +
                                     " satisfies it"});
            }
            check_expr(v, "phi", s.phi, {"z0"});
            break;
        }
        case Branch::SineGordon:
            if (q.eta == 0.0) v.push_back({"η ≠ 0", "η = 0"});
            break;
    }
    return v;
}

InvalidFamily::InvalidFamily(std::vector<Violation> v)
    : std::runtime_error([&] {
          std::string msg = "invalid family:";
          for (const auto& x : v) msg += " [" + x.constraint + ": " + x.detail + "]";
          return msg;
      }()),
      violations_(std::move(v)) {}

Family::Family(FamilySpec spec) : spec_(std::move(spec)) {
    auto violations = validate_params(spec_);
    if (!violations.empty()) throw InvalidFamily(std::move(violations));
    id_ = spec_.name.empty() ? to_string(spec_.branch) : spec_.name;
    if (!spec_.f.empty() && spec_.branch != Branch::T25i && spec_.branch != Branch::T25ii)
        f_expr_ = parse_expression(spec_.f, {"s"});
    if (!spec_.phi12.empty()) phi12_expr_ = parse_expression(spec_.phi12, {"z0", "z1"});
    if (!spec_.phi.empty()) phi_expr_ = parse_expression(spec_.phi, {"z0"});
    Derived d = derive(spec_);
    r_ = d.r;
    mu3_ = d.mu3;
    eta3_ = d.eta3;
    gamma_ = d.gamma;
    m1_ = d.m1;
    kk_ = d.kk;
}

Family Family::with_override(int i, int j, const std::string& expr, bool replace) const {
    if (i < 1 || i > 3 || j < 1 || j > 2) throw std::invalid_argument("coefficient index out of range");
    Family out = *this;
    out.overrides_.push_back({i, j, parse_expression(expr, {"z0", "z1", "z2"}), replace});
    out.id_ += (replace ? "[f" : "[f+") + std::to_string(i) + std::to_string(j) + (replace ? ":=" : "+=") + expr + "]";
    return out;
}

Family Family::replaced(int i, int j, const std::string& expr) const { return with_override(i, j, expr, true); }
Family Family::perturbed(int i, int j, const std::string& expr) const { return with_override(i, j, expr, false); }

Coefficients<Dual<double>> Family::coefficient_partials(const JetPoint& p) const {
    using D = Dual<double>;
    return coefficients(D::variable(p.zi(0), 0, 3), D::variable(p.zi(1), 1, 3), D::variable(p.zi(2), 2, 3));
}

EvalResult Family::coefficient_with_partials(int i, int j, const JetPoint& p) const {
    auto c = coefficient_partials(p);
    const auto& d = c.f[i - 1][j - 1];
    EvalResult r;
    r.value = d.v;
    r.names = {"z0", "z1", "z2"};
    r.partials = {d.grad(0), d.grad(1), d.grad(2)};
    return r;
}

double Family::evaluate_G(const JetPoint& p) const { return G(p.zi(0), p.zi(1), p.zi(2)); }
double Family::evaluate_F(const JetPoint& p) const { return F(p.zi(0), p.zi(1), p.zi(2), p.zi(3)); }

std::vector<double> Family::onshell_zt(const JetPoint& p, int upto) const {
    if (!in_class()) {
        // u_xt = sin u: z_{k,t} = D_x^{k-1} sin z0
        std::vector<double> zt(static_cast<std::size_t>(upto) + 1);
        zt[0] = p.wj(1);
        if (upto >= 1) {
            auto d = total_derivatives_x([](std::span<const Taylor<double>> z) { return sin(z[0]); }, p, 1, upto - 1);
            for (int k = 1; k <= upto; ++k) zt[static_cast<std::size_t>(k)] = d[static_cast<std::size_t>(k - 1)];
        }
        return zt;
    }
    auto flux = [this](std::span<const Taylor<double>> z) { return F(z[0], z[1], z[2], z[3]); };
    return prolong_onshell(p, flux, upto).zt;
}

Family build_family(const FamilySpec& spec) { return Family(spec); }

std::vector<std::string> preset_names() {
    return {"novikov",   "sine-gordon", "t22-demo",     "t22-ode-demo", "t23-demo",
            "t24-demo",  "t24-c-demo",  "t24-ode-demo", "t25i-demo",    "t25ii-demo"};
}

FamilySpec preset_spec(const std::string& name) {
    FamilySpec s;
    s.name = name;
    auto& q = s.params;
    if (name == "novikov") {
        s.branch = Branch::T24;
        q.lambda = 1.0;
        q.eta2 = 1.0;
        s.f = "s";
        s.phi12 = "z0*(z1 - z0)^2";
    } else if (name == "sine-gordon") {
        s.branch = Branch::SineGordon;
        q.eta = 1.0;
    } else if (name == "t22-demo" || name == "t22-ode-demo") {
        s.branch = Branch::T22;
        q.mu2 = name == "t22-demo" ? 0.0 : 0.5;
        q.eta2 = 1.0;
        s.f = "s";
        s.phi12 = "z1";
    } else if (name == "t23-demo") {
        s.branch = Branch::T23;
        q.lambda = 1.0;
        q.mu2 = 0.5;
        q.eta2 = 1.0;
        q.mu3 = 0.3;
        s.f = "s + s^3/3";
    } else if (name == "t24-demo") {
        s.branch = Branch::T24;
        q.lambda = 1.0;
        q.eta2 = 1.0;
        q.C = 0.5;
        s.f = "s";
        s.phi12 = "z1 + z0^2";
    } else if (name == "t24-c-demo") {
        s.branch = Branch::T24;
        q.lambda = 1.0;
        q.C = 1.0;
        s.f = "s";
        s.phi12 = "z1";
    } else if (name == "t24-ode-demo") {
        s.branch = Branch::T24;
        q.lambda = 1.0;
        q.mu2 = 0.5;
        q.eta2 = 1.0;
        q.C = 0.5;
        s.f = "s";
        s.phi12 = "z0*(z1 - z0)^2";
    } else if (name == "t25i-demo") {
        s.branch = Branch::T25i;
        q.lambda = 1.0;
        q.theta = 1.0;
        q.B = 0.5;
        q.mu2 = 0.5;
        q.eta2 = 1.0;
        q.m = 1.0;
        q.n = 0.5;
    } else if (name == "t25ii-demo") {
        s.branch = Branch::T25ii;
        q.lambda = 1.0;
        q.m = 1.0;
        q.n = 0.5;
        q.mu2 = 0.5;
        q.eta2 = 1.0;
        q.m2 = 0.2;
        q.tau = solve_t25ii_tau(q.mu2, q.eta2, q.m, q.n, q.m2);
        s.phi = "1 + z0^2/4";
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    return s;
}

Family preset(const std::string& name) { return Family(preset_spec(name)); }
Family novikov_preset() { return preset("novikov"); }

Family sine_gordon_preset(double eta) {
    FamilySpec s = preset_spec("sine-gordon");
    s.params.eta = eta;
    return Family(s);
}

}  // namespace pss
