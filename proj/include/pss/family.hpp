#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pss/expression.hpp"
#include "pss/jet.hpp"
#include "pss/scalar.hpp"

namespace pss {

enum class Branch { T22, T23, T24, T25i, T25ii, SineGordon };

std::string to_string(Branch b);
std::optional<Branch> parse_branch(std::string_view s);

struct FamilyParams {
    double lambda = 0.0;
    double mu2 = 0.0;
    double eta2 = 0.0;
    double C = 0.0;
    std::optional<double> mu3;   // T23 (user), otherwise derived
    std::optional<double> eta3;  // T23: solved from the quadratic unless given
    int root = +1;               // T23: which root of the quadratic for eta3
    double theta = 0.0;          // T25i
    double B = 0.0;              // T25i
    std::optional<double> m1;    // T25i: derived; a given value is checked
    double m = 0.0, n = 0.0;     // T25i, T25ii
    double tau = 0.0, m2 = 0.0;  // T25ii
    double eta = 1.0;            // sine-Gordon
};

struct FamilySpec {
    Branch branch = Branch::T24;
    FamilyParams params;
    int sign = +1;
    std::string f;      // in s = z0 - z2
    std::string phi12;  // in z0, z1
    std::string phi;    // in z0
    std::string name;
};

struct Violation {
    std::string constraint;
    std::string detail;
};

std::vector<Violation> validate_params(const FamilySpec& spec);

class InvalidFamily : public std::runtime_error {
  public:
    explicit InvalidFamily(std::vector<Violation> v);
    const std::vector<Violation>& violations() const { return violations_; }

  private:
    std::vector<Violation> violations_;
};

// eta3 from eta2^2 - eta3^2 - (mu2 eta3 - mu3 eta2)^2 = 0.
std::optional<double> solve_t23_eta3(double mu2, double eta2, double mu3, int root);
// the tau > 0 making the same quadratic hold for the derived mu3, eta3.
double solve_t25ii_tau(double mu2, double eta2, double m, double n, double m2);

template <class T> struct Coefficients {
    T f[3][2];  // f[i-1][j-1] = f_ij
};

struct CoefficientOverride {
    int i = 1, j = 1;
    Expression expr;  // in z0, z1, z2
    bool replace = false;
};

class Family {
  public:
    explicit Family(FamilySpec spec);

    const FamilySpec& spec() const { return spec_; }
    Branch branch() const { return spec_.branch; }
    const FamilyParams& params() const { return spec_.params; }
    int sign() const { return spec_.sign; }
    const std::string& id() const { return id_; }
    double lambda() const { return spec_.branch == Branch::SineGordon ? 0.0 : spec_.params.lambda; }
    // f_p1 = mu_p f11 + eta_p
    double mu(int p) const { return p == 2 ? spec_.params.mu2 : mu3_; }
    double eta(int p) const { return p == 2 ? spec_.params.eta2 : eta3_; }
    double gamma() const { return gamma_; }
    double m1() const { return m1_; }
    bool in_class() const { return spec_.branch != Branch::SineGordon; }
    bool has_overrides() const { return !overrides_.empty(); }

    Family replaced(int i, int j, const std::string& expr) const;
    Family perturbed(int i, int j, const std::string& expr) const;

    template <class T> T f(const T& s) const;
    template <class T> T fprime(const T& s) const;
    template <class T> Coefficients<T> coefficients(const T& z0, const T& z1, const T& z2) const;
    template <class T> T G(const T& z0, const T& z1, const T& z2) const;
    template <class T> T F(const T& z0, const T& z1, const T& z2, const T& z3) const {
        return G(z0, z1, z2) + z0 * z0 * z3 * lambda();
    }
    // phi12 = f12 + lambda z0^2 f11
    template <class T> T phi12(const T& z0, const T& z1, const T& z2) const;

    Coefficients<double> coefficients(const JetPoint& p) const { return coefficients(p.zi(0), p.zi(1), p.zi(2)); }
    // f_ij with gradients over (z0, z1, z2)
    Coefficients<Dual<double>> coefficient_partials(const JetPoint& p) const;
    EvalResult coefficient_with_partials(int i, int j, const JetPoint& p) const;
    double evaluate_G(const JetPoint& p) const;
    double evaluate_F(const JetPoint& p) const;
    // on-shell z_{k,t} for k = 0..upto
    std::vector<double> onshell_zt(const JetPoint& p, int upto) const;

  private:
    FamilySpec spec_;
    std::string id_;
    std::optional<Expression> f_expr_, phi12_expr_, phi_expr_;
    std::vector<CoefficientOverride> overrides_;
    double r_ = 1.0;  // sqrt(1 + mu2^2)
    double mu3_ = 0.0, eta3_ = 0.0, gamma_ = 0.0, m1_ = 0.0, kk_ = 0.0;

    template <class T> std::array<T, 3> P(const T& z0, const T& z1) const;    // phi12, d/dz0, d/dz1
    template <class T> std::array<T, 3> phi3(const T& z0) const;              // phi, phi', phi''
    template <class T> Coefficients<T> base_coefficients(const T& z0, const T& z1, const T& z2) const;
    Family with_override(int i, int j, const std::string& expr, bool replace) const;
};

Family build_family(const FamilySpec& spec);
Family novikov_preset();
Family sine_gordon_preset(double eta = 1.0);
std::vector<std::string> preset_names();
FamilySpec preset_spec(const std::string& name);
Family preset(const std::string& name);

// ------------------------------------------------------------ templates

template <class T> T Family::f(const T& s) const {
    if (spec_.branch == Branch::T25i || spec_.branch == Branch::T25ii) return s * spec_.params.m - spec_.params.n;
    if (!f_expr_) return s;
    return f_expr_->eval<T>({s});
}

template <class T> T Family::fprime(const T& s) const {
    if (spec_.branch == Branch::T25i || spec_.branch == Branch::T25ii) return constant<T>(spec_.params.m);
    if (!f_expr_) return constant<T>(1.0);
    Dual<T> d = f_expr_->eval<Dual<T>>({Dual<T>::variable(s, 0, 1)});
    return d.grad(0);
}

template <class T> std::array<T, 3> Family::P(const T& z0, const T& z1) const {
    Dual<T> r = phi12_expr_->eval<Dual<T>>({Dual<T>::variable(z0, 0, 2), Dual<T>::variable(z1, 1, 2)});
    return {r.v, r.grad(0), r.grad(1)};
}

template <class T> std::array<T, 3> Family::phi3(const T& z0) const {
    Taylor<T> r = phi_expr_->eval<Taylor<T>>({Taylor<T>::variable(z0, 2)});
    return {r.coeff(0), r.coeff(1), r.coeff(2) * 2.0};
}

template <class T> Coefficients<T> Family::base_coefficients(const T& z0, const T& z1, const T& z2) const {
    using std::exp;
    using std::sin;
    using std::cos;
    const auto& q = spec_.params;
    const double sg = spec_.sign;
    const double r = r_;
    const double lam = q.lambda;
    Coefficients<T> c;
    auto& F = c.f;
    if (spec_.branch == Branch::SineGordon) {
        F[0][0] = constant<T>(0.0);
        F[0][1] = sin(z0) / q.eta;
        F[1][0] = constant<T>(q.eta);
        F[1][1] = cos(z0) / q.eta;
        F[2][0] = z1;
        F[2][1] = constant<T>(0.0);
        return c;
    }
    T s = z0 - z2;
    T fs = f(s);
    T z0sq = z0 * z0;
    switch (spec_.branch) {
        case Branch::T22: {
            T p = P(z0, z1)[0];
            F[0][0] = fs;
            F[0][1] = p;
            F[1][0] = fs * q.mu2 + q.eta2;
            F[1][1] = p * q.mu2;
            F[2][0] = fs * (sg * r) + sg * q.mu2 * q.eta2 / r;
            F[2][1] = p * (sg * r);
            break;
        }
        case Branch::T23: {
            T z0z1 = z0 * z1;
            double k = 2.0 / gamma_ * lam * q.eta2;
            F[0][0] = fs;
            F[0][1] = -(z0sq * fs) * lam - z0z1 * k;
            F[1][0] = fs * q.mu2 + q.eta2;
            F[1][1] = -(z0sq * F[1][0]) * lam - z0z1 * (k * q.mu2);
            F[2][0] = fs * mu3_ + eta3_;
            F[2][1] = -(z0sq * F[2][0]) * lam - z0z1 * (k * mu3_);
            break;
        }
        case Branch::T24: {
            T p = P(z0, z1)[0];
            F[0][0] = fs;
            F[0][1] = -(z0sq * fs) * lam + p;
            F[1][0] = fs * q.mu2 + q.eta2;
            F[1][1] = -(z0sq * fs) * (lam * q.mu2) + p * q.mu2 + q.C;
            F[2][0] = fs * (sg * r) + sg * q.mu2 * q.eta2 / r;
            F[2][1] = -(z0sq * fs) * (sg * r * lam) + p * (sg * r) + sg * q.mu2 * q.C / r;
            break;
        }
        case Branch::T25i: {
            T E = exp(z0 * q.theta);
            T K = E * (-q.theta * q.B) + z0 * (2.0 * lam) + 2.0 * lam / q.theta;
            T f11 = fs;
            T f12 = -(z0sq * f11) * lam - (E * (-q.theta * q.theta * q.B) + 2.0 * lam) * (z1 * z1) * (q.m / q.theta) -
                    K * ((z0 * q.m - q.n) / q.theta + z1 * (sg * (q.mu2 - q.m * q.eta2 / q.theta) / r));
            F[0][0] = f11;
            F[0][1] = f12;
            F[1][0] = f11 * q.mu2 + q.eta2;
            F[1][1] = f12 * q.mu2 - z0sq * (lam * q.eta2) + K * (z1 * (sg * r) - q.eta2 / q.theta);
            F[2][0] = f11 * mu3_ + eta3_;
            F[2][1] = f12 * (sg * r) - z0sq * (lam * eta3_) +
                      K * (z1 * q.mu2 - sg * (q.theta + q.m * q.mu2 * q.eta2) / (q.m * q.theta * r));
            break;
        }
        case Branch::T25ii: {
            auto ph = phi3(z0);
            T E = exp(z1 * (sg * q.tau));
            T f11 = fs;
            T f12 = -(z0sq * f11) * lam + ((z0 * q.m - q.n) * ph[0] * (sg * q.tau) + ph[1] * z1 * q.m) * E -
                    z0 * z1 * (sg * 2.0 * lam * q.m / q.tau);
            T f21 = f11 * q.mu2 + q.eta2;
            T f22 = f12 * q.mu2 - z0sq * (lam * q.eta2) + ph[0] * E * (sg * q.tau * q.eta2);
            double a = (1.0 + q.mu2 * q.mu2) / q.eta2;
            double b = sg * q.tau / q.m;
            F[0][0] = f11;
            F[0][1] = f12;
            F[1][0] = f21;
            F[1][1] = f22;
            F[2][0] = (f11 * a + q.mu2) * kk_ - f21 * b;
            F[2][1] = (f12 * a - (z0sq * lam - ph[0] * E * (sg * q.tau)) * q.mu2) * kk_ - f22 * b;
            break;
        }
        case Branch::SineGordon: break;
    }
    return c;
}

template <class T> Coefficients<T> Family::coefficients(const T& z0, const T& z1, const T& z2) const {
    Coefficients<T> c = base_coefficients(z0, z1, z2);
    for (const auto& o : overrides_) {
        T val = o.expr.eval<T>({z0, z1, z2});
        T& slot = c.f[o.i - 1][o.j - 1];
        slot = o.replace ? val : slot + val;
    }
    return c;
}

template <class T> T Family::phi12(const T& z0, const T& z1, const T& z2) const {
    Coefficients<T> c = coefficients(z0, z1, z2);
    return c.f[0][1] + z0 * z0 * c.f[0][0] * lambda();
}

template <class T> T Family::G(const T& z0, const T& z1, const T& z2) const {
    using std::exp;
    const auto& q = spec_.params;
    const double sg = spec_.sign;
    const double r = r_;
    const double lam = q.lambda;
    auto nonzero = [&](const T& fp) {
        if (primal(fp) == 0.0) throw DomainError("f' = 0", "f");
    };
    switch (spec_.branch) {
        case Branch::T22: {
            T fp = fprime(z0 - z2);
            nonzero(fp);
            auto p = P(z0, z1);
            return (p[1] * z1 + p[2] * z2 + p[0] * (sg * q.eta2 / r)) / fp;
        }
        case Branch::T23: {
            T s = z0 - z2;
            T fs = f(s);
            T fp = fprime(s);
            nonzero(fp);
            T z0z1 = z0 * z1;
            T inner = z0z1 * fs * 2.0 + z0 * z0z1 * fp +
                      (z1 * z1 + z0 * z2 + z0z1 * (mu3_ * q.eta2 - q.mu2 * eta3_)) * (2.0 * q.eta2 / gamma_);
            return -(inner / fp) * lam;
        }
        case Branch::T24: {
            T s = z0 - z2;
            T fs = f(s);
            T fp = fprime(s);
            nonzero(fp);
            auto p = P(z0, z1);
            T z0sq = z0 * z0;
            T bracket = z1 * p[1] + z2 * p[2] - z0sq * z1 * fp * lam + p[0] * (sg * q.eta2 / r) -
                        (z0 * z1 * (2.0 * lam) + z0sq * (sg * q.eta2 * lam / r) + sg * q.C / r) * fs;
            return bracket / fp;
        }
        case Branch::T25i: {
            T E = exp(z0 * q.theta);
            T z0sq = z0 * z0;
            T z0z1 = z0 * z1;
            T poly = z0sq * z1 * (-5.0) + z0z1 * z2 * 4.0 + z0z1 * (2.0 * m1_ - 4.0 / q.theta) +
                     z1 * (2.0 * m1_ / q.theta) - z1 * z2 * (2.0 / q.theta);
            T expo = (z1 * z1 * z1 * q.theta + z0z1 * 2.0 + z1 * z2 - z1 * m1_) * E * (q.theta * q.B);
            return poly * lam + expo;
        }
        case Branch::T25ii: {
            auto ph = phi3(z0);
            T E = exp(z1 * (sg * q.tau));
            T z0sq = z0 * z0;
            T z0z1 = z0 * z1;
            T poly = z0sq * z1 * (-3.0) + z0z1 * z2 * 2.0 + z0z1 * (2.0 * q.m2) - (z1 * z1 + z0 * z2) * (sg * 2.0 / q.tau);
            T t1 = ph[2] * z1 * z1 * E;
            T t2 = (z0z1 * (sg * q.tau) + z2 + z1 * z2 * (sg * q.tau) - z1 * (sg * q.m2 * q.tau)) * ph[1] * E;
            T t3 = (z1 * sg + z0 * z2 * q.tau - z2 * (q.m2 * q.tau)) * ph[0] * E * q.tau;
            return poly * lam + t1 + t2 + t3;
        }
        case Branch::SineGordon: throw std::logic_error("sine-Gordon is not of the form u_t - u_xxt = F");
    }
    return constant<T>(0.0);
}

}  // namespace pss
