#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pss/family.hpp"
#include "pss/jet.hpp"

namespace pss {

enum class TripleBranch { Prop41i, Prop41ii, Prop43i, Prop43ii, Prop43iii, SineGordon };
enum class Representation { ClosedForm, OdeTable, SolutionDependent };

std::string label(TripleBranch b);

struct ImmersionParams {
    double beta = 1.0;
    double C_strip = 3.0;  // Prop 4.1(i) strip constant
    double sigma = 3.0;    // Prop 4.3(i)/(ii) strip constant
    double b0 = 2.0;       // IVP data for the ODE branches
    double s0 = 0.0;
    double h = 1e-3;
    double eps = 0.5;  // march half-width
    int a_sign = +1;
    double delta_min = 1e-8;
    double denom_min = 1e-8;
};

// a, b, c and their derivatives with respect to the reduced coordinate
// (or to u for the sine-Gordon triple).
struct TripleValue {
    double a = 0, b = 0, c = 0;
    double da = 0, db = 0, dc = 0;
};

struct NoImmersion {
    std::string proposition;
    std::string reason;
};

class InvalidStrip : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class OdeCollapse : public std::runtime_error {
  public:
    OdeCollapse(const std::string& what, double s) : std::runtime_error(what), s_(s) {}
    double s() const { return s_; }

  private:
    double s_;
};
class DiscriminantCollapse : public OdeCollapse {
  public:
    using OdeCollapse::OdeCollapse;
};
class DenominatorCollapse : public OdeCollapse {
  public:
    using OdeCollapse::OdeCollapse;
};

inline double gauss_residual(double a, double b, double c) { return a * c - b * b + 1.0; }

// b = kappa beta e, a = a_sign sqrt(L), L = sigma e - beta^2 e^2 - 1, c = a - sign a'/k,
// e = exp(2 sign k s).
struct ClosedForm {
    int sign = 1;
    int a_sign = 1;
    double k = 1.0;
    double kappa = -1.0;
    double beta = 0.0;
    double sigma = 1.0;
};
TripleValue closed_form_value(const ClosedForm& cf, double s);
std::pair<double, double> strip_bounds(const ClosedForm& cf);

// b' = g(s, b) with a = (-phi + sign sqrt(Delta))/2, c = a + phi,
// phi = ((mu^2 - 1) b - beta e)/mu, e = exp(2 sign k s / sqrt(1 + mu^2)).
struct OdeSystem {
    int sign = 1;
    double mu = 1.0;
    double k = 1.0;
    double beta = 0.0;
};

template <class R> struct OdePoint {
    R e, phi, Delta, sqrtDelta, a, c, num, denom;
    R g() const { return num / denom; }
};

template <class R> OdePoint<R> ode_point(const OdeSystem& sys, R s, R b) {
    using std::exp;
    using std::sqrt;
    const R mu = sys.mu, k = sys.k, beta = sys.beta, sg = sys.sign;
    const R r = sqrt(R(1) + mu * mu);
    OdePoint<R> p;
    p.e = exp(R(2) * sg * k * s / r);
    p.phi = ((mu * mu - R(1)) * b - beta * p.e) / mu;
    p.Delta = p.phi * p.phi - R(4) * (R(1) - b * b);
    p.sqrtDelta = p.Delta > R(0) ? sqrt(p.Delta) : R(0);
    p.a = (-p.phi + sg * p.sqrtDelta) / R(2);
    p.c = p.a + p.phi;
    p.num = sg * R(2) * k * r * b * p.sqrtDelta + R(2) * beta * k / r * p.phi * p.e;
    p.denom = (mu * mu + R(1)) * p.sqrtDelta + sg * (mu * mu - R(1)) * p.phi + sg * R(4) * mu * b;
    return p;
}

// the b ODE with every term on one side; *scale receives |A b'| + |rest|.
template <class R> R ode_residual(const OdeSystem& sys, R s, R b, R bp, R* scale = nullptr) {
    using std::abs;
    using std::sqrt;
    const R mu = sys.mu, k = sys.k, beta = sys.beta, sg = sys.sign;
    const R mu2 = mu * mu, r = sqrt(R(1) + mu2);
    OdePoint<R> p = ode_point(sys, s, b);
    R A = sg * (mu2 + R(1)) * (mu2 + R(1)) * b - sg * (mu2 - R(1)) * beta * p.e + mu * (mu2 + R(1)) * p.sqrtDelta;
    R rest = R(2) * k / r *
             (-sg * mu * (mu2 + R(1)) * p.sqrtDelta * b - (mu2 - R(1)) * beta * p.e * b + beta * beta * p.e * p.e);
    if (scale) *scale = abs(A * bp) + abs(rest);
    return A * bp + rest;
}

template <class R> struct MarchResult {
    std::vector<R> s, b;  // ascending in s
    std::string stop_lo = "extent", stop_hi = "extent";
};

// RK4 from s0 in both directions over [s0 - eps, s0 + eps], halting before any
// stage leaves the admissible set (Delta > delta_min, |denominator| > denom_min).
template <class R>
MarchResult<R> march_b(const OdeSystem& sys, R s0, R b0, R h, R eps, double delta_min, double denom_min) {
    using std::abs;
    auto admissible = [&](R s, R b, std::string* why) {
        OdePoint<R> p = ode_point(sys, s, b);
        if (!(p.Delta > R(delta_min))) {
            if (why) *why = "discriminant";
            return false;
        }
        if (!(abs(p.denom) > R(denom_min))) {
            if (why) *why = "denominator";
            return false;
        }
        return true;
    };
    std::string why;
    if (!admissible(s0, b0, &why)) {
        if (why == "discriminant") throw DiscriminantCollapse("Delta <= delta_min at s0", static_cast<double>(s0));
        throw DenominatorCollapse("|denominator of g| <= denom_min at s0", static_cast<double>(s0));
    }
    auto g = [&](R s, R b, bool& ok) {
        if (!admissible(s, b, nullptr)) {
            ok = false;
            return R(0);
        }
        return ode_point(sys, s, b).g();
    };
    MarchResult<R> out;
    std::vector<R> lo_s, lo_b, hi_s, hi_b;
    for (int dir : {+1, -1}) {
        auto& vs = dir > 0 ? hi_s : lo_s;
        auto& vb = dir > 0 ? hi_b : lo_b;
        std::string& stop = dir > 0 ? out.stop_hi : out.stop_lo;
        long n = static_cast<long>(std::llround(static_cast<double>(eps / h)));
        R s = s0, b = b0, dh = h * R(dir);
        for (long i = 0; i < n; ++i) {
            bool ok = true;
            R k1 = g(s, b, ok);
            R k2 = g(s + dh / R(2), b + dh / R(2) * k1, ok);
            R k3 = g(s + dh / R(2), b + dh / R(2) * k2, ok);
            R k4 = g(s + dh, b + dh * k3, ok);
            R bn = b + dh / R(6) * (k1 + R(2) * k2 + R(2) * k3 + k4);
            R sn = s0 + R(i + 1) * dh;
            if (!ok || !admissible(sn, bn, &why)) {
                stop = ok ? why : "stage left admissible set";
                break;
            }
            s = sn;
            b = bn;
            vs.push_back(s);
            vb.push_back(b);
        }
    }
    for (std::size_t i = lo_s.size(); i-- > 0;) {
        out.s.push_back(lo_s[i]);
        out.b.push_back(lo_b[i]);
    }
    out.s.push_back(s0);
    out.b.push_back(b0);
    out.s.insert(out.s.end(), hi_s.begin(), hi_s.end());
    out.b.insert(out.b.end(), hi_b.begin(), hi_b.end());
    return out;
}

struct OdeTable {
    std::vector<double> s, b, bp;
    std::string stop_lo, stop_hi;
};

class ImmersionTriple {
  public:
    Representation representation = Representation::ClosedForm;
    TripleBranch branch = TripleBranch::Prop41i;
    double kx = 1.0, kt = 0.0;  // s = kx x + kt t
    double s_lo = -INFINITY, s_hi = INFINITY;
    int a_sign = 1;
    ClosedForm closed;
    OdeSystem ode;
    OdeTable table;

    std::string label() const { return pss::label(branch); }
    bool universal() const { return representation != Representation::SolutionDependent; }
    double reduced(double x, double t) const { return kx * x + kt * t; }
    bool contains(double s) const { return s > s_lo && s < s_hi; }
    // universal triples: value and derivative in s
    TripleValue eval(double s) const;
    // sine-Gordon triple: value and derivative in u
    TripleValue eval_u(double u) const;
};

std::variant<ImmersionTriple, NoImmersion> solve_triple(const Family& fam, const ImmersionParams& ip);
ImmersionTriple integrate_b_ode(const OdeSystem& sys, TripleBranch branch, const ImmersionParams& ip, double kx,
                                double kt);

// (E1, E2) of the Codazzi system at jet p and point (x, t).
std::pair<double, double> codazzi_residuals(const Family& fam, const ImmersionTriple& trip, const JetPoint& p,
                                            double x, double t);

}  // namespace pss
