#include "pss/immersion.hpp"

#include <algorithm>

#include "pss/verifier.hpp"

namespace pss {

std::string label(TripleBranch b) {
    switch (b) {
        case TripleBranch::Prop41i: return "Prop 4.1(i)";
        case TripleBranch::Prop41ii: return "Prop 4.1(ii)";
        case TripleBranch::Prop43i: return "Prop 4.3(i)";
        case TripleBranch::Prop43ii: return "Prop 4.3(ii)";
        case TripleBranch::Prop43iii: return "Prop 4.3(iii)";
        case TripleBranch::SineGordon: return "sine-Gordon (solution-dependent)";
    }
    return "?";
}

TripleValue closed_form_value(const ClosedForm& cf, double s) {
    const double sg = cf.sign, k = cf.k, beta = cf.beta, sigma = cf.sigma;
    const double e = std::exp(2.0 * sg * k * s);
    const double L = sigma * e - beta * beta * e * e - 1.0;
    if (!(L > 0.0)) throw DomainError("L(s) <= 0 outside the strip", "a = sqrt(L)");
    const double dL = 2.0 * sg * k * (sigma * e - 2.0 * beta * beta * e * e);
    const double sq = std::sqrt(L);
    TripleValue v;
    v.a = cf.a_sign * sq;
    v.da = cf.a_sign * dL / (2.0 * sq);
    v.b = cf.kappa * beta * e;
    v.db = cf.kappa * beta * 2.0 * sg * k * e;
    // c = a - sg a'/k, simplified to avoid cancellation when a is large
    const double ac = beta * beta * e * e - 1.0;
    v.c = ac / v.a;
    v.dc = 4.0 * sg * k * beta * beta * e * e / v.a - ac * v.da / (v.a * v.a);
    return v;
}

std::pair<double, double> strip_bounds(const ClosedForm& cf) {
    const double sigma = cf.sigma, beta = cf.beta;
    if (!(sigma > 0.0)) throw InvalidStrip("strip constant must be > 0");
    if (!(sigma * sigma > 4.0 * beta * beta)) throw InvalidStrip("strip needs C² > 4β²");
    if (cf.k == 0.0) throw InvalidStrip("degenerate argument scale");
    const double rate = 2.0 * cf.sign * cf.k;  // e = exp(rate s)
    double ylo, yhi;
    if (beta == 0.0) {
        ylo = 1.0 / sigma;
        yhi = INFINITY;
    } else {
        double root = std::sqrt(sigma * sigma - 4.0 * beta * beta);
        ylo = (sigma - root) / (2.0 * beta * beta);
        yhi = (sigma + root) / (2.0 * beta * beta);
    }
    double slo = std::log(ylo) / rate;
    double shi = std::isinf(yhi) ? (rate > 0 ? INFINITY : -INFINITY) : std::log(yhi) / rate;
    if (slo > shi) std::swap(slo, shi);
    return {slo, shi};
}

TripleValue ImmersionTriple::eval(double s) const {
    if (representation == Representation::ClosedForm) return closed_form_value(closed, s);
    if (representation == Representation::SolutionDependent)
        throw std::logic_error("sine-Gordon triple is evaluated from u, not from a reduced coordinate");
    const auto& T = table;
    if (!(s >= T.s.front() && s <= T.s.back())) throw DomainError("s outside the marched interval", label());
    std::size_t i = static_cast<std::size_t>(std::upper_bound(T.s.begin(), T.s.end(), s) - T.s.begin());
    i = std::clamp<std::size_t>(i, 1, T.s.size() - 1) - 1;
    double b;
    if (T.s.size() == 1) {
        b = T.b[0];
    } else {
        const double h = T.s[i + 1] - T.s[i];
        const double u = (s - T.s[i]) / h;
        const double u2 = u * u, u3 = u2 * u;
        b = (2 * u3 - 3 * u2 + 1) * T.b[i] + (u3 - 2 * u2 + u) * h * T.bp[i] + (-2 * u3 + 3 * u2) * T.b[i + 1] +
            (u3 - u2) * h * T.bp[i + 1];
    }
    OdePoint<double> p = ode_point(ode, s, b);
    const double mu = ode.mu, sg = ode.sign;
    const double r = std::sqrt(1.0 + mu * mu);
    TripleValue v;
    v.a = p.a;
    v.b = b;
    v.c = p.c;
    v.db = p.g();
    const double de = 2.0 * sg * ode.k / r * p.e;
    const double dphi = ((mu * mu - 1.0) * v.db - ode.beta * de) / mu;
    const double dDelta = 2.0 * p.phi * dphi + 8.0 * b * v.db;
    v.da = (-dphi + sg * dDelta / (2.0 * p.sqrtDelta)) / 2.0;
    v.dc = v.da + dphi;
    return v;
}

TripleValue ImmersionTriple::eval_u(double u) const {
    const double s = std::sin(u);
    if (s == 0.0) throw DomainError("pole of a = 2/tan u", "sin u = 0");
    TripleValue v;
    v.a = a_sign * 2.0 * std::cos(u) / s;
    v.b = -a_sign;
    v.c = 0.0;
    v.da = -a_sign * 2.0 / (s * s);
    return v;
}

ImmersionTriple integrate_b_ode(const OdeSystem& sys, TripleBranch branch, const ImmersionParams& ip, double kx,
                                double kt) {
    if (!(ip.h > 0.0)) throw std::invalid_argument("ODE step h must be > 0");
    auto m = march_b<double>(sys, ip.s0, ip.b0, ip.h, ip.eps, ip.delta_min, ip.denom_min);
    ImmersionTriple t;
    t.representation = Representation::OdeTable;
    t.branch = branch;
    t.kx = kx;
    t.kt = kt;
    t.ode = sys;
    t.a_sign = sys.sign;
    t.table.s = m.s;
    t.table.b = m.b;
    for (std::size_t i = 0; i < m.s.size(); ++i) t.table.bp.push_back(ode_point(sys, m.s[i], m.b[i]).g());
    t.table.stop_lo = m.stop_lo;
    t.table.stop_hi = m.stop_hi;
    t.s_lo = m.s.front();
    t.s_hi = m.s.back();
    return t;
}

std::variant<ImmersionTriple, NoImmersion> solve_triple(const Family& fam, const ImmersionParams& ip) {
    const auto& q = fam.params();
    const int sg = fam.sign();
    auto closed = [&](TripleBranch br, double k, double kappa, double sigma, double kx, double kt) {
        ImmersionTriple t;
        t.representation = Representation::ClosedForm;
        t.branch = br;
        t.kx = kx;
        t.kt = kt;
        t.a_sign = ip.a_sign;
        t.closed = ClosedForm{sg, ip.a_sign, k, kappa, ip.beta, sigma};
        auto [lo, hi] = strip_bounds(t.closed);
        t.s_lo = lo;
        t.s_hi = hi;
        return t;
    };
    switch (fam.branch()) {
        case Branch::T22:
            if (q.mu2 == 0.0) return closed(TripleBranch::Prop41i, q.eta2, -1.0, ip.C_strip, 1.0, 0.0);
            return integrate_b_ode(OdeSystem{sg, q.mu2, q.eta2, ip.beta}, TripleBranch::Prop41ii, ip, 1.0, 0.0);
        case Branch::T23:
            return NoImmersion{"Prop 4.2", "there is no possibility of a local isometric immersion"};
        case Branch::T24:
            if (q.mu2 == 0.0 && q.eta2 == 0.0) return closed(TripleBranch::Prop43i, q.C, +1.0, ip.sigma, 0.0, 1.0);
            if (q.mu2 == 0.0) return closed(TripleBranch::Prop43ii, 1.0, -1.0, ip.sigma, q.eta2, q.C);
            return integrate_b_ode(OdeSystem{sg, q.mu2, 1.0, ip.beta}, TripleBranch::Prop43iii, ip, q.eta2, q.C);
        case Branch::T25i:
            return NoImmersion{"Prop 4.4", "does not allow for a local isometric immersion"};
        case Branch::T25ii:
            return NoImmersion{"Prop 4.5", "does not allow for a local isometric immersion"};
        case Branch::SineGordon: {
            ImmersionTriple t;
            t.representation = Representation::SolutionDependent;
            t.branch = TripleBranch::SineGordon;
            t.a_sign = ip.a_sign;
            t.kx = t.kt = 0.0;
            return t;
        }
    }
    throw std::logic_error("unhandled branch");
}

std::pair<double, double> codazzi_residuals(const Family& fam, const ImmersionTriple& trip, const JetPoint& p,
                                            double x, double t) {
    TripleValue v;
    double ax, at, bx, bt, cx, ct;
    if (trip.universal()) {
        v = trip.eval(trip.reduced(x, t));
        ax = trip.kx * v.da;
        at = trip.kt * v.da;
        bx = trip.kx * v.db;
        bt = trip.kt * v.db;
        cx = trip.kx * v.dc;
        ct = trip.kt * v.dc;
    } else {
        v = trip.eval_u(p.zi(0));
        ax = v.da * p.zi(1);
        at = v.da * p.wj(1);
        bx = bt = cx = ct = 0.0;
    }
    auto c = fam.coefficients(p);
    const auto& f = c.f;
    double d13 = delta(c, 1, 3), d23 = delta(c, 2, 3);
    double E1 = f[0][0] * at + f[1][0] * bt - f[0][1] * ax - f[1][1] * bx - 2.0 * v.b * d13 + (v.a - v.c) * d23;
    double E2 = f[0][0] * bt + f[1][0] * ct - f[0][1] * bx - f[1][1] * cx + (v.a - v.c) * d13 + 2.0 * v.b * d23;
    return {E1, E2};
}

}  // namespace pss
