#include "doctest.h"

#include <cmath>
#include <random>

#include "pss/immersion.hpp"
#include "pss/verifier.hpp"

using namespace pss;

namespace {

ImmersionTriple triple_of(const Family& fam, const ImmersionParams& ip = {}) {
    auto r = solve_triple(fam, ip);
    REQUIRE(std::holds_alternative<ImmersionTriple>(r));
    return std::get<ImmersionTriple>(r);
}

// max over (jet, point) samples of |E1|, |E2|, points drawn over the inner 99% of the triple's interval
double codazzi_max(const Family& fam, const ImmersionTriple& trip, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double lo = std::isfinite(trip.s_lo) ? trip.s_lo : trip.s_hi - 10.0;
    const double hi = std::isfinite(trip.s_hi) ? trip.s_hi : trip.s_lo + 10.0;
    std::uniform_real_distribution<double> S(lo + 0.005 * (hi - lo), hi - 0.005 * (hi - lo));
    std::uniform_real_distribution<double> U(-1, 1);
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        JetPoint p = random_jet(fam, rng);
        const double s = S(rng);
        double x, t;
        if (trip.kx != 0.0) {
            t = U(rng);
            x = (s - trip.kt * t) / trip.kx;
        } else {
            x = U(rng);
            t = s / trip.kt;
        }
        auto [E1, E2] = codazzi_residuals(fam, trip, p, x, t);
        worst = std::max({worst, std::abs(E1), std::abs(E2)});
    }
    return worst;
}

// max |ode residual| / scale over the common interior, b' from a 5-point difference of the marched b
long double back_substitution(const OdeSystem& sys, long double h, long double b0, long double half) {
    auto m = march_b<long double>(sys, 0.0L, b0, h, 0.5L, 1e-8, 1e-8);
    long double worst = 0.0L;
    for (std::size_t i = 2; i + 2 < m.s.size(); ++i) {
        if (std::abs(m.s[i]) > half) continue;
        long double bp = (m.b[i - 2] - 8 * m.b[i - 1] + 8 * m.b[i + 1] - m.b[i + 2]) / (12 * h);
        long double scale = 0.0L;
        long double r = ode_residual<long double>(sys, m.s[i], m.b[i], bp, &scale);
        worst = std::max(worst, std::abs(r) / std::max(1.0L, scale));
    }
    return worst;
}

}  // namespace

TEST_CASE("gauss_residual") {
    CHECK(gauss_residual(0, 1, 0) == 0.0);
    CHECK(gauss_residual(1, -1, 0) == 0.0);
    CHECK(gauss_residual(2, 1, 1) == 2.0);
}

TEST_CASE("x-only closed form at the reference point") {
    ImmersionParams ip;
    ip.C_strip = 3.0;
    ip.beta = 1.0;
    auto trip = triple_of(preset("t22-demo"), ip);
    CHECK(trip.branch == TripleBranch::Prop41i);
    CHECK(trip.label() == "Prop 4.1(i)");
    CHECK(trip.kx == 1.0);
    CHECK(trip.kt == 0.0);
    CHECK(std::abs(std::exp(2 * trip.s_lo) - (3 - std::sqrt(5.0)) / 2) <= 1e-12);
    CHECK(std::abs(std::exp(2 * trip.s_hi) - (3 + std::sqrt(5.0)) / 2) <= 1e-12);
    auto v = trip.eval(0.0);
    CHECK(v.a == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(v.b == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(v.c) <= 1e-14);
    CHECK(v.da == doctest::Approx(1.0).epsilon(1e-14));
    // the two Codazzi reductions with mu2 = 0, eta2 = 1
    CHECK(std::abs(-v.da + (v.a - v.c)) <= 1e-14);
    CHECK(std::abs(-v.db + 2 * v.b) <= 1e-14);
    CHECK(std::abs(gauss_residual(v.a, v.b, v.c)) <= 1e-14);
}

TEST_CASE("strip bounds") {
    ClosedForm cf{1, 1, 1.0, -1.0, 1.0, 3.0};
    auto [lo, hi] = strip_bounds(cf);
    CHECK(lo == doctest::Approx(0.5 * std::log(0.3819660112501051)).epsilon(1e-14));
    CHECK(hi == doctest::Approx(0.5 * std::log(2.618033988749895)).epsilon(1e-14));
    cf.sigma = 1.0;
    CHECK_THROWS_AS(strip_bounds(cf), InvalidStrip);
    cf.sigma = -3.0;
    CHECK_THROWS_AS(strip_bounds(cf), InvalidStrip);
    ClosedForm one{1, 1, 1.0, -1.0, 0.0, 2.0};
    auto [l1, h1] = strip_bounds(one);
    CHECK(l1 == doctest::Approx(-0.5 * std::log(2.0)).epsilon(1e-14));
    CHECK(std::isinf(h1));
    CHECK_THROWS_AS(closed_form_value(cf, 0.0), DomainError);

    ImmersionParams bad;
    bad.C_strip = 1.0;
    bad.beta = 1.0;
    CHECK_THROWS_AS(solve_triple(preset("t22-demo"), bad), InvalidStrip);
    ImmersionParams ok;
    ok.beta = 0.0;
    ok.C_strip = 2.0;
    auto trip = triple_of(preset("t22-demo"), ok);
    CHECK(trip.s_lo == doctest::Approx(-0.5 * std::log(2.0)));
    CHECK(trip.contains(5.0));
    CHECK_FALSE(trip.contains(-0.5 * std::log(2.0) - 1e-9));
    CHECK_THROWS_AS(trip.eval(-1.0), DomainError);
}

TEST_CASE("closed forms satisfy Gauss across the strip") {
    for (const auto& name : {"t22-demo", "novikov", "t24-demo", "t24-c-demo"})
        for (int sg : {1, -1})
            for (int as : {1, -1}) {
                FamilySpec s = preset_spec(name);
                s.sign = sg;
                ImmersionParams ip;
                ip.a_sign = as;
                ip.beta = 0.7;
                auto trip = triple_of(Family(s), ip);
                REQUIRE(trip.representation == Representation::ClosedForm);
                const double lo = trip.s_lo, hi = trip.s_hi;
                double worst = 0.0;
                for (int k = 0; k < 1000; ++k) {
                    const double s_ = lo + (hi - lo) * (0.005 + 0.99 * k / 999.0);
                    auto v = trip.eval(s_);
                    worst = std::max(worst, std::abs(gauss_residual(v.a, v.b, v.c)));
                }
                CAPTURE(name);
                CHECK(worst <= 1e-12);
            }
}

TEST_CASE("a c vanishes only where beta^2 e^2 = 1") {
    // a c = beta^2 e^2 - 1 for these triples, so beta = 0 keeps it at -1
    ImmersionParams ip;
    ip.beta = 0.0;
    auto flat = triple_of(preset("t22-demo"), ip);
    for (int k = 0; k < 100; ++k) {
        auto v = flat.eval(flat.s_lo + 0.01 + 0.1 * k);
        CHECK(v.a * v.c == doctest::Approx(-1.0).epsilon(1e-12));
    }
    ip.beta = 1.0;
    auto trip = triple_of(preset("t22-demo"), ip);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> S(trip.s_lo, trip.s_hi);
    for (int k = 0; k < 1000; ++k) {
        const double s = S(rng);
        if (s <= trip.s_lo || s >= trip.s_hi) continue;
        auto v = trip.eval(s);
        CHECK(v.a * v.c == doctest::Approx(std::exp(4 * s) - 1).epsilon(1e-10));
        if (std::abs(s) > 1e-6) CHECK(v.a * v.c != 0.0);
    }
}

TEST_CASE("flipping the sign mirrors the x-only triple") {
    FamilySpec up = preset_spec("t22-demo"), down = up;
    down.sign = -1;
    auto a = triple_of(Family(up)), b = triple_of(Family(down));
    CHECK(b.s_lo == doctest::Approx(-a.s_hi).epsilon(1e-14));
    CHECK(b.s_hi == doctest::Approx(-a.s_lo).epsilon(1e-14));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> S(a.s_lo, a.s_hi);
    for (int k = 0; k < 200; ++k) {
        const double s = S(rng);
        auto p = a.eval(s), q = b.eval(-s);
        CHECK(q.a == doctest::Approx(p.a).epsilon(1e-12));
        CHECK(q.b == doctest::Approx(p.b).epsilon(1e-12));
        CHECK(q.c == doctest::Approx(p.c).epsilon(1e-12));
    }
}

TEST_CASE("t-only closed form with beta = 0") {
    ImmersionParams ip;
    ip.beta = 0.0;
    ip.sigma = 2.5;
    Family fam = preset("t24-c-demo");
    auto trip = triple_of(fam, ip);
    CHECK(trip.branch == TripleBranch::Prop43i);
    CHECK(trip.kx == 0.0);
    CHECK(trip.kt == 1.0);
    const double C = fam.params().C;
    for (double t : {0.0, 0.3, 1.0, 2.0}) {
        auto v = trip.eval(t);
        const double a = std::sqrt(2.5 * std::exp(2 * C * t) - 1);
        const double da = 2.5 * C * std::exp(2 * C * t) / a;
        CHECK(v.b == 0.0);
        CHECK(v.a == doctest::Approx(a).epsilon(1e-14));
        CHECK(v.c == doctest::Approx(a - da / C).epsilon(1e-13));
    }
}

TEST_CASE("Novikov gets the mixed-argument closed form in eta2 x + C t = x") {
    auto trip = triple_of(novikov_preset());
    CHECK(trip.branch == TripleBranch::Prop43ii);
    CHECK(trip.kx == 1.0);
    CHECK(trip.kt == 0.0);
    CHECK(trip.representation == Representation::ClosedForm);
}

TEST_CASE("every catalog branch yields a triple or a cited non-existence") {
    for (const auto& name : preset_names())
        for (int sg : {1, -1}) {
            FamilySpec s = preset_spec(name);
            s.sign = sg;
            if (s.branch == Branch::T25ii) s.params.tau = solve_t25ii_tau(s.params.mu2, s.params.eta2, s.params.m, s.params.n, s.params.m2);
            Family fam(s);
            auto r = solve_triple(fam, {});
            CAPTURE(name);
            switch (fam.branch()) {
                case Branch::T23: CHECK(std::get<NoImmersion>(r).proposition == "Prop 4.2"); break;
                case Branch::T25i: CHECK(std::get<NoImmersion>(r).proposition == "Prop 4.4"); break;
                case Branch::T25ii: CHECK(std::get<NoImmersion>(r).proposition == "Prop 4.5"); break;
                case Branch::SineGordon:
                    CHECK(std::get<ImmersionTriple>(r).representation == Representation::SolutionDependent);
                    break;
                default: CHECK(std::get<ImmersionTriple>(r).universal()); break;
            }
        }
}

TEST_CASE("Codazzi holds for every universal triple") {
    for (const auto& name : {"t22-demo", "t22-ode-demo", "novikov", "t24-demo", "t24-c-demo", "t24-ode-demo"})
        for (int sg : {1, -1}) {
            FamilySpec s = preset_spec(name);
            s.sign = sg;
            Family fam(s);
            auto trip = triple_of(fam);
            CAPTURE(name);
            CAPTURE(sg);
            const double tol = trip.representation == Representation::OdeTable ? 1e-7 : 1e-9;
            CHECK(codazzi_max(fam, trip, 500, 17) <= tol);
        }
}

TEST_CASE("a triple that is not Codazzi-compatible is caught") {
    ImmersionTriple bogus;
    bogus.representation = Representation::ClosedForm;
    bogus.closed = ClosedForm{1, 1, 2.0, -1.0, 0.5, 3.0};  // wrong rate for eta2 = 1
    auto [lo, hi] = strip_bounds(bogus.closed);
    bogus.s_lo = lo;
    bogus.s_hi = hi;
    CHECK(codazzi_max(preset("t22-demo"), bogus, 50, 3) > 1e-3);
}

TEST_CASE("sine-Gordon triple") {
    auto trip = triple_of(sine_gordon_preset());
    CHECK_FALSE(trip.universal());
    for (double u : {0.3, 1.0, 2.0, 4.0}) {
        auto v = trip.eval_u(u);
        CHECK(v.a == doctest::Approx(2 / std::tan(u)));
        CHECK(v.b == -1.0);
        CHECK(v.c == 0.0);
        CHECK(gauss_residual(v.a, v.b, v.c) == doctest::Approx(0.0));
    }
    CHECK_THROWS_AS(trip.eval_u(0.0), DomainError);
    Family sg = sine_gordon_preset();
    std::mt19937_64 rng(8);
    for (int k = 0; k < 200; ++k) {
        JetPoint p = random_jet(sg, rng);
        if (std::abs(std::sin(p.z[0])) < 1e-2) continue;
        auto [E1, E2] = codazzi_residuals(sg, trip, p, 0.0, 0.0);
        CHECK(std::abs(E1) <= 1e-10 * std::max(1.0, 1 / std::pow(std::sin(p.z[0]), 2)));
        CHECK(std::abs(E2) <= 1e-10);
    }
}

TEST_CASE("ODE branches") {
    for (const auto& name : {"t22-ode-demo", "t24-ode-demo"})
        for (int sg : {1, -1}) {
            FamilySpec s = preset_spec(name);
            s.sign = sg;
            Family fam(s);
            auto trip = triple_of(fam);
            CAPTURE(name);
            CAPTURE(sg);
            REQUIRE(trip.representation == Representation::OdeTable);
            CHECK(trip.table.s.size() > 100);
            for (std::size_t i = 0; i < trip.table.s.size(); ++i) {
                auto v = trip.eval(trip.table.s[i]);
                CHECK(std::abs(gauss_residual(v.a, v.b, v.c)) <= 1e-10);
                CHECK(v.b == doctest::Approx(trip.table.b[i]).epsilon(1e-15));
            }
        }
}

TEST_CASE("ODE back-substitution converges at fourth order") {
    struct Case {
        OdeSystem sys;
        long double b0;
    };
    for (const auto& [sys, b0] : {Case{{1, 0.5, 1.0, 1.0}, 2.0L}, Case{{-1, 0.5, 1.0, 1.0}, -1.5L}, Case{{1, 0.5, 0.5, 1.0}, 1.5L}}) {
        const long double r1 = back_substitution(sys, 1e-3L, b0, 0.4L);
        const long double r2 = back_substitution(sys, 5e-4L, b0, 0.4L);
        CAPTURE(static_cast<double>(r1));
        CAPTURE(static_cast<double>(r2));
        CHECK(r1 <= 1e-6L);
        const double ratio = static_cast<double>(r1 / r2);
        CHECK(ratio >= 12.0);
        CHECK(ratio <= 20.0);
    }
}

TEST_CASE("nearly linear b sits at the rounding floor") {
    // with mu2 = 2 the solution is close to linear, so both errors are at long double rounding
    for (long double b0 : {2.0L, 1.5L, 3.0L}) CHECK(back_substitution(OdeSystem{1, 2.0, 1.0, 0.5}, 1e-3L, b0, 0.4L) <= 1e-12L);
}

TEST_CASE("the march halts where the discriminant collapses") {
    OdeSystem sys{1, 0.5, 1.0, 1.0};
    CHECK_THROWS_AS(march_b<double>(sys, 0.0, 0.0, 1e-3, 0.5, 1e-8, 1e-8), DiscriminantCollapse);
    ImmersionParams ip;
    ip.b0 = 2.0;
    ip.eps = 50.0;
    auto t = integrate_b_ode(sys, TripleBranch::Prop41ii, ip, 1.0, 0.0);
    CHECK((t.table.stop_lo != "extent" || t.table.stop_hi != "extent"));
    for (std::size_t i = 0; i < t.table.s.size(); ++i) {
        auto p = ode_point(sys, t.table.s[i], t.table.b[i]);
        CHECK(p.Delta > 1e-8);
        CHECK(std::abs(p.denom) > 1e-8);
    }
}
