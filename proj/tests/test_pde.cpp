#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "pss/pde.hpp"

using namespace pss;

namespace {

constexpr double kPi = std::numbers::pi;

Grid1D periodic(int nx) { return Grid1D{0.0, 2 * kPi, nx, true}; }

std::vector<double> sample(const Grid1D& g, double (*f)(double)) {
    std::vector<double> u;
    for (int i = 0; i < g.points(); ++i) u.push_back(f(g.x(i)));
    return u;
}

SolutionField numeric_field(const Grid1D& g, std::vector<double> u, std::vector<double> ut) {
    SolutionField f;
    f.provenance = Provenance::Numeric;
    f.grid = g;
    f.times = {0.0};
    f.u = {std::move(u)};
    f.ut = {std::move(ut)};
    return f;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double kink_error(int nx, int order) {
    Grid1D g{-30.0, 15.0, nx, false};
    MolOptions opt;
    opt.t_max = 1.0;
    opt.dt = 0.5 * g.dx();
    opt.snapshots = 2;
    opt.order = order;
    std::vector<double> u0;
    for (int i = 0; i < g.points(); ++i) u0.push_back(exact_sine_gordon_kink(1.0, g.x(i), 0.0));
    auto f = solve_sine_gordon(g, u0, 0.0, opt);
    double e = 0.0;
    for (int i = 0; i < g.points(); ++i) e = std::max(e, std::abs(f.u[1][static_cast<std::size_t>(i)] - exact_sine_gordon_kink(1.0, g.x(i), 1.0)));
    return e;
}

// max over nodes of |z_{2,t} from the field - (w1 - F)|, the mismatch between
// the marched u_t and the on-shell prolongation
double bridge_gap(int nx) {
    Family nov = novikov_preset();
    Grid1D g = periodic(nx);
    MolOptions opt;
    opt.t_max = 0.2;
    opt.dt = 1e-3;
    opt.snapshots = 2;
    auto f = solve_mol(nov, g, sample(g, [](double x) { return 0.1 + 0.05 * std::cos(x); }), opt);
    auto ut_xx = periodic_derivative(g, f.ut[1], 2);
    double gap = 0.0;
    for (int i = 0; i < nx; ++i) {
        JetPoint p = f.sample_jet(g.x(i), 0.2, 5);
        const double onshell = nov.onshell_zt(p, 2)[2];
        gap = std::max(gap, std::abs(ut_xx[static_cast<std::size_t>(i)] - onshell));
    }
    return gap;
}

}  // namespace

TEST_CASE("Helmholtz inverse on eigenfunctions") {
    Grid1D g = periodic(64);
    auto rhs = sample(g, [](double x) { return std::sin(3 * x); });
    auto u = helmholtz_invert(g, rhs, HelmholtzMethod::Spectral);
    for (int i = 0; i < g.nx; ++i) CHECK(std::abs(u[static_cast<std::size_t>(i)] - std::sin(3 * g.x(i)) / 10) <= 1e-14);
    std::vector<double> c(64, 2.5);
    for (auto m : {HelmholtzMethod::Spectral, HelmholtzMethod::CyclicTridiagonal})
        for (double v : helmholtz_invert(g, c, m)) CHECK(v == doctest::Approx(2.5).epsilon(1e-13));
    CHECK_THROWS(helmholtz_invert(Grid1D{0, 1, 32, false}, std::vector<double>(33, 0.0), HelmholtzMethod::Spectral));
}

TEST_CASE("Helmholtz roundtrip and positivity") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> N;
    for (int nx : {16, 64, 257}) {
        Grid1D g = periodic(nx);
        for (auto m : {HelmholtzMethod::Spectral, HelmholtzMethod::CyclicTridiagonal}) {
            for (int trial = 0; trial < 5; ++trial) {
                std::vector<double> u(static_cast<std::size_t>(nx));
                for (double& x : u) x = N(rng);
                auto back = helmholtz_invert(g, helmholtz_apply(g, u, m), m);
                CHECK(max_abs_diff(back, u) <= 1e-10);
                auto Hu = helmholtz_invert(g, u, m);
                double ip = 0.0;
                for (int i = 0; i < nx; ++i) ip += Hu[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
                CHECK(ip > 0.0);
            }
        }
    }
}

TEST_CASE("central stencils") {
    auto w = central_weights(1, 4);
    REQUIRE(w.size() == 5);
    CHECK(w[0] == doctest::Approx(1.0 / 12));
    CHECK(w[1] == doctest::Approx(-8.0 / 12));
    CHECK(w[2] == doctest::Approx(0.0));
    auto w2 = central_weights(2, 2);
    CHECK(w2 == std::vector<double>{1.0, -2.0, 1.0});
    CHECK(central_weights(3, 4).size() == 7);
    CHECK_THROWS(central_weights(1, 3));
}

TEST_CASE("kink") {
    CHECK(exact_sine_gordon_kink(1.0, 0.0, 0.0) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(exact_sine_gordon_kink(1.0, -20.0, 0.0) < 1e-8);
    CHECK(2 * kPi - exact_sine_gordon_kink(1.0, 20.0, 0.0) < 1e-8);
    CHECK(exact_sine_gordon_kink(2.0, -8.0, -8.0) < 1e-8);
    CHECK_THROWS(exact_sine_gordon_kink(0.0, 0.0, 0.0));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-5, 5);
    for (double eta : {1.0, 0.6, -1.5}) {
        auto f = sine_gordon_kink_field(eta, Grid1D{-10, 10, 32, false}, {0.0});
        for (int k = 0; k < 100; ++k) {
            JetPoint p = f.sample_jet(U(rng), U(rng), 3);
            CHECK(std::abs(p.v[0] - std::sin(p.z[0])) < 1e-12);
            CHECK(p.z[0] == doctest::Approx(exact_sine_gordon_kink(eta, p.x, p.t)).epsilon(1e-14));
        }
    }
}

TEST_CASE("exact jets") {
    auto cube = exact_field("x^3", periodic(16), {0.0});
    auto p = cube.sample_jet(0.7, 0.3, 6);
    CHECK(p.z[0] == doctest::Approx(0.343));
    CHECK(p.z[1] == doctest::Approx(3 * 0.49));
    CHECK(p.z[3] == 6.0);
    CHECK(p.z[4] == 0.0);
    CHECK(p.z[6] == 0.0);
    CHECK(p.w[0] == 0.0);

    auto flat = exact_field("1.5", periodic(16), {0.0});
    auto q = flat.sample_jet(1.0, 2.0, 4);
    CHECK(q.z[0] == 1.5);
    for (int k = 1; k <= 4; ++k) CHECK(q.z[static_cast<std::size_t>(k)] == 0.0);
    CHECK(q.w[0] == 0.0);
    CHECK(q.v[0] == 0.0);

    auto mixed = exact_field("sin(x)*exp(2*t)", periodic(16), {0.0});
    auto r = mixed.sample_jet(0.4, 0.1, 2);
    CHECK(r.w[0] == doctest::Approx(2 * std::sin(0.4) * std::exp(0.2)));
    CHECK(r.v[0] == doctest::Approx(2 * std::cos(0.4) * std::exp(0.2)));
    CHECK(r.z[2] == doctest::Approx(-std::sin(0.4) * std::exp(0.2)));
}

TEST_CASE("numeric jets") {
    Grid1D g = periodic(32);
    auto f = numeric_field(g, std::vector<double>(32, 1.5), std::vector<double>(32, 0.0));
    auto p = f.sample_jet(g.x(5), 0.0, 5);
    CHECK(p.z[0] == 1.5);
    for (int k = 1; k <= 5; ++k) CHECK(std::abs(p.z[static_cast<std::size_t>(k)]) <= 1e-9);
    CHECK(p.w[0] == 0.0);
    CHECK_THROWS_AS(f.sample_jet(g.x(5), 0.0, 6), std::invalid_argument);
    CHECK_THROWS_AS(f.sample_jet(g.x(5) + 0.01, 0.0, 2), std::out_of_range);
    CHECK_THROWS_AS(f.sample_jet(g.x(5), 0.5, 2), std::out_of_range);

    Grid1D open{-1, 1, 32, false};
    auto e = numeric_field(open, std::vector<double>(33, 0.0), std::vector<double>(33, 0.0));
    CHECK_THROWS_AS(e.sample_jet(open.x(1), 0.0, 2), std::out_of_range);
    CHECK_NOTHROW(e.sample_jet(open.x(16), 0.0, 2));
}

TEST_CASE("fourth-order stencil on sin x") {
    auto err = [](int nx) {
        Grid1D g = periodic(nx);
        auto f = numeric_field(g, sample(g, [](double x) { return std::sin(x); }), std::vector<double>(static_cast<std::size_t>(nx), 0.0));
        double e = 0.0;
        for (int i = 0; i < nx; ++i) e = std::max(e, std::abs(f.sample_jet(g.x(i), 0.0, 2).z[2] + std::sin(g.x(i))));
        return e;
    };
    const double e1 = err(256), e2 = err(512);
    CAPTURE(e1);
    CAPTURE(e2);
    CHECK(e1 < 1e-7);
    CHECK(std::abs((e1 / e2) / 16.0 - 1.0) <= 0.25);
}

TEST_CASE("Novikov: zero data stays zero") {
    Grid1D g = periodic(64);
    MolOptions opt;
    opt.t_max = 1.0;
    opt.dt = 1e-2;
    auto f = solve_mol(novikov_preset(), g, std::vector<double>(64, 0.0), opt);
    REQUIRE(f.u.size() == 11);
    for (const auto& row : f.u)
        for (double v : row) CHECK(v == 0.0);
    CHECK(f.times.back() == 1.0);
}

TEST_CASE("Novikov conserves the H1 norm") {
    for (auto m : {HelmholtzMethod::Spectral, HelmholtzMethod::CyclicTridiagonal}) {
        Grid1D g = periodic(256);
        MolOptions opt;
        opt.t_max = 1.0;
        opt.dt = 1e-3;
        opt.method = m;
        auto f = solve_mol(novikov_preset(), g, sample(g, [](double x) { return 0.1 + 0.05 * std::cos(x); }), opt);
        const double h0 = h1_norm(g, f.u.front());
        double drift = 0.0;
        for (const auto& row : f.u) drift = std::max(drift, std::abs(h1_norm(g, row) - h0) / h0);
        CAPTURE(to_string(m));
        CHECK(drift < 1e-6);
    }
}

TEST_CASE("march guards") {
    Grid1D g = periodic(64);
    MolOptions opt;
    opt.dt = 2.0;
    CHECK_THROWS_AS(solve_mol(novikov_preset(), g, std::vector<double>(64, 0.5), opt), CflViolation);

    // f(s) = -s flips the dissipation of u_t - u_xxt = u_xx + u_x into growth
    FamilySpec s = preset_spec("t22-demo");
    s.f = "-s";
    MolOptions grow;
    grow.t_max = 20.0;
    grow.dt = 1e-2;
    grow.blowup_cap = 10.0;
    try {
        solve_mol(Family(s), g, sample(g, [](double x) { return std::cos(x); }), grow);
        FAIL("expected blow-up");
    } catch (const BlowUp& e) {
        CHECK(e.time() > 0.0);
        CHECK(e.time() < 20.0);
    }
    CHECK_THROWS(solve_mol(sine_gordon_preset(), g, std::vector<double>(64, 0.0), MolOptions{}));
    CHECK_THROWS(solve_mol(novikov_preset(), Grid1D{0, 1, 8, true}, std::vector<double>(8, 0.0), MolOptions{}));
}

TEST_CASE("sine-Gordon march converges at the declared order") {
    const double a4 = kink_error(512, 4), b4 = kink_error(1024, 4);
    const double a2 = kink_error(512, 2), b2 = kink_error(1024, 2);
    CAPTURE(a4);
    CAPTURE(b4);
    CAPTURE(a2);
    CAPTURE(b2);
    CHECK(std::abs((a4 / b4) / 16.0 - 1.0) <= 0.25);
    CHECK(std::abs((a2 / b2) / 4.0 - 1.0) <= 0.25);
    CHECK(b4 < 1e-5);
}

TEST_CASE("on-shell bridge for marched Novikov fields") {
    const double g1 = bridge_gap(32), g2 = bridge_gap(64);
    CAPTURE(g1);
    CAPTURE(g2);
    CHECK(std::abs((g1 / g2) / 16.0 - 1.0) <= 0.25);
}
