#include "doctest.h"

#include <cmath>
#include <random>

#include "pss/jet.hpp"

using namespace pss;

namespace {

JetPoint jet(std::vector<double> z, double w1 = 0.0, double v1 = 0.0) {
    JetPoint p;
    p.z = std::move(z);
    p.w = {w1};
    p.v = {v1};
    return p;
}

// u(x, t) = sum c[i][j] x^i t^j with i <= 6, j <= 2
struct Poly {
    double c[7][3];
    double d(int kx, int kt, double x, double t) const {
        double s = 0.0;
        for (int i = kx; i <= 6; ++i)
            for (int j = kt; j <= 2; ++j) {
                double fx = 1.0, ft = 1.0;
                for (int m = 0; m < kx; ++m) fx *= i - m;
                for (int m = 0; m < kt; ++m) ft *= j - m;
                s += c[i][j] * fx * ft * std::pow(x, i - kx) * std::pow(t, j - kt);
            }
        return s;
    }
    JetPoint sample(double x, double t, int order) const {
        JetPoint p;
        p.x = x;
        p.t = t;
        for (int k = 0; k <= order; ++k) p.z.push_back(d(k, 0, x, t));
        p.w = {d(0, 1, x, t), d(0, 2, x, t)};
        p.v = {d(1, 1, x, t), d(1, 2, x, t)};
        return p;
    }
};

}  // namespace

TEST_CASE("total derivative in x: examples") {
    auto z0 = parse_expression("z0", {"z0"});
    CHECK(total_derivative_x(z0, jet({1, 2})) == 2.0);
    CHECK(total_derivative_x(parse_expression("z0*z1", {"z0", "z1"}), jet({1, 2, 3})) == 7.0);
    auto lin = parse_expression("z0 - z2", {"z0", "z2"});
    CHECK(total_derivative_x(lin, jet({0.3, 1.5, -2, 4.25})) == doctest::Approx(1.5 - 4.25));
    CHECK_THROWS_AS(total_derivative_x(parse_expression("z2", {"z2"}), jet({1, 2, 3})), MissingCoordinate);
    // w_j depends on x through v_j; v_k itself is rejected
    CHECK(total_derivative_x(parse_expression("w1", {"w1"}), jet({1, 2}, 5, 7)) == 7.0);
    CHECK_THROWS(total_derivative_x(parse_expression("v1", {"v1"}), jet({1, 2}, 5, 7)));
}

TEST_CASE("D_x is a derivation") {
    std::vector<std::string> vars = {"z0", "z1", "z2"};
    auto h = parse_expression("sin(z0)*z2 + z1^2", vars);
    auto g = parse_expression("exp(z0 - z2)*z1", vars);
    auto hg = parse_expression("(sin(z0)*z2 + z1^2)*(exp(z0 - z2)*z1)", vars);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int k = 0; k < 1000; ++k) {
        auto p = jet({U(rng), U(rng), U(rng), U(rng)});
        const double lhs = total_derivative_x(hg, p);
        const double rhs = eval_at(h, p) * total_derivative_x(g, p) + eval_at(g, p) * total_derivative_x(h, p);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("D_x matches d/dx of h along a polynomial solution") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1, 1);
    // c[i][j] ~ 1/i! keeps every x-derivative O(1), so the difference below is accurate to ~1e-12
    Poly u;
    for (int i = 0; i <= 6; ++i)
        for (double& v : u.c[i]) v = U(rng) / std::tgamma(i + 1.0);
    auto h = parse_expression("z0*z1^2 - sin(z2) + w1*z0 + x*t", {"x", "t", "z0", "z1", "z2", "w1"});
    auto along = [&](double x, double t) { return eval_at(h, u.sample(x, t, 3)); };
    for (int k = 0; k < 200; ++k) {
        const double x = U(rng), t = U(rng), d = 1e-3;
        // 4th-order central difference
        const double fd = (-along(x + 2 * d, t) + 8 * along(x + d, t) - 8 * along(x - d, t) + along(x - 2 * d, t)) / (12 * d);
        const double dx = total_derivative_x(h, u.sample(x, t, 3));
        CHECK(std::abs(dx - fd) <= 1e-9 * std::max(1.0, std::abs(dx)));
    }
}

TEST_CASE("prolongation examples") {
    auto F = parse_expression("z0^2*z3 + z1*z2 - z0", {"z0", "z1", "z2", "z3"});
    auto p = jet({0.3, -0.2, 0.5, 0.1, 0.7, -0.4}, 1.3, -0.6);
    auto q = prolong_onshell(p, F, 3);
    CHECK(q.zt[0] == 1.3);
    CHECK(q.zt[1] == -0.6);
    CHECK(q.zt[2] == doctest::Approx(1.3 - F.eval<double>({0.3, -0.2, 0.5, 0.1})).epsilon(1e-15));
    CHECK(q.zt[3] == doctest::Approx(-0.6 - total_derivative_x(F, p)).epsilon(1e-14));

    auto zero = parse_expression("0", {"z0"});
    auto r = prolong_onshell(p, zero, 4);
    for (int k = 0; k <= 4; ++k) CHECK(r.zt[k] == (k % 2 == 0 ? 1.3 : -0.6));

    CHECK_THROWS_AS(prolong_onshell(jet({1, 2, 3}, 0, 0), F, 3), MissingCoordinate);
}

TEST_CASE("prolongation along an exponential solution") {
    // u = exp(kx + wt) solves u_t - u_xxt = u_x + u_xx when w = k/(1 - k)
    auto F = parse_expression("z1 + z2", {"z0", "z1", "z2", "z3"});
    for (double k : {0.3, -0.45, 0.6}) {
        const double w = k / (1 - k), u = std::exp(0.2);
        std::vector<double> z;
        for (int i = 0; i <= 10; ++i) z.push_back(std::pow(k, i) * u);
        auto q = prolong_onshell(jet(z, w * u, k * w * u), F, 7);
        for (int i = 0; i <= 7; ++i) CHECK(q.zt[i] == doctest::Approx(std::pow(k, i) * w * u).epsilon(1e-13));
    }
}

TEST_CASE("prolongation consistency: z_{k+2,t} - z_{k,t} = -D_x^k F") {
    auto F = parse_expression("z0^2*z3 + z1^3 - z0*z2", {"z0", "z1", "z2", "z3"});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int n = 0; n < 100; ++n) {
        std::vector<double> z;
        for (int i = 0; i <= 9; ++i) z.push_back(U(rng));
        auto p = jet(z, U(rng), U(rng));
        auto q = prolong_onshell(p, F, 8);
        auto dF = total_derivatives_x([&](std::span<const Taylor<double>> a) { return F.eval<Taylor<double>>(a); }, p, 4, 6);
        for (int k = 0; k <= 6; ++k) CHECK(q.zt[k + 2] - q.zt[k] == doctest::Approx(-dF[k]).epsilon(1e-12));
    }
}

TEST_CASE("total derivative in t on-shell") {
    auto F = parse_expression("z0*z3 + z1", {"z0", "z1", "z2", "z3"});
    auto p = jet({0.4, 0.1, -0.3, 0.8, 0.2, 0.5}, 0.9, -0.7);
    CHECK(total_derivative_t_onshell(parse_expression("z0", {"z0"}), p, F) == 0.9);
    CHECK(total_derivative_t_onshell(parse_expression("z1", {"z1"}), p, F) == -0.7);
    CHECK(total_derivative_t_onshell(parse_expression("z2", {"z2"}), p, F) ==
          doctest::Approx(0.9 - F.eval<double>({0.4, 0.1, -0.3, 0.8})));
}
