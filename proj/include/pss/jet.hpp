#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "pss/expression.hpp"
#include "pss/scalar.hpp"

namespace pss {

class MissingCoordinate : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A point of the jet space: z_i = d^i u/dx^i, w_j = d^j u/dt^j, v_k = d^k u_x/dt^k.
struct JetPoint {
    double x = 0.0;
    double t = 0.0;
    std::vector<double> z;   // z0..zK
    std::vector<double> w;   // w[j-1] = w_j
    std::vector<double> v;   // v[k-1] = v_k
    std::vector<double> zt;  // zt[i] = z_{i,t}; filled by prolong_onshell

    int order() const { return static_cast<int>(z.size()) - 1; }
    double zi(int i) const;
    double wj(int j) const;
    double vk(int k) const;
    double zti(int i) const;
    double value(std::string_view name) const;
};

// Jet coordinate named by an expression variable.
struct Coordinate {
    enum class Kind { X, T, Z, W, V } kind;
    int index = 0;
};
std::optional<Coordinate> parse_coordinate(std::string_view name);

// Standard jet variable list x, t, z0..zK, w1..wM, v1..vN.
std::vector<std::string> jet_variables(int z_order, int w_order = 1, int v_order = 1);

struct EvalResult {
    double value = 0.0;
    std::vector<std::string> names;
    std::vector<double> partials;  // one per expression variable, same order
    double partial(std::string_view name) const;
};

EvalResult eval_with_partials(const Expression& h, const JetPoint& p);
double eval_at(const Expression& h, const JetPoint& p);

// D_x h = h_x + sum h_{z_i} z_{i+1} + sum h_{w_j} v_j. Dependence on any v_k is rejected.
double total_derivative_x(const Expression& h, const JetPoint& p);

// D_x^k of a function of (z0..zm), k = 0..kmax, by Taylor-mode propagation:
// z_i(eps) = sum_j z_{i+j} eps^j / j!.  The callable receives Taylor<double> z0..zm.
template <class Fn>
std::vector<double> total_derivatives_x(Fn&& h, const JetPoint& p, int nargs, int kmax) {
    if (p.order() < nargs - 1 + kmax)
        throw MissingCoordinate("D_x^" + std::to_string(kmax) + " needs z" + std::to_string(nargs - 1 + kmax) +
                                ", jet carries z" + std::to_string(p.order()));
    std::vector<Taylor<double>> zs;
    zs.reserve(static_cast<std::size_t>(nargs));
    for (int i = 0; i < nargs; ++i) {
        std::vector<double> c(static_cast<std::size_t>(kmax) + 1);
        double fact = 1.0;
        for (int j = 0; j <= kmax; ++j) {
            if (j > 0) fact *= j;
            c[static_cast<std::size_t>(j)] = p.z[static_cast<std::size_t>(i + j)] / fact;
        }
        zs.emplace_back(std::move(c));
    }
    Taylor<double> r = h(std::span<const Taylor<double>>(zs));
    std::vector<double> out(static_cast<std::size_t>(kmax) + 1);
    for (int k = 0; k <= kmax; ++k) out[static_cast<std::size_t>(k)] = r.derivative(static_cast<std::size_t>(k));
    return out;
}

// On-shell z_{i,t} for i = 0..upto, given the flux F(z0..z3) of
// u_t - u_xxt = F:  z_{2q,t} = w1 - sum_{i<q} D_x^{2i} F,  z_{2q+1,t} = v1 - sum_{i<q} D_x^{2i+1} F.
template <class Flux>
    requires(!std::is_same_v<std::remove_cvref_t<Flux>, Expression>)
JetPoint prolong_onshell(const JetPoint& p, Flux&& F, int upto) {
    if (upto < 0) throw std::invalid_argument("prolong_onshell: upto must be >= 0");
    if (p.w.empty() || p.v.empty()) throw MissingCoordinate("prolong_onshell needs w1 and v1");
    std::vector<double> dF;
    if (upto >= 2) dF = total_derivatives_x(F, p, 4, upto - 2);
    JetPoint q = p;
    q.zt.assign(static_cast<std::size_t>(upto) + 1, 0.0);
    for (int i = 0; i <= upto; ++i) {
        double base = (i % 2 == 0) ? p.w[0] : p.v[0];
        int first = i % 2;
        for (int k = first; k <= i - 2; k += 2) base -= dF[static_cast<std::size_t>(k)];
        q.zt[static_cast<std::size_t>(i)] = base;
    }
    return q;
}

// Expression overload: F must be an expression in z0..z3 only.
JetPoint prolong_onshell(const JetPoint& p, const Expression& F, int upto);

// D_t h = h_t + sum h_{z_i} z_{i,t} + sum h_{w_j} w_{j+1} + sum h_{v_k} v_{k+1}, with z_{i,t} on-shell.
double total_derivative_t_onshell(const Expression& h, const JetPoint& p, const Expression& F);

}  // namespace pss
