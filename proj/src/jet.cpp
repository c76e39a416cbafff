#include "pss/jet.hpp"

#include <algorithm>
#include <charconv>

namespace pss {

namespace {

double pick(const std::vector<double>& v, int i, int base, const char* name) {
    int slot = i - base;
    if (slot < 0 || slot >= static_cast<int>(v.size()))
        throw MissingCoordinate(std::string("jet does not carry ") + name + std::to_string(i));
    return v[static_cast<std::size_t>(slot)];
}

std::vector<Coordinate> coordinates_of(const Expression& h) {
    std::vector<Coordinate> out;
    for (const auto& name : h.variables()) {
        auto c = parse_coordinate(name);
        if (!c) throw std::invalid_argument("'" + name + "' is not a jet coordinate");
        out.push_back(*c);
    }
    return out;
}

std::vector<Dual<double>> seeded(const Expression& h, const JetPoint& p) {
    std::size_t n = h.variables().size();
    auto used = h.used_variables();
    std::vector<Dual<double>> vals;
    vals.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        // unused slots may name coordinates the jet lacks
        double x = used[i] ? p.value(h.variables()[i]) : 0.0;
        vals.push_back(Dual<double>::variable(x, i, n));
    }
    return vals;
}

}  // namespace

double JetPoint::zi(int i) const { return pick(z, i, 0, "z"); }
double JetPoint::wj(int j) const { return pick(w, j, 1, "w"); }
double JetPoint::vk(int k) const { return pick(v, k, 1, "v"); }
double JetPoint::zti(int i) const {
    if (i < 0 || i >= static_cast<int>(zt.size()))
        throw MissingCoordinate("jet is not prolonged to z" + std::to_string(i) + ",t");
    return zt[static_cast<std::size_t>(i)];
}

double JetPoint::value(std::string_view name) const {
    auto c = parse_coordinate(name);
    if (!c) throw std::invalid_argument("'" + std::string(name) + "' is not a jet coordinate");
    switch (c->kind) {
        case Coordinate::Kind::X: return x;
        case Coordinate::Kind::T: return t;
        case Coordinate::Kind::Z: return zi(c->index);
        case Coordinate::Kind::W: return wj(c->index);
        case Coordinate::Kind::V: return vk(c->index);
    }
    return 0.0;
}

std::optional<Coordinate> parse_coordinate(std::string_view name) {
    if (name == "x") return Coordinate{Coordinate::Kind::X, 0};
    if (name == "t") return Coordinate{Coordinate::Kind::T, 0};
    if (name.size() < 2) return std::nullopt;
    Coordinate::Kind kind;
    switch (name[0]) {
        case 'z': kind = Coordinate::Kind::Z; break;
        case 'w': kind = Coordinate::Kind::W; break;
        case 'v': kind = Coordinate::Kind::V; break;
        default: return std::nullopt;
    }
    int idx = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
    if (ec != std::errc() || ptr != name.data() + name.size()) return std::nullopt;
    if (kind != Coordinate::Kind::Z && idx < 1) return std::nullopt;
    return Coordinate{kind, idx};
}

std::vector<std::string> jet_variables(int z_order, int w_order, int v_order) {
    std::vector<std::string> names{"x", "t"};
    for (int i = 0; i <= z_order; ++i) names.push_back("z" + std::to_string(i));
    for (int j = 1; j <= w_order; ++j) names.push_back("w" + std::to_string(j));
    for (int k = 1; k <= v_order; ++k) names.push_back("v" + std::to_string(k));
    return names;
}

double EvalResult::partial(std::string_view name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return 0.0;
    return partials[static_cast<std::size_t>(it - names.begin())];
}

EvalResult eval_with_partials(const Expression& h, const JetPoint& p) {
    coordinates_of(h);
    auto vals = seeded(h, p);
    Dual<double> r = h.eval<Dual<double>>(vals);
    EvalResult out;
    out.value = r.v;
    out.names = h.variables();
    out.partials.resize(out.names.size());
    for (std::size_t i = 0; i < out.names.size(); ++i) out.partials[i] = r.grad(i);
    return out;
}

double eval_at(const Expression& h, const JetPoint& p) {
    std::vector<double> vals;
    auto used = h.used_variables();
    for (std::size_t i = 0; i < h.variables().size(); ++i) vals.push_back(used[i] ? p.value(h.variables()[i]) : 0.0);
    return h.eval<double>(vals);
}

double total_derivative_x(const Expression& h, const JetPoint& p) {
    auto coords = coordinates_of(h);
    auto used = h.used_variables();
    EvalResult r = eval_with_partials(h, p);
    double acc = 0.0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (!used[i]) continue;
        const auto& c = coords[i];
        double g = r.partials[i];
        switch (c.kind) {
            case Coordinate::Kind::X: acc += g; break;
            case Coordinate::Kind::T: break;
            case Coordinate::Kind::Z: acc += g * p.zi(c.index + 1); break;
            case Coordinate::Kind::W: acc += g * p.vk(c.index); break;
            case Coordinate::Kind::V:
                throw std::invalid_argument("total_derivative_x: dependence on v" + std::to_string(c.index) +
                                            " needs off-shell v" + std::to_string(c.index) + ",x");
        }
    }
    return acc;
}

namespace {

struct ExpressionFlux {
    const Expression& F;
    std::vector<int> slot;  // expression slot -> z index
    Taylor<double> operator()(std::span<const Taylor<double>> z) const {
        std::vector<Taylor<double>> vals(F.variables().size());
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = z[static_cast<std::size_t>(slot[i])];
        return F.eval<Taylor<double>>(vals);
    }
};

ExpressionFlux make_flux(const Expression& F) {
    ExpressionFlux flux{F, {}};
    auto used = F.used_variables();
    for (std::size_t i = 0; i < F.variables().size(); ++i) {
        auto c = parse_coordinate(F.variables()[i]);
        if (c && c->kind == Coordinate::Kind::Z && c->index <= 3) {
            flux.slot.push_back(c->index);
        } else if (!used[i]) {
            flux.slot.push_back(0);
        } else {
            throw std::invalid_argument("flux may depend on z0..z3 only, found '" + F.variables()[i] + "'");
        }
    }
    return flux;
}

}  // namespace

JetPoint prolong_onshell(const JetPoint& p, const Expression& F, int upto) {
    return prolong_onshell(p, make_flux(F), upto);
}

double total_derivative_t_onshell(const Expression& h, const JetPoint& p, const Expression& F) {
    auto coords = coordinates_of(h);
    auto used = h.used_variables();
    int need = 1;
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (used[i] && coords[i].kind == Coordinate::Kind::Z) need = std::max(need, coords[i].index);
    JetPoint q = prolong_onshell(p, make_flux(F), need);
    EvalResult r = eval_with_partials(h, p);
    double acc = 0.0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (!used[i]) continue;
        const auto& c = coords[i];
        double g = r.partials[i];
        switch (c.kind) {
            case Coordinate::Kind::X: break;
            case Coordinate::Kind::T: acc += g; break;
            case Coordinate::Kind::Z: acc += g * q.zti(c.index); break;
            case Coordinate::Kind::W: acc += g * p.wj(c.index + 1); break;
            case Coordinate::Kind::V: acc += g * p.vk(c.index + 1); break;
        }
    }
    return acc;
}

}  // namespace pss
