#include "pss/verifier.hpp"

#include <algorithm>
#include <cmath>

#include "pss/parallel.hpp"

namespace pss {

double delta(const Coefficients<double>& c, int i, int j) {
    const auto& f = c.f;
    return f[i - 1][0] * f[j - 1][1] - f[j - 1][0] * f[i - 1][1];
}

double delta(const Family& fam, const JetPoint& p, int i, int j) { return delta(fam.coefficients(p), i, j); }

StructureResiduals structure_residuals(const Family& fam, const JetPoint& p) {
    auto c = fam.coefficient_partials(p);
    auto zt = fam.onshell_zt(p, 2);
    auto Dx = [&](const Dual<double>& g) { return g.grad(0) * p.zi(1) + g.grad(1) * p.zi(2) + g.grad(2) * p.zi(3); };
    auto Dt = [&](const Dual<double>& g) { return g.grad(0) * zt[0] + g.grad(1) * zt[1] + g.grad(2) * zt[2]; };
    Coefficients<double> v;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) v.f[i][j] = c.f[i][j].v;
    double wedge[3] = {-delta(v, 2, 3), delta(v, 1, 3), delta(v, 1, 2)};
    StructureResiduals out;
    for (int i = 0; i < 3; ++i) {
        double dx = Dx(c.f[i][1]);
        double dt = Dt(c.f[i][0]);
        out.R[i] = dx - dt - wedge[i];
        out.scale = std::max({out.scale, std::abs(dx), std::abs(dt), std::abs(wedge[i])});
    }
    return out;
}

Nondegeneracy nondegeneracy(const Family& fam, const JetPoint& p, double tol) {
    auto c = fam.coefficients(p);
    Nondegeneracy n;
    n.delta12 = delta(c, 1, 2);
    double d13 = delta(c, 1, 3), d23 = delta(c, 2, 3);
    n.ok = std::abs(n.delta12) > tol && d13 * d13 + d23 * d23 > tol * tol;
    return n;
}

ConditionResiduals condition_residuals(const Family& fam, const JetPoint& p) {
    using D = Dual<double>;
    const double z0 = p.zi(0), z1 = p.zi(1), z2 = p.zi(2);
    D z0d = D::variable(z0, 0, 3);
    auto c = fam.coefficient_partials(p);
    const double lam = fam.lambda();
    const double mu2 = fam.mu(2), mu3 = fam.mu(3), eta2 = fam.eta(2), eta3 = fam.eta(3);
    D phi[3];
    for (int i = 0; i < 3; ++i) phi[i] = c.f[i][1] + z0d * z0d * c.f[i][0] * lam;
    const D& f11 = c.f[0][0];
    ConditionResiduals r;
    for (int i = 0; i < 3; ++i) {
        r.c36 = std::max(r.c36, std::abs(c.f[i][0].grad(0) + c.f[i][0].grad(2)));
        r.c37 = std::max(r.c37, std::abs(c.f[i][0].grad(1)));
        r.c38 = std::max(r.c38, std::abs(phi[i].grad(2)));
    }
    r.c9 = std::max(std::abs(c.f[1][0].v - mu2 * f11.v - eta2), std::abs(c.f[2][0].v - mu3 * f11.v - eta3));

    const double G = fam.G(z0, z1, z2);
    const double p12 = phi[0].v, p22 = phi[1].v, p32 = phi[2].v;
    const double F = f11.v;
    const double x23 = mu2 * p32 - mu3 * p22;  // mu2 phi32 - mu3 phi22
    const double y23 = eta2 * p32 - eta3 * p22;
    double c39 = -G * f11.grad(0) + (-2.0 * lam * z0 * F - lam * z0 * z0 * f11.grad(0) + phi[0].grad(0)) * z1 +
                 phi[0].grad(1) * z2 + x23 * F + y23;
    D l2 = phi[1] - phi[0] * mu2;
    D l3 = phi[2] - phi[0] * mu3;
    double c40 = ((mu3 * p12 - p32) - mu2 * x23) * F + l2.grad(0) * z1 + l2.grad(1) * z2 - 2.0 * lam * eta2 * z0 * z1 -
                 mu2 * y23 + eta3 * p12;
    double c41 = ((mu2 * p12 - p22) - mu3 * x23) * F + l3.grad(0) * z1 + l3.grad(1) * z2 - 2.0 * lam * eta3 * z0 * z1 -
                 mu3 * y23 + eta2 * p12;
    r.c39 = std::abs(c39);
    r.c40 = std::abs(c40);
    r.c41 = std::abs(c41);
    r.c42 = std::abs((mu2 * p12 - p22) * F + eta2 * p12);
    double big = std::max({std::abs(p12), std::abs(p22), std::abs(p32), std::abs(G)});
    double mus = 1.0 + std::abs(mu2) + std::abs(mu3) + std::abs(eta2) + std::abs(eta3);
    r.scale = std::max(1.0, big * mus * mus * (1.0 + std::abs(F)) * (1.0 + std::abs(f11.grad(0))));
    return r;
}

JetPoint random_jet(const Family& fam, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        JetPoint p;
        p.z.resize(6);
        for (auto& z : p.z) z = U(rng);
        p.w = {U(rng)};
        p.v = {U(rng)};
        if (!fam.in_class()) {
            p.v[0] = std::sin(p.z[0]);
            return p;
        }
        try {
            if (std::abs(fam.fprime(p.z[0] - p.z[2])) < 1e-3) continue;
            if (std::abs(fam.phi12(p.z[0], p.z[1], p.z[2])) < 1e-3) continue;
            fam.evaluate_F(p);
        } catch (const DomainError&) {
            continue;
        }
        return p;
    }
    throw std::runtime_error("random_jet: could not sample an admissible jet for " + fam.id());
}

namespace {

struct Sample {
    StructureResiduals s;
    ConditionResiduals c;
};

}  // namespace

VerificationReport verify_family(const Family& fam, const VerifyOptions& opt) {
    if (opt.samples < 1) throw std::invalid_argument("samples must be >= 1");
    std::mt19937_64 rng(opt.seed);
    std::vector<JetPoint> jets;
    jets.reserve(static_cast<std::size_t>(opt.samples));
    for (int i = 0; i < opt.samples; ++i) jets.push_back(random_jet(fam, rng));

    const bool conds = opt.conditions && fam.in_class();
    std::vector<Sample> out(jets.size());
    parallel_for(
        jets.size(),
        [&](std::size_t i) {
            if (opt.structure) out[i].s = structure_residuals(fam, jets[i]);
            if (conds) out[i].c = condition_residuals(fam, jets[i]);
        },
        opt.threads);

    VerificationReport rep;
    rep.family = fam.id();
    rep.seed = opt.seed;
    rep.samples = opt.samples;
    rep.tol = opt.tol;
    rep.conditions_applicable = conds;
    auto& m = rep.residuals;
    if (opt.structure) m["R1_max"] = m["R2_max"] = m["R3_max"] = 0.0;
    if (conds) {
        for (const char* k : {"c9", "c36", "c37", "c38", "c39", "c40", "c41"}) m[k] = 0.0;
        m["c42_min"] = INFINITY;
    }
    bool pass = true;
    for (std::size_t i = 0; i < jets.size(); ++i) {
        std::vector<double> bad;
        bool fail = false;
        if (opt.structure) {
            const auto& s = out[i].s;
            for (int k = 0; k < 3; ++k) {
                std::string key = "R" + std::to_string(k + 1) + "_max";
                m[key] = std::max(m[key], std::abs(s.R[k]));
                if (!(std::abs(s.R[k]) <= opt.tol * s.scale)) fail = true;
            }
            bad = {s.R[0], s.R[1], s.R[2]};
        }
        if (conds) {
            const auto& c = out[i].c;
            const double vals[] = {c.c9, c.c36, c.c37, c.c38, c.c39, c.c40, c.c41};
            const char* keys[] = {"c9", "c36", "c37", "c38", "c39", "c40", "c41"};
            for (int k = 0; k < 7; ++k) {
                m[keys[k]] = std::max(m[keys[k]], vals[k]);
                if (!(vals[k] <= opt.tol * c.scale)) fail = true;
            }
            m["c42_min"] = std::min(m["c42_min"], c.c42);
            if (!(c.c42 > opt.tol)) fail = true;
            bad.insert(bad.end(), std::begin(vals), std::end(vals));
            bad.push_back(c.c42);
        }
        if (fail) {
            pass = false;
            if (rep.failing.size() < 20) rep.failing.push_back({jets[i], bad});
        }
    }
    rep.pass = pass;
    return rep;
}

VerificationReport check_theorem21_conditions(const Family& fam, int samples, double tol, std::uint64_t seed) {
    VerifyOptions opt;
    opt.samples = samples;
    opt.tol = tol;
    opt.seed = seed;
    opt.structure = false;
    opt.conditions = true;
    return verify_family(fam, opt);
}

}  // namespace pss
