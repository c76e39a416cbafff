#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pss/cli.hpp"
#include "pss/family.hpp"
#include "pss/frame.hpp"
#include "pss/immersion.hpp"
#include "pss/io.hpp"
#include "pss/pde.hpp"
#include "pss/verifier.hpp"

namespace py = pybind11;
using namespace pss;

namespace {

JetPoint make_jet(const std::vector<double>& z, double w1, double v1) {
    JetPoint p;
    p.z = z;
    p.w = {w1};
    p.v = {v1};
    return p;
}

py::dict triple_dict(const ImmersionTriple& t) {
    py::dict d;
    d["proposition"] = t.label();
    d["universal"] = t.universal();
    d["kx"] = t.kx;
    d["kt"] = t.kt;
    d["s_lo"] = t.s_lo;
    d["s_hi"] = t.s_hi;
    return d;
}

}  // namespace

PYBIND11_MODULE(_pss, m) {
    m.doc() = "pseudospherical surfaces toolkit";
    m.attr("__version__") = tool_version();

    m.def("eval_expression", [](const std::string& src, const std::vector<std::string>& vars,
                                const std::vector<double>& vals) {
        return parse_expression(src, vars)(std::span<const double>(vals));
    });

    m.def("preset_names", &preset_names);

    py::class_<JetPoint>(m, "JetPoint")
        .def(py::init(&make_jet), py::arg("z"), py::arg("w1") = 0.0, py::arg("v1") = 0.0)
        .def_readonly("z", &JetPoint::z)
        .def_property_readonly("w1", [](const JetPoint& p) { return p.wj(1); })
        .def_property_readonly("v1", [](const JetPoint& p) { return p.vk(1); });

    py::class_<Family>(m, "Family")
        .def_static("preset", &preset)
        .def_static("from_json", [](const std::string& text) { return build_family(family_from_json(json::parse(text))); })
        .def("to_json", [](const Family& f) { return family_to_json(f.spec()).dump(); })
        .def_property_readonly("id", &Family::id)
        .def_property_readonly("branch", [](const Family& f) { return to_string(f.branch()); })
        .def_property_readonly("sign", &Family::sign)
        .def_property_readonly("lam", &Family::lambda)
        .def("G", [](const Family& f, double z0, double z1, double z2) { return f.G(z0, z1, z2); })
        .def("coefficients", [](const Family& f, const JetPoint& p) {
            auto c = f.coefficients(p);
            std::vector<std::vector<double>> out(3, std::vector<double>(2));
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 2; ++j) out[i][j] = c.f[i][j];
            return out;
        })
        .def("structure_residuals", [](const Family& f, const JetPoint& p) {
            auto r = structure_residuals(f, p);
            return std::vector<double>{r.R[0], r.R[1], r.R[2]};
        })
        .def("random_jet", [](const Family& f, std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            return random_jet(f, rng);
        }, py::arg("seed") = kDefaultSeed);

    m.def("verify", [](const Family& f, int samples, std::uint64_t seed, double tol) {
        VerifyOptions o;
        o.samples = samples;
        o.seed = seed;
        o.tol = tol;
        return report_to_json(verify_family(f, o)).dump();
    }, py::arg("family"), py::arg("samples") = 1000, py::arg("seed") = kDefaultSeed, py::arg("tol") = 1e-8);

    m.def("solve_triple", [](const Family& f, double beta, double C_strip, double sigma, double b0, double h,
                             int a_sign) -> py::object {
        ImmersionParams ip;
        ip.beta = beta;
        ip.C_strip = C_strip;
        ip.sigma = sigma;
        ip.b0 = b0;
        ip.h = h;
        ip.a_sign = a_sign;
        auto r = solve_triple(f, ip);
        if (auto* no = std::get_if<NoImmersion>(&r)) {
            py::dict d;
            d["proposition"] = no->proposition;
            d["reason"] = no->reason;
            d["immersion"] = false;
            return d;
        }
        const auto& t = std::get<ImmersionTriple>(r);
        py::dict d = triple_dict(t);
        d["immersion"] = true;
        if (t.universal()) {
            double lo = std::isfinite(t.s_lo) ? t.s_lo : t.s_hi - 3, hi = std::isfinite(t.s_hi) ? t.s_hi : t.s_lo + 3;
            double s = 0.5 * (lo + hi);
            TripleValue v = t.eval(s);
            d["midpoint"] = std::vector<double>{s, v.a, v.b, v.c};
        }
        return d;
    }, py::arg("family"), py::arg("beta") = 1.0, py::arg("C_strip") = 3.0, py::arg("sigma") = 3.0,
          py::arg("b0") = 2.0, py::arg("h") = 1e-3, py::arg("a_sign") = 1);

    m.def("gauss_residual", &gauss_residual);
    m.def("kink", &exact_sine_gordon_kink, py::arg("eta"), py::arg("x"), py::arg("t"));

    m.def("helmholtz_invert", [](const std::vector<double>& rhs, double L, bool spectral) {
        Grid1D g{0.0, L, static_cast<int>(rhs.size()), true};
        return helmholtz_invert(g, rhs, spectral ? HelmholtzMethod::Spectral : HelmholtzMethod::CyclicTridiagonal);
    }, py::arg("rhs"), py::arg("L"), py::arg("spectral") = true);

    m.def("solve_mol", [](const Family& f, const std::vector<double>& u0, double t_max, double dt, int snapshots) {
        Grid1D g{0.0, 2.0 * 3.14159265358979323846, static_cast<int>(u0.size()), true};
        MolOptions o;
        o.t_max = t_max;
        o.dt = dt;
        o.snapshots = snapshots;
        SolutionField s = solve_mol(f, g, u0, o);
        return py::make_tuple(s.times, s.u);
    }, py::arg("family"), py::arg("u0"), py::arg("t_max") = 1.0, py::arg("dt") = 1e-3, py::arg("snapshots") = 11);

    m.def("h1_norm", [](const std::vector<double>& u, double L) {
        return h1_norm(Grid1D{0.0, L, static_cast<int>(u.size()), true}, u);
    });

    m.def("reconstruct_kink", [](double eta, int n, double half_width, int substeps) {
        Family f = sine_gordon_preset(eta);
        ImmersionParams ip;
        auto t = std::get<ImmersionTriple>(solve_triple(f, ip));
        const double h = 2 * half_width / (n - 1);
        const double x0 = -half_width + h / 4, t0 = -half_width + h / 4;
        SolutionField field = sine_gordon_kink_field(eta, Grid1D{x0, x0 + h * (n - 1), n - 1, false}, {t0});
        FrameOptions o;
        o.substeps = substeps;
        return mesh_diagnostics(integrate_frame(f, t, field, x0, t0, n, n, h, h, o)).dump();
    }, py::arg("eta") = 1.0, py::arg("n") = 40, py::arg("half_width") = 3.0, py::arg("substeps") = 4);

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    });
}
