#include "pss/frame.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pss/parallel.hpp"
#include "pss/verifier.hpp"

namespace pss {

namespace {

std::string at(double x, double t) {
    std::ostringstream os;
    os.precision(10);
    os << "(x, t) = (" << x << ", " << t << ")";
    return os.str();
}

// a f_1j, b, c together with f at one point; a f_1j stays finite across the sine-Gordon pole
struct Shape {
    Coefficients<double> f;
    double af[2];
    double b, c;
};

Shape shape_at(const Family& fam, const ImmersionTriple& trip, const JetPoint& p, double x, double t) {
    Shape s;
    s.f = fam.coefficients(p);
    if (trip.universal()) {
        const double red = trip.reduced(x, t);
        if (!trip.contains(red) && !(trip.representation == Representation::OdeTable && red >= trip.s_lo && red <= trip.s_hi))
            throw TripleDomainExceeded(x, t, red);
        TripleValue v = trip.eval(red);
        s.af[0] = v.a * s.f.f[0][0];
        s.af[1] = v.a * s.f.f[0][1];
        s.b = v.b;
        s.c = v.c;
    } else {
        // a = 2 sign cos u / sin u and f_1j = (0, sin u / eta)
        const double u = p.zi(0), eta = fam.params().eta;
        s.af[0] = 0.0;
        s.af[1] = trip.a_sign * 2.0 * std::cos(u) / eta;
        s.b = -trip.a_sign;
        s.c = 0.0;
    }
    return s;
}

SecondForm second_form(const Shape& s) {
    const auto& f = s.f.f;
    SecondForm II;
    II.a1 = s.af[0] * f[0][0] + 2.0 * s.b * f[0][0] * f[1][0] + s.c * f[1][0] * f[1][0];
    II.a2 = s.af[0] * f[0][1] + s.b * (f[0][0] * f[1][1] + f[1][0] * f[0][1]) + s.c * f[1][0] * f[1][1];
    II.a3 = s.af[1] * f[0][1] + 2.0 * s.b * f[0][1] * f[1][1] + s.c * f[1][1] * f[1][1];
    return II;
}

// coefficients of the linear frame system along direction j
struct Conn {
    double f1, f2, w12, w13, w23;
};

Conn conn_from(const Shape& s, int j) {
    const auto& f = s.f.f;
    return {f[0][j], f[1][j], f[2][j], s.af[j] + s.b * f[1][j], s.b * f[0][j] + s.c * f[1][j]};
}

FrameState deriv(const FrameState& y, const Conn& k) {
    FrameState d;
    d.r = k.f1 * y.e1 + k.f2 * y.e2;
    d.e1 = k.w12 * y.e2 + k.w13 * y.e3;
    d.e2 = -k.w12 * y.e1 + k.w23 * y.e3;
    d.e3 = -k.w13 * y.e1 - k.w23 * y.e2;
    return d;
}

FrameState axpy(const FrameState& y, double h, const FrameState& d) {
    FrameState o;
    o.r = y.r + h * d.r;
    o.e1 = y.e1 + h * d.e1;
    o.e2 = y.e2 + h * d.e2;
    o.e3 = y.e3 + h * d.e3;
    return o;
}

class Integrator {
  public:
    Integrator(const Family& fam, const ImmersionTriple& trip, const SolutionField& field, const FrameOptions& opt)
        : fam_(fam), trip_(trip), field_(field), opt_(opt), exact_(field.provenance == Provenance::Exact) {}

    int order() const { return exact_ ? 4 : 2; }

    Shape shape(double x, double t) const {
        JetPoint p = field_.sample_jet(x, t, std::min(3, field_.max_order()));
        return shape_at(fam_, trip_, p, x, t);
    }

    // advance from (x, t) by h along direction j (0: x, 1: t)
    FrameState step(FrameState y, double x, double t, double h, int j) const {
        auto point = [&](double s) { return j == 0 ? shape(x + s, t) : shape(x, t + s); };
        if (!exact_) {
            Conn k0 = conn_from(point(0.0), j), k1 = conn_from(point(h), j);
            FrameState d1 = deriv(y, k0);
            FrameState d2 = deriv(axpy(y, h, d1), k1);
            FrameState o = axpy(y, h / 2, d1);
            return axpy(o, h / 2, d2);
        }
        const int n = std::max(1, opt_.substeps);
        const double hs = h / n;
        Conn ka = conn_from(point(0.0), j);
        for (int k = 0; k < n; ++k) {
            Conn km = conn_from(point((k + 0.5) * hs), j);
            Conn kb = conn_from(point((k + 1) * hs), j);
            FrameState d1 = deriv(y, ka);
            FrameState d2 = deriv(axpy(y, hs / 2, d1), km);
            FrameState d3 = deriv(axpy(y, hs / 2, d2), km);
            FrameState d4 = deriv(axpy(y, hs, d3), kb);
            y.r += hs / 6 * (d1.r + 2 * d2.r + 2 * d3.r + d4.r);
            y.e1 += hs / 6 * (d1.e1 + 2 * d2.e1 + 2 * d3.e1 + d4.e1);
            y.e2 += hs / 6 * (d1.e2 + 2 * d2.e2 + 2 * d3.e2 + d4.e2);
            y.e3 += hs / 6 * (d1.e3 + 2 * d2.e3 + 2 * d3.e3 + d4.e3);
            ka = kb;
        }
        return y;
    }

    // all vertex frames, spine along the first direction then lines along the second
    std::vector<FrameState> sweep(const FrameState& y0, double x0, double t0, int nx, int nt, double hx, double ht,
                                  bool t_first) const {
        std::vector<FrameState> out(static_cast<std::size_t>(nx) * nt);
        auto idx = [&](int i, int j) { return static_cast<std::size_t>(j) * nx + i; };
        out[0] = y0;
        if (!t_first) {
            for (int i = 1; i < nx; ++i) out[idx(i, 0)] = step(out[idx(i - 1, 0)], x0 + (i - 1) * hx, t0, hx, 0);
            parallel_for(static_cast<std::size_t>(nx), [&](std::size_t i) {
                for (int j = 1; j < nt; ++j)
                    out[idx(static_cast<int>(i), j)] = step(out[idx(static_cast<int>(i), j - 1)], x0 + static_cast<double>(i) * hx,
                                                            t0 + (j - 1) * ht, ht, 1);
            }, opt_.threads);
        } else {
            for (int j = 1; j < nt; ++j) out[idx(0, j)] = step(out[idx(0, j - 1)], x0, t0 + (j - 1) * ht, ht, 1);
            parallel_for(static_cast<std::size_t>(nt), [&](std::size_t j) {
                for (int i = 1; i < nx; ++i)
                    out[idx(i, static_cast<int>(j))] = step(out[idx(i - 1, static_cast<int>(j))], x0 + (i - 1) * hx,
                                                            t0 + static_cast<double>(j) * ht, hx, 0);
            }, opt_.threads);
        }
        return out;
    }

  private:
    const Family& fam_;
    const ImmersionTriple& trip_;
    const SolutionField& field_;
    FrameOptions opt_;
    bool exact_;
};

double angle(const Vec3& u, const Vec3& v) { return std::atan2(u.cross(v).norm(), u.dot(v)); }

}  // namespace

NondegeneracyFailure::NondegeneracyFailure(double x, double t, double d12)
    : std::runtime_error("nondegeneracy fails at " + at(x, t) + ": |Delta12| = " + std::to_string(std::abs(d12))) {}
TripleDomainExceeded::TripleDomainExceeded(double x, double t, double s)
    : std::runtime_error("triple domain exceeded at " + at(x, t) + ", s = " + std::to_string(s)) {}
FrameDrift::FrameDrift(double drift)
    : std::runtime_error("frame drift " + std::to_string(drift) + " above threshold; use a finer grid or more substeps") {}

FirstForm first_form_coefficients(const Coefficients<double>& c) {
    const auto& f = c.f;
    return {f[0][0] * f[0][0] + f[1][0] * f[1][0], f[0][0] * f[0][1] + f[1][0] * f[1][1],
            f[0][1] * f[0][1] + f[1][1] * f[1][1]};
}

FirstForm first_form_coefficients(const Family& fam, const JetPoint& p) {
    return first_form_coefficients(fam.coefficients(p));
}

SecondForm second_form_coefficients(const Coefficients<double>& c, double a, double b, double c_) {
    Shape s;
    s.f = c;
    s.af[0] = a * c.f[0][0];
    s.af[1] = a * c.f[0][1];
    s.b = b;
    s.c = c_;
    return second_form(s);
}

SecondForm second_form_coefficients(const Family& fam, const ImmersionTriple& trip, const JetPoint& p, double x,
                                    double t) {
    return second_form(shape_at(fam, trip, p, x, t));
}

double FrameState::drift() const {
    const Vec3* e[3] = {&e1, &e2, &e3};
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) d = std::max(d, std::abs(e[i]->dot(*e[j]) - (i == j ? 1.0 : 0.0)));
    return std::max(d, (e1.cross(e2) - e3).cwiseAbs().maxCoeff());
}

FrameState initial_frame(const Coefficients<double>& c) {
    const double th = std::atan2(c.f[1][0], c.f[0][0]);
    FrameState y;
    y.e1 = Vec3(std::cos(th), -std::sin(th), 0.0);
    y.e2 = Vec3(std::sin(th), std::cos(th), 0.0);
    y.e3 = Vec3::UnitZ();
    return y;
}

namespace {

void triangulate(SurfaceMesh& m, const std::vector<Vec3>& normals) {
    m.tris.clear();
    m.flipped.clear();
    for (int j = 0; j + 1 < m.nt; ++j)
        for (int i = 0; i + 1 < m.nx; ++i) {
            int v00 = m.index(i, j), v10 = m.index(i + 1, j), v11 = m.index(i + 1, j + 1), v01 = m.index(i, j + 1);
            for (std::array<int, 3> tri : {std::array<int, 3>{v00, v10, v11}, std::array<int, 3>{v00, v11, v01}}) {
                const Vec3 n = (m.r[tri[1]] - m.r[tri[0]]).cross(m.r[tri[2]] - m.r[tri[0]]);
                const Vec3 ref = normals[tri[0]] + normals[tri[1]] + normals[tri[2]];
                const bool flip = n.dot(ref) < 0.0;
                if (flip) std::swap(tri[1], tri[2]);
                m.tris.push_back(tri);
                m.flipped.push_back(flip);
            }
        }
}

}  // namespace

void discrete_gaussian_curvature(SurfaceMesh& m) {
    const std::size_t n = m.r.size();
    std::vector<double> defect(n, 2.0 * std::numbers::pi), area(n, 0.0);
    std::vector<char> bad(n, 0);
    // a vertex whose fan mixes orientations sits on a fold of the surface
    std::vector<char> seen(n, 0);
    for (std::size_t k = 0; k < m.tris.size(); ++k)
        for (int v : m.tris[k]) {
            const char o = m.flipped.empty() ? 1 : (m.flipped[k] ? 2 : 1);
            if (seen[v] && seen[v] != o) bad[v] = 1;
            seen[v] = o;
        }
    for (const auto& tri : m.tris) {
        const Vec3 &A = m.r[tri[0]], &B = m.r[tri[1]], &C = m.r[tri[2]];
        const double ar = 0.5 * (B - A).cross(C - A).norm();
        if (!(ar > 0.0)) {
            for (int v : tri) bad[v] = 1;
            continue;
        }
        const Vec3* P[3] = {&A, &B, &C};
        double ang[3];
        for (int k = 0; k < 3; ++k) ang[k] = angle(*P[(k + 1) % 3] - *P[k], *P[(k + 2) % 3] - *P[k]);
        const bool obtuse = std::max({ang[0], ang[1], ang[2]}) > std::numbers::pi / 2;
        for (int k = 0; k < 3; ++k) {
            const int v = tri[k];
            defect[v] -= ang[k];
            if (!obtuse) {
                const int q = (k + 1) % 3, r = (k + 2) % 3;
                // edge opposite to q is P[k]-P[r]; opposite to r is P[k]-P[q]
                area[v] += ((*P[k] - *P[r]).squaredNorm() / std::tan(ang[q]) +
                            (*P[k] - *P[q]).squaredNorm() / std::tan(ang[r])) / 8.0;
            } else {
                area[v] += ang[k] > std::numbers::pi / 2 ? ar / 2 : ar / 4;
            }
        }
    }
    m.area = area;
    m.K.assign(n, std::numeric_limits<double>::quiet_NaN());
    for (int j = 1; j + 1 < m.nt; ++j)
        for (int i = 1; i + 1 < m.nx; ++i) {
            const int v = m.index(i, j);
            if (!bad[v] && area[v] > 0.0) m.K[v] = defect[v] / area[v];
        }
}

SurfaceMesh mesh_from_positions(int nx, int nt, const std::vector<Vec3>& r, const std::vector<Vec3>& normals) {
    if (nx < 1 || nt < 1 || r.size() != static_cast<std::size_t>(nx) * nt || normals.size() != r.size())
        throw std::invalid_argument("position array does not match the grid");
    SurfaceMesh m;
    m.nx = nx;
    m.nt = nt;
    m.r = r;
    m.e3 = normals;
    triangulate(m, normals);
    discrete_gaussian_curvature(m);
    return m;
}

MeshStats mesh_stats(const SurfaceMesh& m, double band) {
    MeshStats s;
    s.K_min = INFINITY;
    s.K_max = -INFINITY;
    double defect = 0.0, area = 0.0;
    int within = 0, finite = 0;
    for (int j = 1; j + 1 < m.nt; ++j)
        for (int i = 1; i + 1 < m.nx; ++i) {
            ++s.interior;
            const double K = m.K[static_cast<std::size_t>(m.index(i, j))];
            if (!std::isfinite(K)) continue;
            ++finite;
            s.K_min = std::min(s.K_min, K);
            s.K_max = std::max(s.K_max, K);
            const double A = m.area[static_cast<std::size_t>(m.index(i, j))];
            defect += K * A;
            area += A;
            if (std::abs(K + 1.0) <= band) ++within;
        }
    s.K_mean = finite ? defect / area : std::numeric_limits<double>::quiet_NaN();
    if (!finite) s.K_min = s.K_max = std::numeric_limits<double>::quiet_NaN();
    s.fraction_within = s.interior ? static_cast<double>(within) / s.interior : 0.0;
    return s;
}

SurfaceMesh integrate_frame(const Family& fam, const ImmersionTriple& trip, const SolutionField& field, double x0,
                            double t0, int nx, int nt, double hx, double ht, const FrameOptions& opt) {
    if (nx < 1 || nt < 1) throw std::invalid_argument("mesh needs at least one vertex per direction");
    if ((nx > 1 && !(hx > 0.0)) || (nt > 1 && !(ht > 0.0))) throw std::invalid_argument("mesh steps must be > 0");
    Integrator it(fam, trip, field, opt);
    SurfaceMesh m;
    m.nx = nx;
    m.nt = nt;
    m.x0 = x0;
    m.t0 = t0;
    m.hx = hx;
    m.ht = ht;
    m.order = it.order();
    m.scheme = it.order() == 4 ? "rk4 x" + std::to_string(std::max(1, opt.substeps)) + " substeps" : "heun (nodal jets)";

    const std::size_t n = static_cast<std::size_t>(nx) * nt;
    std::vector<Shape> shapes(n);
    parallel_for(n, [&](std::size_t v) {
        const double x = x0 + static_cast<double>(v % nx) * hx, t = t0 + static_cast<double>(v / nx) * ht;
        shapes[v] = it.shape(x, t);
        const double d12 = delta(shapes[v].f, 1, 2);
        if (!(std::abs(d12) > opt.nondegeneracy_tol)) throw NondegeneracyFailure(x, t, d12);
    }, opt.threads);

    FrameState y0 = initial_frame(shapes[0].f);
    auto states = it.sweep(y0, x0, t0, nx, nt, hx, ht, opt.t_first);
    if (opt.compute_compat && nx > 1 && nt > 1) {
        auto other = it.sweep(y0, x0, t0, nx, nt, hx, ht, !opt.t_first);
        for (std::size_t v = 0; v < n; ++v) m.compat_max = std::max(m.compat_max, (states[v].r - other[v].r).norm());
    }
    m.r.resize(n);
    m.e1.resize(n);
    m.e2.resize(n);
    m.e3.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        m.r[v] = states[v].r;
        m.e1[v] = states[v].e1;
        m.e2[v] = states[v].e2;
        m.e3[v] = states[v].e3;
        m.drift_max = std::max(m.drift_max, states[v].drift());
        m.I.push_back(first_form_coefficients(shapes[v].f));
        m.II.push_back(second_form(shapes[v]));
    }
    if (m.drift_max > opt.drift_max) throw FrameDrift(m.drift_max);
    triangulate(m, m.e3);
    discrete_gaussian_curvature(m);
    return m;
}

}  // namespace pss
