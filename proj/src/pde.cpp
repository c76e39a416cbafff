#include "pss/pde.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <sstream>

namespace pss {

void Grid1D::validate() const {
    if (nx < 16) throw std::invalid_argument("grid needs nx >= 16");
    if (!(x_max > x_min)) throw std::invalid_argument("grid needs x_max > x_min");
}

std::string to_string(HelmholtzMethod m) {
    return m == HelmholtzMethod::Spectral ? "spectral" : "cyclic-tridiagonal";
}

namespace {

std::mutex fftw_planner_mutex;

// multiply the Fourier coefficients of u by symbol(k)
std::vector<double> fourier_multiply(const Grid1D& g, const std::vector<double>& u, bool invert) {
    const int n = g.nx;
    const double L = g.x_max - g.x_min;
    std::vector<double> in(u.begin(), u.end()), out(static_cast<std::size_t>(n));
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(n / 2 + 1));
    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex);
        fwd = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(spec.data()), out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(fwd);
    for (int m = 0; m <= n / 2; ++m) {
        double k = 2.0 * std::numbers::pi * m / L;
        double sym = 1.0 + k * k;
        spec[static_cast<std::size_t>(m)] *= (invert ? 1.0 / sym : sym) / n;
    }
    fftw_execute(bwd);
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex);
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    return out;
}

// Thomas algorithm for a constant tridiagonal system a x_{i-1} + b x_i + c x_{i+1} = d_i
std::vector<double> thomas(double a, const std::vector<double>& b, double c, std::vector<double> d) {
    const std::size_t n = d.size();
    std::vector<double> cp(n), x(n);
    double beta = b[0];
    d[0] /= beta;
    for (std::size_t i = 1; i < n; ++i) {
        cp[i] = c / beta;
        beta = b[i] - a * cp[i];
        d[i] = (d[i] - a * d[i - 1]) / beta;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - cp[i + 1] * x[i + 1];
    return x;
}

// cyclic system via Sherman-Morrison
std::vector<double> cyclic_tridiagonal(double a, double bdiag, double c, const std::vector<double>& rhs) {
    const std::size_t n = rhs.size();
    const double gamma = -bdiag;
    std::vector<double> b(n, bdiag);
    b[0] = bdiag - gamma;
    b[n - 1] = bdiag - c * a / gamma;
    std::vector<double> x = thomas(a, b, c, rhs);
    std::vector<double> uvec(n, 0.0);
    uvec[0] = gamma;
    uvec[n - 1] = c;
    std::vector<double> z = thomas(a, b, c, uvec);
    const double fact = (x[0] + a * x[n - 1] / gamma) / (1.0 + z[0] + a * z[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
    return x;
}

}  // namespace

std::vector<double> helmholtz_apply(const Grid1D& g, const std::vector<double>& u, HelmholtzMethod m) {
    if (!g.periodic) throw std::invalid_argument("helmholtz operator needs a periodic grid");
    if (static_cast<int>(u.size()) != g.nx) throw std::invalid_argument("array size does not match grid");
    if (m == HelmholtzMethod::Spectral) return fourier_multiply(g, u, false);
    const int n = g.nx;
    const double s = 1.0 / (g.dx() * g.dx());
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double um = u[static_cast<std::size_t>((i - 1 + n) % n)], up = u[static_cast<std::size_t>((i + 1) % n)];
        out[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i)] - (up - 2.0 * u[static_cast<std::size_t>(i)] + um) * s;
    }
    return out;
}

std::vector<double> helmholtz_invert(const Grid1D& g, const std::vector<double>& rhs, HelmholtzMethod m) {
    if (!g.periodic) throw std::invalid_argument("helmholtz operator needs a periodic grid");
    if (static_cast<int>(rhs.size()) != g.nx) throw std::invalid_argument("array size does not match grid");
    if (m == HelmholtzMethod::Spectral) return fourier_multiply(g, rhs, true);
    const double s = 1.0 / (g.dx() * g.dx());
    return cyclic_tridiagonal(-s, 1.0 + 2.0 * s, -s, rhs);
}

std::vector<double> central_weights(int deriv, int accuracy) {
    if (deriv < 0 || accuracy < 2 || accuracy % 2) throw std::invalid_argument("bad stencil request");
    const int npts = 2 * ((deriv + 1) / 2) - 1 + accuracy;
    const int w = (npts - 1) / 2;
    std::vector<double> xs;
    for (int i = -w; i <= w; ++i) xs.push_back(i);
    // Fornberg (1988)
    const int n = npts, M = deriv;
    std::vector<std::vector<double>> c(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(M) + 1, 0.0));
    double c1 = 1.0, c4 = xs[0];
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, M);
        double c2 = 1.0, c5 = c4;
        c4 = xs[static_cast<std::size_t>(i)];
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(c[i][M]);
    return out;
}

std::vector<double> periodic_derivative(const Grid1D& g, const std::vector<double>& u, int deriv, int accuracy) {
    auto wts = central_weights(deriv, accuracy);
    const int w = static_cast<int>(wts.size() / 2);
    const int n = g.nx;
    const double scale = std::pow(g.dx(), -deriv);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int m = -w; m <= w; ++m) acc += wts[static_cast<std::size_t>(m + w)] * u[static_cast<std::size_t>(((i + m) % n + n) % n)];
        out[static_cast<std::size_t>(i)] = acc * scale;
    }
    return out;
}

int SolutionField::node(double x) const {
    const double dx = grid.dx();
    double q = (x - grid.x_min) / dx;
    long i = std::lround(q);
    if (std::abs(q - i) > 1e-7) return -1;
    if (grid.periodic) {
        if (x < grid.x_min - 1e-9 * dx || x > grid.x_max + 1e-9 * dx) return -1;
        return static_cast<int>(((i % grid.nx) + grid.nx) % grid.nx);
    }
    if (i < 0 || i > grid.nx) return -1;
    return static_cast<int>(i);
}

int SolutionField::snapshot(double t) const {
    for (std::size_t k = 0; k < times.size(); ++k)
        if (std::abs(times[k] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return static_cast<int>(k);
    return -1;
}

double SolutionField::value(double x, double t) const {
    if (provenance == Provenance::Exact) return exact->eval<double>({x, t});
    int i = node(x), k = snapshot(t);
    if (i < 0 || k < 0) throw std::out_of_range("field value requested off the grid");
    return u[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
}

JetPoint SolutionField::sample_jet(double x, double t, int order) const {
    if (order < 0) throw std::invalid_argument("jet order must be >= 0");
    JetPoint p;
    p.x = x;
    p.t = t;
    if (provenance == Provenance::Exact) {
        using D = Dual<double>;
        std::vector<D> xc(static_cast<std::size_t>(order) + 1, D(0.0));
        xc[0] = D(x);
        if (order >= 1) xc[1] = D(1.0);
        Taylor<D> X(std::move(xc));
        Taylor<D> T(D(t, {1.0}));
        Taylor<D> r = exact->eval<Taylor<D>>({X, T});
        for (int k = 0; k <= order; ++k) p.z.push_back(r.derivative(static_cast<std::size_t>(k)).v);
        p.w = {r.coeff(0).grad(0)};
        p.v = {order >= 1 ? r.coeff(1).grad(0) : exact->eval<Taylor<D>>({Taylor<D>::variable(D(x), 1), T}).coeff(1).grad(0)};
        return p;
    }
    if (order > 5) throw std::invalid_argument("numeric fields support jets up to order 5");
    int i = node(x), k = snapshot(t);
    if (i < 0 || k < 0) throw std::out_of_range("numeric jets exist only at grid nodes and snapshot times");
    const auto& uu = u[static_cast<std::size_t>(k)];
    const auto& ut_k = ut[static_cast<std::size_t>(k)];
    const int n = grid.points();
    auto stencil = [&](const std::vector<double>& f, int deriv) {
        if (deriv == 0) return f[static_cast<std::size_t>(i)];
        auto wts = central_weights(deriv, accuracy);
        const int w = static_cast<int>(wts.size() / 2);
        if (!grid.periodic && (i - w < 0 || i + w >= n))
            throw std::out_of_range("stencil leaves the non-periodic domain");
        double acc = 0.0;
        for (int m = -w; m <= w; ++m) {
            int j = grid.periodic ? ((i + m) % n + n) % n : i + m;
            acc += wts[static_cast<std::size_t>(m + w)] * f[static_cast<std::size_t>(j)];
        }
        return acc * std::pow(grid.dx(), -deriv);
    };
    for (int d = 0; d <= order; ++d) p.z.push_back(stencil(uu, d));
    p.w = {ut_k[static_cast<std::size_t>(i)]};
    p.v = {stencil(ut_k, 1)};
    return p;
}

double exact_sine_gordon_kink(double eta, double x, double t) {
    if (eta == 0.0) throw std::invalid_argument("kink needs eta != 0");
    return 4.0 * std::atan(std::exp(eta * x + t / eta));
}

std::string sine_gordon_kink_expression(double eta) {
    if (eta == 0.0) throw std::invalid_argument("kink needs eta != 0");
    std::ostringstream os;
    os.precision(17);
    os << "4*atan(exp((" << eta << ")*x + t/(" << eta << ")))";
    return os.str();
}

SolutionField exact_field(const std::string& u_of_xt, const Grid1D& grid, const std::vector<double>& times) {
    SolutionField f;
    f.provenance = Provenance::Exact;
    f.grid = grid;
    f.times = times;
    f.exact = parse_expression(u_of_xt, {"x", "t"});
    f.equation = "exact:" + u_of_xt;
    f.method = "analytic";
    for (double t : times) {
        std::vector<double> row;
        for (int i = 0; i < grid.points(); ++i) row.push_back(f.exact->eval<double>({grid.x(i), t}));
        f.u.push_back(std::move(row));
    }
    return f;
}

SolutionField sine_gordon_kink_field(double eta, const Grid1D& grid, const std::vector<double>& times) {
    SolutionField f = exact_field(sine_gordon_kink_expression(eta), grid, times);
    f.equation = "sine-gordon kink";
    return f;
}

BlowUp::BlowUp(double t, double norm)
    : std::runtime_error("blow-up: |u|inf = " + std::to_string(norm) + " at t = " + std::to_string(t)), t_(t) {}

namespace {

double inf_norm(const std::vector<double>& u) {
    double m = 0.0;
    for (double x : u) {
        if (!std::isfinite(x)) return INFINITY;
        m = std::max(m, std::abs(x));
    }
    return m;
}

std::vector<double> axpy(const std::vector<double>& u, double h, const std::vector<double>& k) {
    std::vector<double> r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] + h * k[i];
    return r;
}

std::vector<double> snapshot_times(double t0, double t1, int S) {
    if (S < 2) throw std::invalid_argument("need at least 2 snapshots");
    std::vector<double> ts;
    for (int k = 0; k < S; ++k) ts.push_back(t0 + (t1 - t0) * k / (S - 1));
    return ts;
}

template <class Rhs>
SolutionField march(const Grid1D& g, std::vector<double> u, const std::vector<double>& ts, const MolOptions& opt,
                    Rhs&& rhs, bool rk4) {
    SolutionField f;
    f.provenance = Provenance::Numeric;
    f.grid = g;
    f.times = ts;
    f.u.push_back(u);
    f.ut.push_back(rhs(u));
    for (std::size_t k = 1; k < ts.size(); ++k) {
        const double span = ts[k] - ts[k - 1];
        const long n = std::max(1L, static_cast<long>(std::ceil(span / opt.dt - 1e-9)));
        const double h = span / n;
        for (long s = 0; s < n; ++s) {
            if (rk4) {
                auto k1 = rhs(u);
                auto k2 = rhs(axpy(u, h / 2, k1));
                auto k3 = rhs(axpy(u, h / 2, k2));
                auto k4 = rhs(axpy(u, h, k3));
                for (std::size_t i = 0; i < u.size(); ++i) u[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
            } else {
                auto k1 = rhs(u);
                auto k2 = rhs(axpy(u, h, k1));
                for (std::size_t i = 0; i < u.size(); ++i) u[i] += h / 2 * (k1[i] + k2[i]);
            }
            double nrm = inf_norm(u);
            if (!(nrm <= opt.blowup_cap)) throw BlowUp(ts[k - 1] + (s + 1) * h, nrm);
        }
        f.u.push_back(u);
        f.ut.push_back(rhs(u));
    }
    return f;
}

}  // namespace

std::vector<double> mol_rhs(const Family& fam, const Grid1D& g, const std::vector<double>& u, HelmholtzMethod m) {
    auto ux = periodic_derivative(g, u, 1);
    auto uxx = periodic_derivative(g, u, 2);
    auto uxxx = periodic_derivative(g, u, 3);
    const double lam = fam.lambda();
    std::vector<double> r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = lam * u[i] * u[i] * uxxx[i] + fam.G(u[i], ux[i], uxx[i]);
    return helmholtz_invert(g, r, m);
}

SolutionField solve_mol(const Family& fam, const Grid1D& g, const std::vector<double>& u0, const MolOptions& opt) {
    g.validate();
    if (!g.periodic) throw std::invalid_argument("solve_mol needs a periodic grid");
    if (!fam.in_class()) throw std::invalid_argument("solve_mol marches u_t - u_xxt = F; use solve_sine_gordon");
    if (static_cast<int>(u0.size()) != g.nx) throw std::invalid_argument("u0 size does not match grid");
    if (!std::isfinite(inf_norm(u0))) throw std::invalid_argument("u0 must be finite");
    if (!(opt.dt > 0.0) || !(opt.t_max > 0.0)) throw std::invalid_argument("dt and t_max must be > 0");
    double speed = 0.0;
    for (double x : u0) speed = std::max(speed, std::abs(fam.lambda()) * x * x);
    if (speed > 0.0 && opt.dt > opt.cfl * g.dx() / speed)
        throw CflViolation("dt = " + std::to_string(opt.dt) + " exceeds " + std::to_string(opt.cfl) + "·dx/max|λu²| = " +
                           std::to_string(opt.cfl * g.dx() / speed));
    auto f = march(g, u0, snapshot_times(0.0, opt.t_max, opt.snapshots), opt,
                   [&](const std::vector<double>& u) { return mol_rhs(fam, g, u, opt.method); }, true);
    f.equation = fam.id();
    f.method = "rk4+fd4+" + to_string(opt.method);
    return f;
}

std::vector<double> sine_gordon_ut(const Grid1D& g, const std::vector<double>& u, int order) {
    const int n = g.nx;  // intervals; points 0..n
    const double h = g.dx();
    std::vector<double> f(u.size()), I(u.size(), 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) f[i] = std::sin(u[i]);
    for (int i = 0; i < n; ++i) {
        const auto F = [&](int j) { return f[static_cast<std::size_t>(j)]; };
        double inc;
        if (order == 2) {
            inc = h / 2 * (F(i) + F(i + 1));
        } else if (i == 0) {
            inc = h / 24 * (9 * F(0) + 19 * F(1) - 5 * F(2) + F(3));
        } else if (i == n - 1) {
            inc = h / 24 * (F(n - 3) - 5 * F(n - 2) + 19 * F(n - 1) + 9 * F(n));
        } else {
            inc = h / 24 * (-F(i - 1) + 13 * F(i) + 13 * F(i + 1) - F(i + 2));
        }
        I[static_cast<std::size_t>(i) + 1] = I[static_cast<std::size_t>(i)] + inc;
    }
    return I;
}

SolutionField solve_sine_gordon(const Grid1D& g, const std::vector<double>& u0, double t0, const MolOptions& opt) {
    g.validate();
    if (g.periodic) throw std::invalid_argument("the light-cone march needs a non-periodic grid");
    if (static_cast<int>(u0.size()) != g.points()) throw std::invalid_argument("u0 size does not match grid");
    if (opt.order != 2 && opt.order != 4) throw std::invalid_argument("order must be 2 or 4");
    if (!(opt.t_max > t0)) throw std::invalid_argument("t_max must exceed t0");
    auto f = march(g, u0, snapshot_times(t0, opt.t_max, opt.snapshots), opt,
                   [&](const std::vector<double>& u) { return sine_gordon_ut(g, u, opt.order); }, opt.order == 4);
    f.equation = "sine-gordon light-cone";
    f.method = opt.order == 4 ? "rk4+quad4" : "heun+trapezoid";
    f.accuracy = opt.order;
    return f;
}

double h1_norm(const Grid1D& g, const std::vector<double>& u) {
    auto ux = periodic_derivative(g, u, 1);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * u[i] + ux[i] * ux[i];
    return s * g.dx();
}

}  // namespace pss
