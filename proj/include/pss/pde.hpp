#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pss/expression.hpp"
#include "pss/family.hpp"
#include "pss/jet.hpp"

namespace pss {

// Periodic grids hold nx points x_min + i dx, i < nx. Non-periodic grids (used
// only by the sine-Gordon light-cone march) also hold the endpoint x_max.
struct Grid1D {
    double x_min = 0.0;
    double x_max = 2.0 * 3.14159265358979323846;
    int nx = 64;
    bool periodic = true;

    double dx() const { return (x_max - x_min) / nx; }
    int points() const { return periodic ? nx : nx + 1; }
    double x(int i) const { return x_min + i * dx(); }
    void validate() const;
};

enum class HelmholtzMethod { Spectral, CyclicTridiagonal };
std::string to_string(HelmholtzMethod m);

// (1 - d_xx) u and its inverse under one discretization: Fourier symbol 1 + k^2,
// or the 3-point Laplacian with periodic wrap.
std::vector<double> helmholtz_apply(const Grid1D& g, const std::vector<double>& u, HelmholtzMethod m);
std::vector<double> helmholtz_invert(const Grid1D& g, const std::vector<double>& rhs, HelmholtzMethod m);

// Fornberg weights of the centered stencil for d^deriv/dx^deriv with the given
// (even) accuracy order, offsets -w..w.
std::vector<double> central_weights(int deriv, int accuracy);
std::vector<double> periodic_derivative(const Grid1D& g, const std::vector<double>& u, int deriv, int accuracy = 4);

enum class Provenance { Exact, Numeric };

class SolutionField {
  public:
    Provenance provenance = Provenance::Numeric;
    Grid1D grid;
    std::vector<double> times;
    std::vector<std::vector<double>> u;   // u at each snapshot
    std::vector<std::vector<double>> ut;  // u_t at each snapshot (NUMERIC)
    std::optional<Expression> exact;      // u(x, t) (EXACT)
    std::string equation;
    std::string method;
    int accuracy = 4;

    JetPoint sample_jet(double x, double t, int order) const;
    double value(double x, double t) const;
    int max_order() const { return provenance == Provenance::Exact ? 64 : 5; }
    int node(double x) const;      // grid index of x, or -1
    int snapshot(double t) const;  // snapshot index of t, or -1
};

double exact_sine_gordon_kink(double eta, double x, double t);
std::string sine_gordon_kink_expression(double eta);
SolutionField exact_field(const std::string& u_of_xt, const Grid1D& grid, const std::vector<double>& times);
SolutionField sine_gordon_kink_field(double eta, const Grid1D& grid, const std::vector<double>& times);

class CflViolation : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};
class BlowUp : public std::runtime_error {
  public:
    BlowUp(double t, double norm);
    double time() const { return t_; }

  private:
    double t_;
};

struct MolOptions {
    double t_max = 1.0;
    double dt = 1e-3;
    int snapshots = 11;  // including t = 0 and t = t_max
    HelmholtzMethod method = HelmholtzMethod::Spectral;
    double cfl = 1.0;  // dt <= cfl dx / max|lambda u^2|
    double blowup_cap = 1e6;
    int order = 4;  // sine-Gordon march: 4 (RK4 + 4th-order quadrature) or 2 (Heun + trapezoid)
};

std::vector<double> mol_rhs(const Family& fam, const Grid1D& g, const std::vector<double>& u, HelmholtzMethod m);
SolutionField solve_mol(const Family& fam, const Grid1D& g, const std::vector<double>& u0, const MolOptions& opt);

// u_xt = sin u marched as u_t(x) = int_{x_min}^x sin u dx' (decay at x_min), on a non-periodic grid.
std::vector<double> sine_gordon_ut(const Grid1D& g, const std::vector<double>& u, int order);
SolutionField solve_sine_gordon(const Grid1D& g, const std::vector<double>& u0, double t0, const MolOptions& opt);

double h1_norm(const Grid1D& g, const std::vector<double>& u);

}  // namespace pss
