#pragma once

#include <Eigen/Core>

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "pss/family.hpp"
#include "pss/immersion.hpp"
#include "pss/pde.hpp"

namespace pss {

using Vec3 = Eigen::Vector3d;

struct FirstForm {
    double E = 0, F = 0, G = 0;
};
struct SecondForm {
    double a1 = 0, a2 = 0, a3 = 0;
};

FirstForm first_form_coefficients(const Coefficients<double>& c);
FirstForm first_form_coefficients(const Family& fam, const JetPoint& p);
SecondForm second_form_coefficients(const Coefficients<double>& c, double a, double b, double c_);
// sine-Gordon triple is singular where sin u = 0; this evaluates the products a f_1j without the pole
SecondForm second_form_coefficients(const Family& fam, const ImmersionTriple& trip, const JetPoint& p, double x,
                                    double t);

struct FrameState {
    Vec3 r = Vec3::Zero();
    Vec3 e1 = Vec3::UnitX(), e2 = Vec3::UnitY(), e3 = Vec3::UnitZ();
    double drift() const;  // max |e_i.e_j - delta_ij|
};

struct FrameOptions {
    int substeps = 8;  // RK4 steps per mesh cell (EXACT fields)
    bool t_first = false;
    double drift_max = 1e-6;
    double nondegeneracy_tol = 1e-10;
    bool compute_compat = true;
    int threads = 0;
};

class NondegeneracyFailure : public std::runtime_error {
  public:
    NondegeneracyFailure(double x, double t, double d12);
};
class TripleDomainExceeded : public std::runtime_error {
  public:
    TripleDomainExceeded(double x, double t, double s);
};
class FrameDrift : public std::runtime_error {
  public:
    explicit FrameDrift(double drift);
};

// nx * nt vertex grid; vertex (i, j) sits at (x0 + i hx, t0 + j ht), index j * nx + i.
struct SurfaceMesh {
    int nx = 0, nt = 0;
    double x0 = 0, t0 = 0, hx = 0, ht = 0;
    std::vector<Vec3> r, e1, e2, e3;
    std::vector<FirstForm> I;
    std::vector<SecondForm> II;
    std::vector<double> K;                 // NaN on the boundary
    std::vector<double> area;              // mixed area per vertex
    std::vector<std::array<int, 3>> tris;  // CCW about e3
    std::vector<char> flipped;             // triangle reversed from parameter order
    double drift_max = 0.0;
    double compat_max = 0.0;  // max |r_xt - r_tx| over vertices
    int order = 4;
    std::string scheme;

    int index(int i, int j) const { return j * nx + i; }
    std::size_t size() const { return r.size(); }
};

struct MeshStats {
    double K_min = 0, K_max = 0;
    double K_mean = 0;  // area-weighted: total angle defect over total mixed area
    double fraction_within = 0;  // interior vertices with |K + 1| <= band
    int interior = 0;
};
MeshStats mesh_stats(const SurfaceMesh& m, double band = 0.05);

// Frame at (x0, t0) with e1, e2 in the xy-plane and r_x along the first axis.
FrameState initial_frame(const Coefficients<double>& c);

SurfaceMesh integrate_frame(const Family& fam, const ImmersionTriple& trip, const SolutionField& field, double x0,
                            double t0, int nx, int nt, double hx, double ht, const FrameOptions& opt = {});

// angle defect over the triangle fan divided by the mixed (Voronoi) area; fills m.K.
// Vertices on a fold (mixed fan orientation) or next to a degenerate triangle get NaN.
void discrete_gaussian_curvature(SurfaceMesh& m);
// structured-grid triangulation of positions, oriented by the given normals
SurfaceMesh mesh_from_positions(int nx, int nt, const std::vector<Vec3>& r, const std::vector<Vec3>& normals);

}  // namespace pss
