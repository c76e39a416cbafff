#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "pss/family.hpp"
#include "pss/jet.hpp"

namespace pss {

constexpr std::uint64_t kDefaultSeed = 20240611;

double delta(const Coefficients<double>& c, int i, int j);
double delta(const Family& fam, const JetPoint& p, int i, int j);

// R1 = D_x f12 - D_t f11 + D23, R2 = D_x f22 - D_t f21 - D13, R3 = D_x f32 - D_t f31 - D12:
// dx^dt coefficient of (left - right) of dw1 = w3^w2, dw2 = w1^w3, dw3 = w1^w2.
struct StructureResiduals {
    double R[3] = {0, 0, 0};
    double scale = 1.0;  // max(1, |terms|)
};
StructureResiduals structure_residuals(const Family& fam, const JetPoint& p);

struct Nondegeneracy {
    double delta12 = 0.0;
    bool ok = false;
};
Nondegeneracy nondegeneracy(const Family& fam, const JetPoint& p, double tol = 1e-9);

// Residuals of the classification conditions at one jet; c42 must stay away from 0.
struct ConditionResiduals {
    double c9 = 0, c36 = 0, c37 = 0, c38 = 0, c39 = 0, c40 = 0, c41 = 0;
    double c42 = 0;
    double scale = 1.0;
};
ConditionResiduals condition_residuals(const Family& fam, const JetPoint& p);

// Uniform [-1,1] jet (z0..z5, w1, v1), rejecting |f'| < 1e-3, |phi12| < 1e-3 and
// evaluation failures. Sine-Gordon jets get v1 = sin z0.
JetPoint random_jet(const Family& fam, std::mt19937_64& rng);

struct FailingSample {
    JetPoint jet;
    std::vector<double> residuals;
};

struct VerificationReport {
    std::string family;
    std::uint64_t seed = kDefaultSeed;
    int samples = 0;
    double tol = 0.0;
    bool conditions_applicable = true;
    std::map<std::string, double> residuals;  // R1_max.., c9, c36..c41, c42_min
    std::vector<FailingSample> failing;
    bool pass = false;
};

struct VerifyOptions {
    int samples = 1000;
    std::uint64_t seed = kDefaultSeed;
    double tol = 1e-8;
    bool structure = true;
    bool conditions = true;
    int threads = 0;
};

VerificationReport verify_family(const Family& fam, const VerifyOptions& opt);
VerificationReport check_theorem21_conditions(const Family& fam, int samples, double tol,
                                              std::uint64_t seed = kDefaultSeed);

}  // namespace pss
