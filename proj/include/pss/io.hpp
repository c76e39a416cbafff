#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pss/family.hpp"
#include "pss/frame.hpp"
#include "pss/immersion.hpp"
#include "pss/pde.hpp"
#include "pss/verifier.hpp"

namespace pss {

using json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string tool_version();

json family_to_json(const FamilySpec& spec);
FamilySpec family_from_json(const json& j);  // unknown keys are rejected
FamilySpec read_family_file(const std::string& path);
void write_family_file(const std::string& path, const FamilySpec& spec);

json report_to_json(const VerificationReport& rep);

// "s,a,b,c,gauss_residual" (+ ",bprime" for marched tables). Closed forms are
// sampled at n interior points of the strip clipped to [-clip, clip].
void write_triple_csv(std::ostream& os, const ImmersionTriple& trip, int n = 201, double clip = 10.0);

void write_obj(std::ostream& os, const SurfaceMesh& m);
json mesh_diagnostics(const SurfaceMesh& m);

// "PSSF" | uint32 version | uint32 nx | uint32 S | f64 x_min | f64 x_max | f64 t[S] | uint32 periodic | f64 u[S][points]
void write_field(std::ostream& os, const SolutionField& f);
SolutionField read_field(std::istream& is);
void write_field_csv(std::ostream& os, const SolutionField& f);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace pss
