#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "s3conf/distance.hpp"
#include "s3conf/experiments.hpp"
#include "s3conf/functionals.hpp"
#include "s3conf/moebius.hpp"

namespace s3conf {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

// { "band_limit": L, "coeffs": [...] } in block order.
Json to_json(const Coefficients& c);
// Throws ConfigError on a malformed object or a length that does not match
// the band limit.
Coefficients coefficients_from_json(const Json& j);

// { "xi": [4], "rotation": [16] row-major } (rotation omitted when identity).
Json to_json(const MoebiusParam& psi);
MoebiusParam moebius_from_json(const Json& j);

Json to_json(const FunctionalValues& v);
Json to_json(const DistWitness& w);
Json to_json(const DeficitReport& r);
Json to_json(const HessianCheck& h);

// Field generators accepted on the command line:
//   constant:c          the constant c
//   harmonic:l,k        the unit harmonic Y_{l,k}
//   harmonic:l,k,a      1 + a Y_{l,k}
//   hopf                unit degree-2 harmonic proportional to w1 w2 + w3 w4
//   harmonic-bump[:a]   1 + a ((1 + w.p)/2)^L, p drawn from the seed
//   random[:a]          first feasible draw of the sampling law
//   file:path           coefficient JSON, optionally with a "moebius" entry
struct FieldSpec {
  std::string kind = "constant";
  double value = 1.0;       // constant
  int degree = 0, k = 0;    // harmonic
  std::optional<double> amplitude;
  std::uint64_t seed = 0;
  std::string path;

  std::string id() const;
};

// Throws ConfigError on an unknown kind or malformed arguments.
FieldSpec parse_field_spec(const std::string& text);
// { "kind": ..., "seed": n, "amplitude": a } plus kind-specific entries.
Json to_json(const FieldSpec& spec);

struct BuiltField {
  ScalarField field;
  Coefficients base;  // coefficients before any Moebius action
  std::optional<MoebiusParam> psi;
};

// Band limit needed by a spec (file specs read their own), given the
// configured default.
int spec_band_limit(const FieldSpec& spec, int configured);
BuiltField build_field(const FieldSpec& spec, const BasisPtr& basis);
// Coefficient JSON plus generator and optional Moebius parameter.
Json field_to_json(const BuiltField& f, const FieldSpec& spec);

// Minimal CSV writer: fixed header, doubles printed with 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);
  CsvWriter& operator<<(double x);
  CsvWriter& operator<<(long long x);
  CsvWriter& operator<<(int x) { return *this << static_cast<long long>(x); }
  CsvWriter& operator<<(std::size_t x) { return *this << static_cast<long long>(x); }
  CsvWriter& operator<<(bool b) { return *this << std::string(b ? "true" : "false"); }
  CsvWriter& operator<<(const std::string& s);
  CsvWriter& operator<<(const char* s) { return *this << std::string(s); }
  // Closes the current row; throws ContractViolation if it is short.
  void end_row();

 private:
  void cell(const std::string& s);
  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

std::string format_double(double x);

}  // namespace s3conf
