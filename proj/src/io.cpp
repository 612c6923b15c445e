#include "s3conf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "s3conf/errors.hpp"

namespace s3conf {

namespace {

Json vec_json(const Vec4& v) { return Json::array({v[0], v[1], v[2], v[3]}); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("field spec: bad number '" + s + "' for " + what);
  }
}

int to_int(const std::string& s, const std::string& what) {
  const double x = to_double(s, what);
  if (x != std::floor(x)) throw ConfigError("field spec: " + what + " must be an integer");
  return static_cast<int>(x);
}

}  // namespace

Json to_json(const Coefficients& c) {
  Json j;
  j["band_limit"] = c.band_limit();
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < c.values().size(); ++i) arr.push_back(c.values()[i]);
  j["coeffs"] = std::move(arr);
  return j;
}

Coefficients coefficients_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("band_limit") || !j.contains("coeffs") ||
      !j["coeffs"].is_array() || !j["band_limit"].is_number_integer()) {
    throw ConfigError("coefficient JSON needs integer \"band_limit\" and array \"coeffs\"");
  }
  const int L = j["band_limit"].get<int>();
  if (L < 0) throw ConfigError("coefficient JSON: negative band limit");
  const auto& arr = j["coeffs"];
  if (arr.size() != Coefficients::dimension(L)) {
    throw ConfigError("coefficient JSON: expected " + std::to_string(Coefficients::dimension(L)) +
                      " coefficients for band limit " + std::to_string(L) + ", got " +
                      std::to_string(arr.size()));
  }
  Coefficients c(L);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw ConfigError("coefficient JSON: non-numeric entry");
    c.values()[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return c;
}

Json to_json(const MoebiusParam& psi) {
  Json j;
  j["xi"] = vec_json(psi.xi());
  if (psi.has_rotation()) {
    Json rot = Json::array();
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) rot.push_back(psi.rotation()(r, c));
    j["rotation"] = std::move(rot);
  }
  return j;
}

MoebiusParam moebius_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("xi") || !j["xi"].is_array() || j["xi"].size() != 4) {
    throw ConfigError("Moebius JSON needs \"xi\" with 4 entries");
  }
  Vec4 xi;
  for (int i = 0; i < 4; ++i) xi[i] = j["xi"][i].get<double>();
  if (!(xi.norm() < 1)) throw ConfigError("Moebius JSON: |xi| must be < 1");
  std::optional<Mat4> rot;
  if (j.contains("rotation") && !j["rotation"].is_null()) {
    if (!j["rotation"].is_array() || j["rotation"].size() != 16) {
      throw ConfigError("Moebius JSON: rotation needs 16 entries");
    }
    Mat4 a;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) a(r, c) = j["rotation"][4 * r + c].get<double>();
    rot = a;
  }
  try {
    return MoebiusParam(xi, rot);
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
}

Json to_json(const FunctionalValues& v) {
  return Json{{"F1_of_w", v.F1_of_w}, {"F2_of_u", v.F2_of_u},      {"E2", v.E2},
              {"vol_norm", v.vol_norm}, {"sigma1_min", v.sigma1_min}, {"sigma1_argmin", v.sigma1_argmin},
              {"f_min", v.f_min},       {"u_min", v.u_min},           {"u_argmin", v.u_argmin},
              {"feasible", v.feasible()}};
}

Json to_json(const DistWitness& w) {
  Json j;
  j["value"] = w.value;
  j["lambda_star"] = w.lambda_star;
  j["xi_star"] = vec_json(w.xi_star);
  j["w12_part"] = w.w12_part;
  j["w14_part"] = w.w14_part;
  j["converged"] = w.converged;
  j["guard_triggered"] = w.guard_triggered;
  Json trace = Json::array();
  for (std::size_t r = 0; r < w.trace.size(); ++r) {
    const auto& t = w.trace[r];
    trace.push_back(Json{{"restart", r},
                         {"best_value", t.best_value},
                         {"xi", vec_json(t.xi)},
                         {"iterations", t.iterations},
                         {"evaluations", t.evaluations},
                         {"converged", t.converged}});
  }
  j["trace"] = std::move(trace);
  return j;
}

Json to_json(const DeficitReport& r) {
  Json j;
  j["sample"] = r.sample;
  j["field_id"] = r.field_id;
  j["theta"] = r.theta;
  j["deficit"] = r.deficit;
  j["dist_value"] = r.dist_value;
  j["ratio"] = r.ratio ? Json(*r.ratio) : Json(nullptr);
  j["at_optimizer"] = r.at_optimizer;
  j["witness"] = Json{{"lambda_star", r.lambda_star}, {"xi_star", vec_json(r.xi_star)},
                      {"converged", r.converged}};
  j["values"] = to_json(r.values);
  j["diagnostics"] = Json{{"sigma1_min", r.values.sigma1_min},
                          {"w14_lhs", r.w14_l4.lhs},
                          {"w14_rhs", r.w14_l4.rhs},
                          {"w14_pass", r.w14_l4.pass},
                          {"c0", r.orthogonality.c0},
                          {"c1", r.orthogonality.c1}};
  j["exactness"] = r.exactness;
  j["seed"] = r.seed;
  return j;
}

Json to_json(const HessianCheck& h) {
  return Json{{"degree", h.degree},   {"fd_value", h.fd_value}, {"formula_value", h.formula_value},
              {"rel_err", h.rel_err}, {"noise", h.noise},       {"step", h.step},
              {"widenings", h.widenings}};
}

// ---------------------------------------------------------------------------

std::string FieldSpec::id() const {
  std::ostringstream s;
  if (kind == "constant") {
    s << "constant:" << format_double(value);
  } else if (kind == "harmonic") {
    s << "harmonic:" << degree << "," << k;
    if (amplitude) s << "," << format_double(*amplitude);
  } else if (kind == "file") {
    s << "file:" << path;
  } else {
    s << kind;
    if (amplitude) s << ":" << format_double(*amplitude);
    if (kind != "hopf") s << "@" << seed;
  }
  return s.str();
}

FieldSpec parse_field_spec(const std::string& text) {
  FieldSpec spec;
  const auto colon = text.find(':');
  spec.kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (spec.kind == "constant") {
    spec.value = arg.empty() ? 1.0 : to_double(arg, "constant");
  } else if (spec.kind == "harmonic") {
    const auto parts = split(arg, ',');
    if (parts.size() != 2 && parts.size() != 3) {
      throw ConfigError("field spec: harmonic:l,k or harmonic:l,k,a expected");
    }
    spec.degree = to_int(parts[0], "degree");
    spec.k = to_int(parts[1], "k");
    if (spec.degree < 0 || spec.k < 0 || spec.k >= (spec.degree + 1) * (spec.degree + 1)) {
      throw ConfigError("field spec: need 0 <= k < (l+1)^2");
    }
    if (parts.size() == 3) spec.amplitude = to_double(parts[2], "amplitude");
  } else if (spec.kind == "hopf") {
    if (!arg.empty()) throw ConfigError("field spec: hopf takes no argument");
  } else if (spec.kind == "harmonic-bump" || spec.kind == "random") {
    if (!arg.empty()) spec.amplitude = to_double(arg, "amplitude");
    if (spec.amplitude && !(*spec.amplitude >= 0)) {
      throw ConfigError("field spec: amplitude must be >= 0");
    }
  } else if (spec.kind == "file") {
    if (arg.empty()) throw ConfigError("field spec: file:path expected");
    spec.path = arg;
  } else {
    throw ConfigError("unknown field kind '" + spec.kind +
                      "' (constant, harmonic, hopf, harmonic-bump, random, file)");
  }
  return spec;
}

Json to_json(const FieldSpec& spec) {
  Json j;
  if (spec.kind == "harmonic") {
    j["kind"] = "harmonic(" + std::to_string(spec.degree) + "," + std::to_string(spec.k) + ")";
  } else {
    j["kind"] = spec.kind;
  }
  j["seed"] = spec.seed;
  if (spec.amplitude) j["amplitude"] = *spec.amplitude;
  if (spec.kind == "constant") j["value"] = spec.value;
  if (spec.kind == "file") j["path"] = spec.path;
  return j;
}

namespace {

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

}  // namespace

int spec_band_limit(const FieldSpec& spec, int configured) {
  if (spec.kind == "file") return coefficients_from_json(read_json_file(spec.path)).band_limit();
  if (spec.kind == "harmonic") return std::max(configured, spec.degree);
  if (spec.kind == "hopf") return std::max(configured, 2);
  if (spec.kind == "constant") return std::max(configured, 0);
  return std::max(configured, 1);
}

BuiltField build_field(const FieldSpec& spec, const BasisPtr& basis) {
  const int L = basis->band_limit();
  BuiltField out;
  Coefficients c(L);
  if (spec.kind == "constant") {
    c(0, 0) = spec.value * std::sqrt(kSphereArea);
  } else if (spec.kind == "harmonic") {
    if (spec.degree > L) throw ConfigError("field spec: degree exceeds the band limit");
    if (spec.amplitude) {
      c(0, 0) = std::sqrt(kSphereArea);
      c(spec.degree, spec.k) = *spec.amplitude;
    } else {
      c(spec.degree, spec.k) = 1.0;
    }
  } else if (spec.kind == "hopf") {
    if (L < 2) throw ConfigError("field spec: hopf needs band limit >= 2");
    const auto& nodes = basis->grid()->nodes();
    std::vector<double> v(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      v[i] = nodes[i][0] * nodes[i][1] + nodes[i][2] * nodes[i][3];
    }
    c = basis->analyze(v);
    c *= 1.0 / c.values().norm();
  } else if (spec.kind == "harmonic-bump") {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec4 p(normal(rng), normal(rng), normal(rng), normal(rng));
    p.normalize();
    const auto& nodes = basis->grid()->nodes();
    std::vector<double> v(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      v[i] = std::pow(0.5 * (1.0 + nodes[i].dot(p)), L);
    }
    c = spec.amplitude.value_or(0.05) * basis->analyze(v);
    c(0, 0) += std::sqrt(kSphereArea);
  } else if (spec.kind == "random") {
    SampleOptions so;
    so.seed = spec.seed;
    so.band_limit = L;
    so.amplitude = spec.amplitude.value_or(0.05);
    so.count = 1;
    c = sample_feasible(basis, so).samples.front().base;
  } else if (spec.kind == "file") {
    const Json j = read_json_file(spec.path);
    c = coefficients_from_json(j);
    if (c.band_limit() > L) throw ConfigError("field file: band limit exceeds the basis");
    c = c.resized(L);
    if (j.contains("moebius") && !j["moebius"].is_null()) out.psi = moebius_from_json(j["moebius"]);
  } else {
    throw ConfigError("unknown field kind '" + spec.kind + "'");
  }
  out.base = c;
  out.field = sample_field(basis, c, out.psi);
  return out;
}

Json field_to_json(const BuiltField& f, const FieldSpec& spec) {
  Json j = to_json(f.base);
  j["generator"] = to_json(spec);
  if (f.psi) j["moebius"] = to_json(*f.psi);
  return j;
}

// ---------------------------------------------------------------------------

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << "\n";
}

void CsvWriter::cell(const std::string& s) {
  if (filled_ == columns_) throw ContractViolation("CsvWriter: too many cells in row");
  out_ << (filled_ ? "," : "");
  if (s.find_first_of(",\"\n") != std::string::npos) {
    out_ << '"';
    for (char ch : s) {
      if (ch == '"') out_ << '"';
      out_ << ch;
    }
    out_ << '"';
  } else {
    out_ << s;
  }
  ++filled_;
}

CsvWriter& CsvWriter::operator<<(double x) {
  cell(format_double(x));
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long x) {
  cell(std::to_string(x));
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& s) {
  cell(s);
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw ContractViolation("CsvWriter: short row");
  out_ << "\n";
  filled_ = 0;
}

}  // namespace s3conf
