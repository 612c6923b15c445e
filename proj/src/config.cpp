#include "s3conf/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "s3conf/errors.hpp"

namespace s3conf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (trim(v.substr(pos)).empty()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigError("config: '" + key + "' expects a non-empty list");
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt(xs[i]);
  return s;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "band_limit") band_limit = static_cast<int>(parse_int(key, v));
  else if (key == "grid_exactness") grid_exactness = static_cast<int>(parse_int(key, v));
  else if (key == "max_exactness") max_exactness = static_cast<int>(parse_int(key, v));
  else if (key == "fine_exactness") fine_exactness = static_cast<int>(parse_int(key, v));
  else if (key == "restarts") restarts = static_cast<int>(parse_int(key, v));
  else if (key == "tol") tol = parse_double(key, v);
  else if (key == "max_iter") max_iter = static_cast<int>(parse_int(key, v));
  else if (key == "seed") {
    const long long s = parse_int(key, v);
    if (s < 0) throw ConfigError("config: seed must be >= 0");
    seed = static_cast<std::uint64_t>(s);
  }
  else if (key == "jobs") jobs = static_cast<int>(parse_int(key, v));
  else if (key == "strict") strict = parse_bool(key, v);
  else if (key == "thetas") thetas = parse_list(key, v);
  else if (key == "out") out = v;
  else if (key == "field") field = v;
  else if (key == "xi") xi = parse_list(key, v);
  else if (key == "l_cut") l_cut = static_cast<int>(parse_int(key, v));
  else if (key == "amplitude") amplitude = parse_double(key, v);
  else if (key == "count") count = static_cast<int>(parse_int(key, v));
  else if (key == "moebius") moebius = parse_bool(key, v);
  else if (key == "epsilons") epsilons = parse_list(key, v);
  else if (key == "degrees") degrees = parse_list(key, v);
  else if (key == "xi_magnitudes") xi_magnitudes = parse_list(key, v);
  else if (key == "q") q = parse_double(key, v);
  else if (key == "p") p = parse_double(key, v);
  else throw ConfigError("config: unknown key '" + key + "'");
}

std::map<std::string, std::string> RunConfig::to_map() const {
  return {{"band_limit", std::to_string(band_limit)},
          {"grid_exactness", std::to_string(grid_exactness)},
          {"max_exactness", std::to_string(max_exactness)},
          {"fine_exactness", std::to_string(fine_exactness)},
          {"restarts", std::to_string(restarts)},
          {"tol", fmt(tol)},
          {"max_iter", std::to_string(max_iter)},
          {"seed", std::to_string(seed)},
          {"jobs", std::to_string(jobs)},
          {"strict", strict ? "true" : "false"},
          {"thetas", fmt(thetas)},
          {"out", out},
          {"field", field},
          {"xi", fmt(xi)},
          {"l_cut", std::to_string(l_cut)},
          {"amplitude", fmt(amplitude)},
          {"count", std::to_string(count)},
          {"moebius", moebius ? "true" : "false"},
          {"epsilons", fmt(epsilons)},
          {"degrees", fmt(degrees)},
          {"xi_magnitudes", fmt(xi_magnitudes)},
          {"q", fmt(q)},
          {"p", fmt(p)}};
}

int RunConfig::effective_exactness() const {
  const int d = grid_exactness ? grid_exactness : 4 * band_limit + 4;
  if (d < 2 * band_limit) {
    throw ConfigError("grid_exactness " + std::to_string(d) + " is below the floor 2 * band_limit = " +
                      std::to_string(2 * band_limit));
  }
  if (d < 2 || d > max_exactness) {
    throw ConfigError("grid_exactness " + std::to_string(d) + " outside [2, " +
                      std::to_string(max_exactness) + "]");
  }
  return d;
}

void RunConfig::validate() const {
  if (band_limit < 0) throw ConfigError("band_limit must be >= 0");
  effective_exactness();
  if (fine_exactness < 2 || fine_exactness > max_exactness) {
    throw ConfigError("fine_exactness outside [2, max_exactness]");
  }
  if (restarts < 1) throw ConfigError("restarts must be >= 1");
  if (!(tol > 0)) throw ConfigError("tol must be > 0");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  for (double t : thetas)
    if (!(t >= 0)) throw ConfigError("thetas must be >= 0");
  if (xi.size() != 4) throw ConfigError("xi needs 4 components");
  double n2 = 0;
  for (double x : xi) n2 += x * x;
  if (!(n2 < 1)) throw ConfigError("xi must lie in the open unit ball");
  if (l_cut < 2) throw ConfigError("l_cut must be >= 2");
  if (!(amplitude >= 0)) throw ConfigError("amplitude must be >= 0");
  if (count < 1) throw ConfigError("count must be >= 1");
  for (double e : epsilons)
    if (!(e >= 0)) throw ConfigError("epsilons must be >= 0");
  for (double d : degrees)
    if (d < 1 || d != static_cast<int>(d)) throw ConfigError("degrees must be integers >= 1");
  for (double r : xi_magnitudes)
    if (!(r >= 0 && r < 1)) throw ConfigError("xi_magnitudes must lie in [0, 1)");
  if (!(q > 3)) throw ConfigError("q must be > 3");
  if (!(p >= 1)) throw ConfigError("p must be >= 1");
}

Settings parse_settings(const std::string& text) {
  Settings out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

Settings read_settings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config '" + path + "': " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) {
      throw ConfigError("config '" + path + "': manifest has no \"config\" object");
    }
    Settings out;
    for (const auto& [k, v] : j["config"].items()) {
      if (!v.is_string()) throw ConfigError("config '" + path + "': values must be strings");
      out.emplace_back(k, v.get<std::string>());
    }
    return out;
  }
  return parse_settings(text);
}

std::string config_hash(const std::string& subcommand, const RunConfig& config) {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  feed(subcommand);
  feed("\n");
  for (const auto& [k, v] : config.to_map()) {
    if (k == "out" || k == "jobs") continue;
    feed(k + "=" + v + "\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace s3conf
