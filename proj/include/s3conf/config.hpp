#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace s3conf {

// Effective parameters of one CLI run.
//
// File grammar (one setting per line):
//   # comment
//   key = value
//   list_key = 0, 0.5, 1
// Blank lines are ignored, keys are the names below, and later lines win.
// A run manifest (JSON with a "config" object) is accepted as well.
struct RunConfig {
  int band_limit = 4;
  int grid_exactness = 0;  // 0 selects 4 * band_limit + 4
  int max_exactness = 64;
  // Grid for commands dominated by Moebius pullbacks (invariance, blowup).
  int fine_exactness = 64;
  int restarts = 8;
  double tol = 1e-8;
  int max_iter = 2000;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool strict = false;
  std::vector<double> thetas{0.0, 0.5, 1.0, 3.0};
  std::string out = "runs";
  std::string field;  // empty: the subcommand's default field
  std::vector<double> xi{0.5, 0.0, 0.0, 0.0};
  int l_cut = 2;
  double amplitude = 0.05;
  int count = 20;
  bool moebius = false;
  std::vector<double> epsilons{1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1};
  std::vector<double> degrees{1, 2, 3};
  std::vector<double> xi_magnitudes{0.3, 0.6, 0.9};
  double q = 4.0;
  double p = 4.0;

  // Throws ConfigError for an unknown key or a malformed value.
  void set(const std::string& key, const std::string& value);
  // Canonical key -> value text, every key present.
  std::map<std::string, std::string> to_map() const;
  // 4L + 4 unless set explicitly. Throws ConfigError below the 2L floor or
  // above max_exactness.
  int effective_exactness() const;
  // Checks ranges; throws ConfigError.
  void validate() const;
};

using Settings = std::vector<std::pair<std::string, std::string>>;

Settings parse_settings(const std::string& text);
// Key-value file, or a manifest.json from an earlier run.
Settings read_settings_file(const std::string& path);

// 16 hex digits of FNV-1a over the subcommand and the settings that affect
// results (everything but out and jobs).
std::string config_hash(const std::string& subcommand, const RunConfig& config);

}  // namespace s3conf
