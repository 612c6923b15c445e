#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "s3conf/config.hpp"
#include "s3conf/errors.hpp"

namespace {

using namespace s3conf;

// Command-line flag -> config key.
struct Flag {
  const char* name;
  const char* key;
  const char* help;
  bool list = false;
};

const std::vector<Flag>& flags() {
  static const std::vector<Flag> table{
      {"--band-limit", "band_limit", "harmonic band limit L"},
      {"--exactness", "grid_exactness", "grid exactness (default 4L+4, floor 2L)"},
      {"--max-exactness", "max_exactness", "largest grid exactness allowed"},
      {"--fine-exactness", "fine_exactness", "grid for invariance and blowup"},
      {"--restarts", "restarts", "optimizer restarts"},
      {"--seed", "seed", "run seed"},
      {"--tol", "tol", "simplex diameter tolerance"},
      {"--max-iter", "max_iter", "optimizer iterations per restart"},
      {"--l-cut", "l_cut", "frequency split cut (>= 2)"},
      {"--theta", "thetas", "interpolation parameters", true},
      {"--field", "field", "field spec (constant:c, harmonic:l,k[,a], hopf, harmonic-bump[:a], random[:a], file:path)"},
      {"--xi", "xi", "Moebius parameter (4 components)", true},
      {"--out", "out", "output root directory"},
      {"--jobs", "jobs", "worker threads"},
      {"--amplitude", "amplitude", "sampling amplitude"},
      {"--count", "count", "number of samples"},
      {"--epsilons", "epsilons", "sharpness scan epsilons", true},
      {"--degrees", "degrees", "Hessian check degrees", true},
      {"--xi-magnitudes", "xi_magnitudes", "blow-up scan |xi| values", true},
      {"--q", "q", "action exponent q (> 3)"},
      {"--p", "p", "W^{1,p} exponent for blowup"},
  };
  return table;
}

std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + xs[i];
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal curvature functionals on S^3: evaluation, Moebius-orbit distance "
               "and stability scans"};
  app.require_subcommand(1);

  std::map<std::string, std::vector<std::string>> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;
  bool strict = false;
  bool moebius = false;
  std::map<std::string, CLI::App*> subs;

  for (const auto& name : cli::subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    subs[name] = sub;
    sub->add_option("--config", config_path, "key = value file or an earlier manifest.json");
    for (const auto& f : flags()) {
      auto* opt = sub->add_option(f.name, values[f.key], f.help);
      if (f.list) {
        opt->delimiter(',')->expected(1, 64);
      } else {
        opt->expected(1);
      }
      options[std::string(name) + f.key] = opt;
    }
    sub->add_flag("--strict", strict, "exit 4 when the optimizer does not converge");
    sub->add_flag("--moebius", moebius, "diversify samples by a random Moebius action");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitConfig;
  }

  std::string chosen;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) chosen = name;

  try {
    RunConfig config;
    if (!config_path.empty()) {
      for (const auto& [k, v] : read_settings_file(config_path)) config.set(k, v);
    }
    for (const auto& f : flags()) {
      if (options[chosen + f.key]->count() > 0) config.set(f.key, join(values[f.key]));
    }
    if (strict) config.strict = true;
    if (moebius) config.moebius = true;
    return cli::run(chosen, config);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return cli::kExitConfig;
  } catch (const ContractViolation& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return cli::kExitConfig;
  } catch (const FeasibilityError& e) {
    std::cerr << e.what() << "\n";
    return cli::kExitFeasibility;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return cli::kExitFeasibility;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
