#ifndef PROXUC_CONFIG_HPP
#define PROXUC_CONFIG_HPP

#include <string>
#include <vector>

#include "proxuc/verify.hpp"

namespace proxuc {

// Settings for a batch of checks. workers = 0 means one per hardware thread.
struct RunConfig {
  std::string out_dir = "reports";
  int workers = 0;
  std::vector<CheckSpec> checks;
};

struct TabulateConfig {
  std::string out_dir = "tables";
};

struct Config {
  RunConfig run;
  TabulateConfig tabulate;
};

// INI-style configuration:
//   [run] / [tabulate] hold batch settings, each [check NAME] one CheckSpec.
//   key = value lines; values are numbers, true/false, [v, v, ...] arrays,
//   or strings (quotes optional). '#' starts a comment. Unknown sections or
//   keys raise ConfigError carrying the offending line number.
Config parse_config_text(const std::string& text, const std::string& origin = "");
Config parse_config_file(const std::string& path);

}  // namespace proxuc

#endif
