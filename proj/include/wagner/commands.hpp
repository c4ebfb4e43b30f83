#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wagner/manifest.hpp"

namespace wagner::commands {

// Exit-code contract: 0 all checks passed, 1 computed but something failed,
// 2 unusable input (the CLI maps ConfigError to 2 before reaching here).
struct CommandOutput {
  std::string report_json;
  std::vector<std::pair<std::string, std::string>> csv_files;  // name, bytes
  int exit_code = 0;
};

CommandOutput cmd_validate(const manifest::Manifest& mf);
CommandOutput cmd_eval(const manifest::Manifest& mf, bool force = false);
CommandOutput cmd_brackets(const manifest::Manifest& mf);
CommandOutput cmd_scan(const manifest::Manifest& mf);
CommandOutput cmd_transport(const manifest::Manifest& mf);

}  // namespace wagner::commands
