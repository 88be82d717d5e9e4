#pragma once

#include <string>

#include "json_io.hpp"

namespace th::io {

struct CommandResult {
  json report;
  std::string csv;     // empty when the command has no tabular form
  bool target_met = true;  // false turns a finished run into a numeric failure
};

// op is "<group>.<command>", e.g. "toric.gualdi".
CommandResult run_command(const std::string& op, const json& request);

}  // namespace th::io
