#pragma once

#include <map>
#include <optional>
#include <string>

#include "macroq/io.hpp"

namespace macroq {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitUsage = 2,
  kExitTruncation = 3,
  kExitConsistency = 4,
};

using ParamMap = std::map<std::string, std::string>;

// Builds a state of the named family (fock, coherent, cat, cat-mixture,
// fock-mixture, thermal, product) from key=value parameters. `truncation`
// overrides the per-family default. Throws InvalidArgument for unknown
// families or keys.
StateFile build_state(const std::string& family, const ParamMap& params, std::optional<int> truncation = std::nullopt);

int run_cli(int argc, char** argv);

}  // namespace macroq
