#ifndef CMPOS_TOOLS_CLI_HPP
#define CMPOS_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace cmpos::cli {

// Runs one invocation (argv without the program name) against the given
// streams, so tests can drive the tool in-process. Exit codes: 0 success,
// 1 usage or input error, 2 data-format error, 3 model version mismatch.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

// Introspection for documentation tests: every registered subcommand, and
// the options (flags and positionals) of one subcommand with the default
// each renders into its --help text.
struct OptionDoc {
  std::string name;
  std::string default_str;  // empty for required options and plain flags
  bool required = false;
};

std::vector<std::string> subcommands();
std::vector<OptionDoc> options_of(const std::string& subcommand);

}  // namespace cmpos::cli

#endif  // CMPOS_TOOLS_CLI_HPP
