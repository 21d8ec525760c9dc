#pragma once

#include <iosfwd>
#include <map>
#include <string>

namespace ewl {

inline constexpr int kSchemaVersion = 1;

/// Entry point of the `ewl` tool. Reports go to `out` (or the --out file),
/// diagnostics to `err`. Returns 0 on success, 1 on a domain or computation
/// error, 2 on a usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Resolved settings of a JSON report, i.e. its "config" section as strings.
/// Feeding them back through --config reproduces the run.
std::map<std::string, std::string> report_config(const std::string& json_text);

}  // namespace ewl
