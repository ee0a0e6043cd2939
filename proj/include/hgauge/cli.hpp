#ifndef HGAUGE_CLI_HPP
#define HGAUGE_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace hgauge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // I/O and internal errors
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;

inline constexpr const char* kToolVersion = "1.0.0";

// Runs the `hgauge` command line in-process. `args` excludes the program
// name. Reports go to --out (written atomically) or to `out`; diagnostics go
// to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hgauge::cli

#endif  // HGAUGE_CLI_HPP
