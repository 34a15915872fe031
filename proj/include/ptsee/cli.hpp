#ifndef PTSEE_CLI_HPP
#define PTSEE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ptsee::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `ptsee` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ptsee::cli

#endif  // PTSEE_CLI_HPP
