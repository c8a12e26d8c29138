#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uavroute::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kIo = 3,
  kConfig = 4,
  kScenario = 5,
};

// Output directory override used when --out is absent.
inline constexpr const char* kOutEnv = "UAVROUTE_OUT";

// Runs one invocation. Tables go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace uavroute::cli
