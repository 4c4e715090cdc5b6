#pragma once

#include <string>

#include "run_config.hpp"

namespace lvhba::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitSolverAbort = 3;

int cmd_run(const std::string& config_path, const CliOverrides& overrides,
            bool quiet);
int cmd_checkgrad(const std::string& config_path,
                  const CliOverrides& overrides, bool quiet);
int cmd_sweep(const std::string& config_path, const CliOverrides& overrides,
              bool quiet);

}  // namespace lvhba::cli
