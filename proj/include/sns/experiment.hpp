#pragma once

#include "sns/config.hpp"

namespace sns {

/// Exit codes shared by run_experiment and the CLI.
enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 2,
    exit_solver_failure = 3,
    exit_io_error = 4,
};

/// Execute the selected command, writing CSVs, a plot script and a manifest
/// with content checksums into config.output_dir. On failure the partial
/// outputs move under output_dir/failed/ next to a machine-readable
/// error.json, and the matching exit code is returned.
int run_experiment(const RunConfig& config);

}  // namespace sns
