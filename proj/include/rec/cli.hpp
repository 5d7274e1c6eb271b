#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rec/report.hpp"

namespace rec {

enum class StartPoint { benchmark, central, file };

struct RunRequest {
  std::optional<std::string> scenario_path;  // otherwise the generator spec
  SyntheticSpec synthetic;
  Mode mode = Mode::central;
  Design design = Design::d1;
  std::optional<Billing> billing;  // required for game mode
  GameConfig game;
  StartPoint start = StartPoint::benchmark;
  std::string start_dir;  // run directory holding profile.csv, for StartPoint::file
  bool audit = true;      // best-response audit of game results
};

/// Runs one request. Throws ScenarioError / std::invalid_argument on invalid
/// input and SolverFailure when a solve fails; a game that hits the iteration
/// limit returns status "not_converged".
RunResult execute(const RunRequest& request);

/// Exit codes of the command-line front end.
enum ExitCode { kExitOk = 0, kExitValidation = 2, kExitSolver = 3, kExitNoConvergence = 4 };

/// Entry point of the `recsched` tool.
int run_cli(int argc, char** argv);

}  // namespace rec
