#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rec/central.hpp"
#include "rec/game.hpp"
#include "rec/metrics.hpp"

namespace rec {

enum class Mode { benchmark, central, game };
std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

/// Everything one pipeline run produces.
struct RunResult {
  Mode mode = Mode::central;
  Design design = Design::d1;
  std::optional<Billing> billing;  // the allocation used for bills
  std::uint64_t fingerprint = 0;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> member_ids;
  int steps = 0;
  CommunityProfile profile;
  CostBreakdown cost;
  std::vector<double> bills;
  DistributionKeys keys;
  KpiReport kpis;
  std::optional<double> social_optimum;
  std::optional<EquilibriumReport> game;  // game mode only
  std::optional<BestResponseAudit> audit;
  std::vector<std::string> warnings;
  std::string status = "ok";  // ok | converged | not_converged
};

/// Writes profile.csv, appliances.csv, bills.csv, kpi.csv, trace.csv (game),
/// prices.csv (D2 game) and summary.json into `dir`, creating it.
void write_run(const RunResult& result, const std::string& dir);

std::string summary_json(const RunResult& result);

/// Reads profile.csv and appliances.csv written by `write_run`.
CommunityProfile read_profile(const std::string& dir, const Scenario& scenario);

/// Values of a run directory used by comparisons.
struct StoredRun {
  std::string dir;
  std::string mode;
  std::string design;
  std::string billing;
  std::string fingerprint;
  double total_cost = 0.0;
  std::optional<double> scr, ssr, par_plus, par_minus, inefficiency;
  std::vector<std::string> member_ids;
  std::vector<double> bills;
};

StoredRun read_run(const std::string& dir);

/// Comparison table of runs sharing a scenario; throws std::invalid_argument
/// on mismatched fingerprints or member sets.
std::string compare_runs(const std::vector<StoredRun>& runs);

}  // namespace rec
