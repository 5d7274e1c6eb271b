#include "rec/cli.hpp"

#include <algorithm>
#include <cctype>
#include <exception>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "rec/gnep.hpp"
#include "rec/log.hpp"
#include "rec/nep.hpp"

namespace rec {

namespace {

/// Collects warnings raised while in scope, still forwarding them.
class WarningCapture {
 public:
  explicit WarningCapture(std::vector<std::string>& sink)
      : previous_(set_warning_handler([this](const std::string& m) {
          sink_.push_back(m);
          if (previous_) previous_(m);
        })),
        sink_(sink) {}
  ~WarningCapture() { set_warning_handler(previous_); }
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

 private:
  WarningHandler previous_;
  std::vector<std::string>& sink_;
};

StartPoint parse_start(const std::string& text) {
  if (text == "benchmark") return StartPoint::benchmark;
  if (text == "central") return StartPoint::central;
  if (text == "file") return StartPoint::file;
  throw std::invalid_argument("unknown start '" + text + "' (expected benchmark, central or file)");
}

PvLevel parse_pv(const std::string& text) {
  if (text == "high") return PvLevel::high;
  if (text == "low") return PvLevel::low;
  throw std::invalid_argument("unknown PV level '" + text + "' (expected high or low)");
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    const std::size_t dash = item.find('-');
    try {
      if (dash != std::string::npos && dash > 0) {
        const std::uint64_t a = std::stoull(item.substr(0, dash));
        const std::uint64_t b = std::stoull(item.substr(dash + 1));
        if (b < a) throw std::invalid_argument("empty range");
        for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
      } else {
        out.push_back(std::stoull(item));
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("bad seed list '" + text + "'");
    }
    pos = comma + 1;
  }
  return out;
}

}  // namespace

RunResult execute(const RunRequest& req) {
  RunResult r;
  WarningCapture capture(r.warnings);
  const Scenario sc = req.scenario_path ? load_scenario(*req.scenario_path) : generate_synthetic(req.synthetic);
  if (!req.scenario_path) r.seed = req.synthetic.seed;
  r.mode = req.mode;
  r.design = req.design;
  r.fingerprint = scenario_fingerprint(sc);
  r.steps = sc.steps();
  for (const MemberAssets& m : sc.members) r.member_ids.push_back(m.id);
  if (req.mode == Mode::game && !req.billing) throw std::invalid_argument("game mode requires a billing scheme");
  r.billing = req.billing.value_or(Billing::cp);

  std::optional<CentralSolution> central;
  auto social = [&]() -> const CentralSolution& {
    if (!central) central = solve_centralized(sc, req.design);
    return *central;
  };

  switch (req.mode) {
    case Mode::benchmark:
      r.profile = convert(solve_individual_benchmark(sc).profile, req.design);
      break;
    case Mode::central:
      r.profile = social().profile;
      r.social_optimum = social().cost.total;
      break;
    case Mode::game: {
      r.social_optimum = social().cost.total;
      break;
    }
  }

  if (*r.billing == Billing::net) r.keys = keys_net(sc);
  if (*r.billing == Billing::vcg) r.keys = keys_vcg(sc, req.design, {}, r.social_optimum ? &*r.social_optimum : nullptr);

  if (req.mode == Mode::game) {
    CommunityProfile start;
    switch (req.start) {
      case StartPoint::benchmark: start = benchmark_start(sc, req.design); break;
      case StartPoint::central: start = social().profile; break;
      case StartPoint::file: start = convert(read_profile(req.start_dir, sc), req.design); break;
    }
    GameConfig cfg = req.game;
    cfg.billing = *r.billing;
    EquilibriumReport g = req.design == Design::d1 ? pda_solve(sc, cfg, &r.keys, &start)
                                                   : pda_shared_solve(sc, cfg, &r.keys, &start);
    if (req.audit) {
      r.audit = req.design == Design::d1 ? check_nash(g.profile, sc, cfg.billing, r.keys)
                                         : check_gne(g.profile, sc, cfg.billing, r.keys);
      g.best_response_residual = r.audit->max_improvement;
    }
    r.status = g.converged ? "converged" : "not_converged";
    r.profile = g.profile;
    r.game = std::move(g);
  }

  r.cost = cost_breakdown(r.profile, sc, req.design);
  r.bills = bills(r.profile, sc, req.design, *r.billing, r.keys);
  r.kpis = compute_kpis(r.profile, sc, r.bills, r.cost.total,
                        req.mode == Mode::game ? r.social_optimum : std::nullopt);
  if (r.game) r.game->inefficiency = r.kpis.inefficiency;
  return r;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Day-ahead scheduling and cost allocation for energy communities"};
  app.require_subcommand(1);

  SyntheticSpec gen;
  std::string pv = "high";
  std::string gen_out;
  auto add_generator = [&](CLI::App* sub) {
    sub->add_option("--members", gen.members, "number of members")->check(CLI::PositiveNumber);
    sub->add_option("--steps", gen.horizon.steps, "time steps")->check(CLI::PositiveNumber);
    sub->add_option("--dt", gen.horizon.dt, "step length in hours")->check(CLI::PositiveNumber);
    sub->add_option("--pv", pv, "PV level: high or low");
    sub->add_option("--battery-penetration", gen.battery_penetration, "share of members with a battery")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--pv-max", gen.pv_capacity_max, "largest PV capacity (kWc)")->check(CLI::NonNegativeNumber);
  };

  CLI::App* generate = app.add_subcommand("generate", "write a synthetic scenario");
  generate->add_option("--seed", gen.seed, "generator seed");
  add_generator(generate);
  generate->add_option("-o,--out", gen_out, "output file (stdout when omitted)");

  CLI::App* run = app.add_subcommand("run", "run a pipeline and write reports");
  std::string scenario_path, seeds = "1", mode = "central", design = "d1", billing, tau = "auto", start = "benchmark";
  std::string start_dir, out_dir;
  GameConfig cfg;
  bool no_audit = false;
  run->add_option("-s,--scenario", scenario_path, "scenario JSON file (otherwise generated)");
  run->add_option("--seeds", seeds, "generator seeds, e.g. 1,2,5-8");
  add_generator(run);
  run->add_option("--mode", mode, "benchmark, central or game");
  run->add_option("--design", design, "d1 or d2");
  run->add_option("--billing", billing, "net, vcg or cp (CP allocation when omitted outside game mode)");
  run->add_option("--tau", tau, "proximal weight: auto or a value");
  run->add_flag("--allow-small-tau", cfg.allow_small_tau, "accept tau below the convergence bound");
  run->add_option("--rho", cfg.rho, "averaging weight in (0, 2)");
  run->add_option("--tol-inner", cfg.tol_inner, "inner fixed-point tolerance (kWh)");
  run->add_option("--tol-outer", cfg.tol_outer, "outer tolerance (kWh)");
  run->add_option("--tol-balance", cfg.tol_balance, "community balance tolerance (kWh)");
  run->add_option("--max-outer", cfg.max_outer, "outer iteration limit")->check(CLI::PositiveNumber);
  run->add_option("--max-inner", cfg.max_inner, "inner sweep limit per outer iteration")->check(CLI::PositiveNumber);
  run->add_option("--start", start, "benchmark, central or file");
  run->add_option("--start-dir", start_dir, "run directory holding the start profile");
  run->add_flag("--no-audit", no_audit, "skip the best-response audit");
  run->add_option("-o,--out", out_dir, "output directory")->required();

  CLI::App* compare = app.add_subcommand("compare", "compare run directories of one scenario");
  std::vector<std::string> compare_dirs;
  compare->add_option("runs", compare_dirs, "run directories; the first is the reference")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*generate || *run) gen.pv_level = parse_pv(pv);

    if (*generate) {
      const Scenario sc = generate_synthetic(gen);
      if (gen_out.empty()) {
        std::cout << scenario_to_json(sc);
      } else {
        save_scenario(sc, gen_out);
      }
      return kExitOk;
    }

    if (*compare) {
      std::vector<StoredRun> runs;
      for (const std::string& d : compare_dirs) runs.push_back(read_run(d));
      std::cout << compare_runs(runs);
      return kExitOk;
    }

    RunRequest req;
    req.mode = parse_mode(mode);
    req.design = parse_design(design);
    if (!billing.empty()) req.billing = parse_billing(billing);
    if (tau != "auto") {
      try {
        cfg.tau = std::stod(tau);
      } catch (const std::exception&) {
        throw std::invalid_argument("bad tau '" + tau + "'");
      }
    }
    req.game = cfg;
    req.start = parse_start(start);
    req.start_dir = start_dir;
    if (req.start == StartPoint::file && start_dir.empty()) throw std::invalid_argument("--start file needs --start-dir");
    req.audit = !no_audit;
    req.synthetic = gen;

    std::vector<std::uint64_t> seed_list{gen.seed};
    if (!scenario_path.empty()) {
      req.scenario_path = scenario_path;
    } else if (!seeds.empty()) {
      seed_list = parse_seeds(seeds);
    }

    int exit_code = kExitOk;
    for (std::uint64_t seed : seed_list) {
      req.synthetic.seed = seed;
      const std::string dir = seed_list.size() > 1 ? out_dir + "/seed_" + std::to_string(seed) : out_dir;
      const RunResult res = execute(req);
      write_run(res, dir);
      std::cout << dir << ": " << res.status << ", total cost " << res.cost.total << "\n";
      if (res.status == "not_converged") {
        std::cerr << "error: no convergence within " << req.game.max_outer << " outer iterations (" << dir << ")\n";
        exit_code = kExitNoConvergence;
      }
    }
    return exit_code;
  } catch (const ScenarioError& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SolverFailure& e) {
    std::cerr << "error: solver: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace rec
