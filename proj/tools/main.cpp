#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "regretlab/catalog.hpp"
#include "regretlab/config.hpp"
#include "regretlab/equilibrium.hpp"
#include "regretlab/experiment.hpp"
#include "regretlab/export.hpp"
#include "regretlab/perturbation.hpp"
#include "regretlab/verify.hpp"

namespace {

using namespace regretlab;

int cmd_run(const std::string& config_path, int workers) {
  ExperimentConfig cfg = parse_config_file(config_path);
  if (workers > 0) cfg.workers = workers;
  if (const char* env = std::getenv("REGRETLAB_SEED")) {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw std::invalid_argument(
          "REGRETLAB_SEED must be an unsigned integer, got '" + std::string(env) +
          "'");
    }
    std::cout << "seed overridden by REGRETLAB_SEED: " << cfg.seed << "\n";
  }
  return run_experiment(cfg, std::cout);
}

int cmd_verify(const std::string& suite) {
  VerificationReport report = run_verification(suite);
  print_verification(report, std::cout);
  return report.all_pass() ? 0 : 1;
}

int cmd_game_info(const std::string& ref) {
  Game g = resolve_game(ref);
  std::cout << ref << ": " << g.n1 << " x " << g.n2 << " actions\n";
  std::cout << "payoff bound " << format_double(g.payoff_bound) << "\n";
  auto print_table = [&](int player) {
    std::cout << "player " << player + 1 << " payoffs (rows";
    for (int a = 0; a < g.n1; ++a) std::cout << " " << g.labels1[a];
    std::cout << "; columns";
    for (int b = 0; b < g.n2; ++b) std::cout << " " << g.labels2[b];
    std::cout << "):\n";
    for (int a = 0; a < g.n1; ++a) {
      std::cout << " ";
      for (int b = 0; b < g.n2; ++b)
        std::cout << " " << format_double(g.pay(player, a, b));
      std::cout << "\n";
    }
  };
  print_table(0);
  print_table(1);

  std::vector<MixedProfile> eqs = nash_support_enumeration(g);
  std::cout << eqs.size() << " equilibrium point(s) by support enumeration:\n";
  for (const MixedProfile& eq : eqs) {
    std::cout << "  (";
    for (int k = 0; k < eq.x1.size(); ++k)
      std::cout << (k ? ", " : "") << format_double(eq.x1.w[k]);
    std::cout << ") x (";
    for (int k = 0; k < eq.x2.size(); ++k)
      std::cout << (k ? ", " : "") << format_double(eq.x2.w[k]);
    std::cout << ")\n";
  }
  return 0;
}

std::vector<int> parse_action_list(const std::string& text, int limit) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    int k = -1;
    try {
      k = std::stoi(tok);
    } catch (const std::exception&) {
    }
    if (k < 0 || k >= limit)
      throw std::invalid_argument("action index '" + tok + "' out of range");
    out.push_back(k);
  }
  if (out.empty()) throw std::invalid_argument("empty action list");
  return out;
}

int cmd_game_attract(const std::string& ref, const std::string& b1,
                     const std::string& b2, const AttractionConfig& acfg) {
  Game g = resolve_game(ref);
  ProductSet B{{parse_action_list(b1, g.n1), parse_action_list(b2, g.n2)}};
  std::array<PotentialSpec, 2> specs{PotentialSpec::lp_norm(2.0),
                                     PotentialSpec::lp_norm(2.0)};
  AttractionStats stats = curb_attraction_experiment(g, B, specs, acfg);
  nlohmann::json out = {
      {"stay_frequency", stats.stay_frequency},
      {"ci_low", stats.ci_low},
      {"ci_high", stats.ci_high},
      {"terminal_H_B_distances",
       {{"q50", stats.quantile(0.5)},
        {"q90", stats.quantile(0.9)},
        {"q100", stats.quantile(1.0)}}},
      {"parameters",
       {{"game", ref},
        {"B", {B.sets[0], B.sets[1]}},
        {"gamma", acfg.gamma},
        {"t0", acfg.t0},
        {"T", acfg.T},
        {"runs", acfg.runs},
        {"construction_failures", stats.construction_failures},
        {"seed", acfg.seed}}}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

// Rebuilds the snapshot skeleton of a recorded run from its CSV so the
// analyses that only need states can run offline.
Trajectory trajectory_from_csv(const CsvTable& csv, const Game& g) {
  Trajectory traj;
  const std::string* t0 = csv.find_metadata("t0");
  traj.t0 = t0 ? std::stol(*t0) : 1;
  int ct = csv.column("t");
  std::vector<int> b1 = csv.columns_with_prefix("b1_");
  std::vector<int> b2 = csv.columns_with_prefix("b2_");
  std::vector<int> zc = csv.columns_with_prefix("z_");
  if (static_cast<int>(b1.size()) != g.n1 || static_cast<int>(b2.size()) != g.n2 ||
      static_cast<int>(zc.size()) != g.n1 * g.n2)
    throw std::invalid_argument("csv columns do not match the game dimensions");
  for (const std::vector<double>& row : csv.rows) {
    SimState s;
    s.t = static_cast<long>(row[ct]);
    s.z.n1 = g.n1;
    s.z.n2 = g.n2;
    for (int i : zc) s.z.w.push_back(row[i]);
    for (int i : b1) s.beliefs.x1.w.push_back(row[i]);
    for (int i : b2) s.beliefs.x2.w.push_back(row[i]);
    traj.snapshots.push_back(std::move(s));
    traj.snapshot_periods.push_back(static_cast<long>(row[ct]));
  }
  if (traj.snapshots.empty()) throw std::invalid_argument("csv has no data rows");
  traj.T = traj.snapshot_periods.back();
  return traj;
}

int cmd_analyze(const std::string& csv_path, const std::string& analysis,
                double tail_fraction, double cluster_radius) {
  CsvTable csv = read_csv_file(csv_path);
  const std::string* game_ref = csv.find_metadata("game");
  if (!game_ref)
    throw std::invalid_argument("csv has no game metadata; cannot analyze");
  Game g = resolve_game(*game_ref);

  if (analysis == "summary") {
    int r1 = csv.column("r1max"), r2 = csv.column("r2max"), ct = csv.column("t");
    const std::vector<double>& last = csv.rows.back();
    std::cout << "game " << *game_ref << ", " << csv.rows.size() << " rows, t in ["
              << format_double(csv.rows.front()[ct]) << ", "
              << format_double(last[ct]) << "]\n";
    std::cout << "final max regrets: " << format_double(last[r1]) << ", "
              << format_double(last[r2]) << "\n";
    return 0;
  }
  if (analysis == "hannan") {
    Trajectory traj = trajectory_from_csv(csv, g);
    HannanStatus st = hannan_status(g, traj.snapshots.back().z);
    const char* cls = st.cls == HannanClass::Outside     ? "outside"
                      : st.cls == HannanClass::InteriorH ? "hannan"
                                                         : "reduced_hannan";
    std::cout << "final state: " << cls << ", margin " << format_double(st.margin)
              << "\n";
    return 0;
  }
  if (analysis == "limit_set") {
    Trajectory traj = trajectory_from_csv(csv, g);
    std::vector<MixedProfile> eqs = nash_support_enumeration(g);
    LimitSetReport rep =
        limit_set_estimate(g, traj, tail_fraction, eqs, cluster_radius);
    std::cout << rep.accumulation_points.size() << " accumulation point(s) from "
              << rep.tail_snapshots << " tail snapshots\n";
    for (std::size_t i = 0; i < rep.accumulation_points.size(); ++i) {
      const MixedProfile& p = rep.accumulation_points[i];
      std::cout << "  #" << i << " (" << rep.cluster_sizes[i] << " snapshots): (";
      for (int k = 0; k < p.x1.size(); ++k)
        std::cout << (k ? ", " : "") << format_double(p.x1.w[k]);
      std::cout << ") x (";
      for (int k = 0; k < p.x2.size(); ++k)
        std::cout << (k ? ", " : "") << format_double(p.x2.w[k]);
      std::cout << ")\n";
    }
    for (std::size_t e = 0; e < eqs.size(); ++e)
      std::cout << "distance to equilibrium " << e << ": "
                << format_double(rep.equilibrium_distance[e]) << "\n";
    std::cout << "zero-regret face distance: " << format_double(rep.hr_distance)
              << "\n";
    if (rep.cycling)
      std::cout << "cycling with log-time period "
                << format_double(rep.period_log_time) << " (" << rep.returns_used
                << " returns)\n";
    else
      std::cout << "no cycle detected\n";
    return 0;
  }
  throw CLI::ValidationError("analyze",
                             "unknown analysis '" + analysis +
                                 "' (use summary, hannan, or limit_set)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"no-regret learning and fictitious play laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  int workers = 0;
  CLI::App* run_cmd = app.add_subcommand("run", "run every run of an experiment config");
  run_cmd->add_option("config", config_path, "experiment config file")->required();
  run_cmd->add_option("--workers", workers, "worker pool size (default: available parallelism)");

  std::string suite;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run the verification suite (static, dynamics, all)");
  verify_cmd->add_option("suite", suite, "which criteria to run")->required();

  CLI::App* game_cmd = app.add_subcommand("game", "game inspection");
  std::string game_ref;
  CLI::App* info_cmd = game_cmd->add_subcommand("info", "print payoffs and equilibria");
  info_cmd->add_option("name", game_ref, "catalog name, generate:<...>, or file path")
      ->required();

  std::string attract_ref, attract_b1, attract_b2;
  AttractionConfig acfg;
  CLI::App* attract_cmd = game_cmd->add_subcommand(
      "attract", "estimate how often perturbed play stays near a product set");
  attract_cmd->add_option("name", attract_ref, "catalog name, generate:<...>, or file path")
      ->required();
  attract_cmd->add_option("--b1", attract_b1, "player 1 action indices, comma separated")
      ->required();
  attract_cmd->add_option("--b2", attract_b2, "player 2 action indices, comma separated")
      ->required();
  attract_cmd->add_option("--gamma", acfg.gamma, "attainability margin of the start");
  attract_cmd->add_option("--t0", acfg.t0, "periods of scripted play before learning");
  attract_cmd->add_option("--T", acfg.T, "total horizon");
  attract_cmd->add_option("--runs", acfg.runs, "number of independent runs");
  attract_cmd->add_option("--seed", acfg.seed, "base seed");
  game_cmd->require_subcommand(1);

  std::string csv_path, analysis;
  double tail_fraction = 0.5, cluster_radius = 0.02;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "analyze a recorded trajectory CSV");
  analyze_cmd->add_option("csv", csv_path, "trajectory.csv written by run")->required();
  analyze_cmd->add_option("analysis", analysis, "summary, hannan, or limit_set")
      ->required();
  analyze_cmd->add_option("--tail", tail_fraction, "tail fraction for limit_set");
  analyze_cmd->add_option("--radius", cluster_radius, "cluster radius for limit_set");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit cleanly, bad usage is 2
  }

  try {
    if (*run_cmd) return cmd_run(config_path, workers);
    if (*verify_cmd) return cmd_verify(suite);
    if (*info_cmd) return cmd_game_info(game_ref);
    if (*attract_cmd)
      return cmd_game_attract(attract_ref, attract_b1, attract_b2, acfg);
    if (*analyze_cmd)
      return cmd_analyze(csv_path, analysis, tail_fraction, cluster_radius);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
