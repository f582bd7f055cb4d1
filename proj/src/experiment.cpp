#include "regretlab/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "regretlab/continuous.hpp"
#include "regretlab/discrete.hpp"
#include "regretlab/equilibrium.hpp"
#include "regretlab/export.hpp"
#include "regretlab/perturbation.hpp"
#include "regretlab/rng.hpp"

namespace regretlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunOutput {
  json stats;
  std::string error;
};

JointDistribution uniform_joint(const Game& g) {
  JointDistribution z;
  z.n1 = g.n1;
  z.n2 = g.n2;
  z.w.assign(static_cast<std::size_t>(g.n1) * g.n2,
             1.0 / (static_cast<double>(g.n1) * g.n2));
  return z;
}

// Product distribution of two interior mixed actions, bounded away from the
// simplex boundary so continuous starts do not begin on a face.
JointDistribution interior_joint(const Game& g, RngStream& rng) {
  MixedProfile p;
  for (int i = 0; i < 2; ++i) {
    MixedAction x;
    double sum = 0.0;
    for (int k = 0; k < g.actions(i); ++k) {
      x.w.push_back(0.1 + rng.uniform());
      sum += x.w.back();
    }
    for (double& w : x.w) w /= sum;
    (i == 0 ? p.x1 : p.x2) = x;
  }
  return product_distribution(p);
}

// Resolves the `initial` key for run k; empty optional means "let the
// discrete simulation draw its own first profile".
std::optional<JointDistribution> initial_distribution(const ExperimentConfig& cfg,
                                                      const Game& g, int k,
                                                      bool continuous) {
  if (cfg.initial == "uniform") return uniform_joint(g);
  if (cfg.initial.rfind("pure:", 0) == 0) {
    std::istringstream in(cfg.initial.substr(5));
    std::string a, b;
    std::getline(in, a, ':');
    std::getline(in, b);
    int ai = -1, bi = -1;
    try {
      ai = std::stoi(a);
      bi = std::stoi(b);
    } catch (const std::exception&) {
    }
    if (ai < 0 || ai >= g.n1 || bi < 0 || bi >= g.n2)
      throw std::invalid_argument("initial=pure:<a>:<b> needs action indices in range");
    return pure_joint(g.n1, g.n2, ai, bi);
  }
  // random: continuous kinds need an explicit interior state, discrete play
  // draws its own uniform first profile.
  if (continuous) {
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(k));
    return interior_joint(g, rng);
  }
  return std::nullopt;
}

json mixed_json(const MixedAction& x) {
  json arr = json::array();
  for (double w : x.w) arr.push_back(w);
  return arr;
}

json run_analyses(const ExperimentConfig& cfg, const Game& g,
                  const std::vector<MixedProfile>& equilibria,
                  const Trajectory& traj) {
  json out = json::object();
  for (const std::string& a : cfg.analyses) {
    if (a == "hannan") {
      HannanStatus st = hannan_status(g, traj.final_state().z);
      const char* cls = st.cls == HannanClass::Outside     ? "outside"
                        : st.cls == HannanClass::InteriorH ? "hannan"
                                                           : "reduced_hannan";
      out["hannan"] = {{"class", cls}, {"margin", st.margin}};
    } else if (a == "perturbation") {
      PerturbationSeries series = payoff_perturbation_series(g, traj);
      double max_eps = 0.0, max_delta = 0.0;
      for (double e : series.eps) max_eps = std::max(max_eps, e);
      for (double d : series.delta) max_delta = std::max(max_delta, d);
      out["perturbation"] = {{"max_eps", max_eps},
                            {"max_delta", max_delta},
                            {"tail_max_eps", series.tail_max_eps(0.9)}};
    } else if (a == "limit_set") {
      LimitSetReport rep = limit_set_estimate(g, traj, cfg.tail_fraction,
                                              equilibria, cfg.cluster_radius);
      json eq_dist = json::array();
      for (double d : rep.equilibrium_distance) eq_dist.push_back(d);
      out["limit_set"] = {{"clusters", rep.accumulation_points.size()},
                         {"equilibrium_distance", eq_dist},
                         {"hr_distance", rep.hr_distance},
                         {"cycling", rep.cycling},
                         {"period_log_time", rep.period_log_time}};
    }
  }
  return out;
}

std::string write_artifact(const fs::path& path, const std::string& body) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
  return fnv1a_hex(body);
}

DynamicsKind discrete_kind(const std::string& kind) {
  if (kind == "stochastic") return DynamicsKind::Stochastic;
  if (kind == "expected") return DynamicsKind::Expected;
  return DynamicsKind::Dfp;
}

void run_discrete(const ExperimentConfig& cfg, const Game& g,
                  const std::vector<MixedProfile>& equilibria, const fs::path& dir,
                  int k, RunOutput& out, json& artifacts, std::mutex& mu) {
  RunConfig rc;
  rc.strategy = {parse_strategy(cfg.strategy[0]), parse_strategy(cfg.strategy[1])};
  rc.kind = discrete_kind(cfg.kind);
  rc.T = cfg.T;
  rc.seed = cfg.seed;
  rc.stream = static_cast<std::uint64_t>(k);
  rc.initial_z = initial_distribution(cfg, g, k, false);
  rc.t0 = rc.initial_z ? cfg.t0 : 1;
  Trajectory traj = run(g, rc);

  std::ostringstream csv;
  write_trajectory_csv(csv, g, cfg.game, traj);
  fs::path rel = fs::path("run" + std::to_string(k)) / "trajectory.csv";
  std::string hash = write_artifact(dir / rel, csv.str());

  const SimState& fin = traj.final_state();
  double min_max_rmax = std::numeric_limits<double>::infinity();
  for (const auto& r : traj.rmax)
    min_max_rmax = std::min(min_max_rmax, std::max(r[0], r[1]));
  out.stats = {{"run", k},
               {"stream", k},
               {"T", traj.T},
               {"final_rmax", {fin.rmax(0), fin.rmax(1)}},
               {"final_beliefs", {mixed_json(fin.beliefs.x1), mixed_json(fin.beliefs.x2)}},
               {"final_payoffs", {expected_payoff(g, 0, fin.z), expected_payoff(g, 1, fin.z)}},
               {"min_over_t_max_player_rmax", min_max_rmax},
               {"csv", rel.generic_string()},
               {"csv_rows", traj.snapshots.size()}};
  json analyses = run_analyses(cfg, g, equilibria, traj);
  if (!analyses.empty()) out.stats["analyses"] = analyses;

  std::lock_guard<std::mutex> lock(mu);
  artifacts.push_back({{"path", rel.generic_string()},
                       {"bytes", csv.str().size()},
                       {"fnv1a", hash}});
}

void run_cfp(const ExperimentConfig& cfg, const Game& g, const fs::path& dir, int k,
             RunOutput& out, json& artifacts, std::mutex& mu) {
  auto z0 = initial_distribution(cfg, g, k, true);
  ContinuousTrajectory traj =
      cfp_integrate(g, marginals(*z0), *z0, static_cast<double>(cfg.T));

  std::ostringstream csv;
  write_breakpoint_csv(csv, g, cfg.game, traj);
  fs::path rel = fs::path("run" + std::to_string(k)) / "trajectory.csv";
  std::string hash = write_artifact(dir / rel, csv.str());

  std::array<double, 2> res = regret_conservation_residual(traj);
  double scale = std::max({1.0, traj.rmax.front()[0], traj.rmax.front()[1]});
  out.stats = {{"run", k},
               {"final_time", traj.final_time()},
               {"pieces", traj.piece_q.size()},
               {"final_rmax", {traj.rmax.back()[0], traj.rmax.back()[1]}},
               {"conservation_residual", std::max(res[0], res[1]) / scale},
               {"csv", rel.generic_string()},
               {"csv_rows", traj.times.size()}};

  std::lock_guard<std::mutex> lock(mu);
  artifacts.push_back({{"path", rel.generic_string()},
                       {"bytes", csv.str().size()},
                       {"fnv1a", hash}});
}

void run_ode(const ExperimentConfig& cfg, const Game& g, const fs::path& dir, int k,
             RunOutput& out, json& artifacts, std::mutex& mu) {
  std::array<PotentialSpec, 2> specs;
  for (int i = 0; i < 2; ++i) {
    Strategy s = parse_strategy(cfg.strategy[i]);
    if (s.kind != Strategy::Kind::Potential)
      throw std::invalid_argument("cont_noregret needs potential-rule strategies");
    specs[i] = s.potential;
  }
  auto z1 = initial_distribution(cfg, g, k, true);
  OdeTrajectory traj =
      cont_no_regret_integrate(g, specs, *z1, static_cast<double>(cfg.T));

  std::ostringstream csv;
  write_ode_csv(csv, g, cfg.game, traj);
  fs::path rel = fs::path("run" + std::to_string(k)) / "trajectory.csv";
  std::string hash = write_artifact(dir / rel, csv.str());

  out.stats = {{"run", k},
               {"final_time", traj.times.back()},
               {"steps", traj.times.size() - 1},
               {"final_rmax", {traj.rmax.back()[0], traj.rmax.back()[1]}},
               {"csv", rel.generic_string()},
               {"csv_rows", traj.times.size()}};

  std::lock_guard<std::mutex> lock(mu);
  artifacts.push_back({{"path", rel.generic_string()},
                       {"bytes", csv.str().size()},
                       {"fnv1a", hash}});
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  fs::path dir = fs::path(cfg.outdir) / cfg.name;
  try {
    Game g = resolve_game(cfg.game);
    fs::create_directories(dir);
    const bool continuous = cfg.kind == "cfp" || cfg.kind == "cont_noregret";

    std::vector<MixedProfile> equilibria;
    bool wants_limit_set = false;
    for (const std::string& a : cfg.analyses) wants_limit_set |= a == "limit_set";
    if (wants_limit_set) equilibria = nash_support_enumeration(g);

    std::vector<RunOutput> outputs(static_cast<std::size_t>(cfg.runs));
    json artifacts = json::array();
    std::mutex mu;
    std::atomic<int> next{0};

    unsigned hw = std::thread::hardware_concurrency();
    int workers = cfg.workers > 0 ? cfg.workers : static_cast<int>(hw ? hw : 1);
    workers = std::min(workers, cfg.runs);

    auto work = [&]() {
      for (;;) {
        int k = next.fetch_add(1);
        if (k >= cfg.runs) return;
        try {
          if (cfg.kind == "cfp")
            run_cfp(cfg, g, dir, k, outputs[k], artifacts, mu);
          else if (cfg.kind == "cont_noregret")
            run_ode(cfg, g, dir, k, outputs[k], artifacts, mu);
          else
            run_discrete(cfg, g, equilibria, dir, k, outputs[k], artifacts, mu);
        } catch (const std::exception& e) {
          outputs[k].error = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (std::thread& t : pool) t.join();

    json runs = json::array();
    json failures = json::array();
    for (int k = 0; k < cfg.runs; ++k) {
      if (!outputs[k].error.empty())
        failures.push_back({{"run", k}, {"error", outputs[k].error}});
      else
        runs.push_back(outputs[k].stats);
    }

    json aggregates = json::object();
    if (!runs.empty()) {
      if (continuous) {
        if (cfg.kind == "cfp") {
          double worst = 0.0;
          for (const json& r : runs)
            worst = std::max(worst, r["conservation_residual"].get<double>());
          aggregates["max_conservation_residual"] = worst;
        }
      } else {
        int ok = 0;
        double min_max = std::numeric_limits<double>::infinity();
        for (const json& r : runs) {
          double r1 = r["final_rmax"][0].get<double>();
          double r2 = r["final_rmax"][1].get<double>();
          if (std::max(r1, r2) <= 0.05) ++ok;
          min_max = std::min(min_max, r["min_over_t_max_player_rmax"].get<double>());
        }
        aggregates["frac_final_rmax_le_005"] =
            static_cast<double>(ok) / static_cast<double>(runs.size());
        aggregates["min_over_t_max_player_rmax"] = min_max;
      }
    }

    auto now = std::chrono::system_clock::now().time_since_epoch();
    json summary = {
        {"experiment",
         {{"name", cfg.name},
          {"game", cfg.game},
          {"kind", cfg.kind},
          {"T", cfg.T},
          {"runs", cfg.runs},
          {"seed", cfg.seed},
          {"t0", cfg.t0},
          {"initial", cfg.initial},
          {"strategy", {cfg.strategy[0], cfg.strategy[1]}},
          {"analyses", cfg.analyses}}},
        {"metadata",
         {{"created_unix_ms",
           std::chrono::duration_cast<std::chrono::milliseconds>(now).count()},
          {"workers", workers}}},
        {"runs", runs},
        {"aggregates", aggregates},
        {"failures", failures}};
    std::string summary_body = summary.dump(2) + "\n";
    std::string summary_hash = write_artifact(dir / "summary.json", summary_body);
    artifacts.push_back({{"path", "summary.json"},
                         {"bytes", summary_body.size()},
                         {"fnv1a", summary_hash}});

    std::sort(artifacts.begin(), artifacts.end(), [](const json& a, const json& b) {
      return a["path"].get<std::string>() < b["path"].get<std::string>();
    });
    json manifest = {{"experiment", cfg.name}, {"artifacts", artifacts}};
    write_artifact(dir / "manifest.json", manifest.dump(2) + "\n");

    log << "experiment '" << cfg.name << "': " << runs.size() << "/" << cfg.runs
        << " runs ok, artifacts in " << dir.string() << "\n";
    if (!failures.empty()) {
      json error = {{"error", failures.front()["error"]}, {"failures", failures}};
      write_artifact(dir / "error.json", error.dump(2) + "\n");
      log << "experiment '" << cfg.name << "': " << failures.size()
          << " run(s) failed; see " << (dir / "error.json").string() << "\n";
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    try {
      json error = {{"error", e.what()}};
      write_artifact(dir / "error.json", error.dump(2) + "\n");
    } catch (const std::exception&) {
    }
    log << "experiment '" << cfg.name << "' failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace regretlab
