#include "regretlab/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "regretlab/catalog.hpp"
#include "regretlab/continuous.hpp"
#include "regretlab/discrete.hpp"
#include "regretlab/equilibrium.hpp"
#include "regretlab/perturbation.hpp"
#include "regretlab/rng.hpp"

namespace regretlab {

namespace {

// Pinned numeric knobs for the whole suite. Seeds follow criterion ids so a
// rerun of any single criterion reproduces its numbers exactly.
constexpr double kLockInFloorSlack = 1e-6;        // criterion 1
constexpr double kConservationTol = 1e-6;         // criteria 2, 3
constexpr double kConservationRootTol = 1e-12;    // switch-time bisection width
constexpr double kRegretLevel = 0.05;             // criteria 4, 13
constexpr double kRegretFraction = 0.95;          // criteria 4, 13
constexpr double kProximity = 0.05;               // criteria 5, 6, 14
constexpr double kProximityFraction = 0.90;       // criteria 5, 6, 7, 14
constexpr double kDominantWeight = 0.90;          // criterion 7
constexpr double kPayoffWindow = 0.1;             // criterion 7
constexpr double kExactMargin = 1e-12;            // criteria 8, 10
constexpr double kGraphTol = 1e-9;                // criterion 9
constexpr double kCurbTol = 1e-10;                // criterion 11
constexpr double kStayFrequency = 0.95;           // criterion 12
constexpr double kAttractionQuantile = 0.90;      // criterion 12
constexpr double kAttractionDistance = 0.05;      // criterion 12
constexpr double kOrthogonalityTol = 1e-12;       // criterion 15
constexpr double kFallbackDriftTol = 1e-10;       // criterion 15
constexpr double kSmoothFinalRegret = 0.02;       // criterion 16

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

JointDistribution uniform_joint(const Game& g) {
  JointDistribution z;
  z.n1 = g.n1;
  z.n2 = g.n2;
  z.w.assign(static_cast<std::size_t>(g.n1) * g.n2,
             1.0 / (static_cast<double>(g.n1) * g.n2));
  return z;
}

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

// Per-run facts shared by criteria 4, 5, 7, and 15.
struct BatchRun {
  std::array<double, 2> final_rmax;
  MixedProfile final_beliefs;
  std::array<double, 2> final_payoffs;
  StepDiagnostics diag;
};

struct BatchCache {
  bool ready = false;
  // matching_pennies, shapley, fig3i in this order.
  std::array<std::vector<BatchRun>, 3> games;
};

const std::array<const char*, 3> kBatchGames = {"matching_pennies", "shapley",
                                               "fig3i"};
constexpr int kBatchRuns = 50;
constexpr long kBatchT = 100000;

void ensure_batch(BatchCache& cache) {
  if (cache.ready) return;
  for (std::size_t gi = 0; gi < kBatchGames.size(); ++gi) {
    Game g = catalog_build(kBatchGames[gi]);
    cache.games[gi].reserve(kBatchRuns);
    for (int k = 0; k < kBatchRuns; ++k) {
      RunConfig rc;
      rc.T = kBatchT;
      rc.seed = 4;
      rc.stream = static_cast<std::uint64_t>(k);
      rc.record_periods = false;
      Trajectory traj = run(g, rc);
      const SimState& fin = traj.final_state();
      cache.games[gi].push_back({{fin.rmax(0), fin.rmax(1)},
                                 fin.beliefs,
                                 {expected_payoff(g, 0, fin.z),
                                  expected_payoff(g, 1, fin.z)},
                                 traj.diag});
    }
  }
  cache.ready = true;
}

CriterionResult lock_in_floor() {
  Game g = catalog_build("fig1");
  RunConfig rc;
  rc.kind = DynamicsKind::Dfp;
  rc.T = 10000;
  rc.seed = 1;
  rc.initial_z = pure_joint(2, 2, 0, 1);
  Trajectory traj = run(g, rc);
  double floor = std::numeric_limits<double>::infinity();
  for (const auto& r : traj.rmax) floor = std::min(floor, std::max(r[0], r[1]));
  const double want = std::sqrt(2.0) / (1.0 + std::sqrt(2.0)) - kLockInFloorSlack;
  return {1, "fictitious play keeps the fig1 max regret above the lock-in level",
          "min over t>=2 of max regret = " + fmt(floor), ">= " + fmt(want),
          floor >= want};
}

CriterionResult conservation_interior() {
  double worst = 0.0;
  for (std::size_t gi = 0; gi < kBatchGames.size(); ++gi) {
    Game g = catalog_build(kBatchGames[gi]);
    for (int r = 0; r < 5; ++r) {
      RngStream rng(2, gi * 8 + static_cast<std::uint64_t>(r));
      JointDistribution z0 = interior_joint(g, rng);
      ContinuousTrajectory traj =
          cfp_integrate(g, marginals(z0), z0, 1000.0,
                        TiePolicy::RestrictedEquilibrium, kConservationRootTol);
      std::array<double, 2> res = regret_conservation_residual(traj);
      for (int i = 0; i < 2; ++i)
        worst = std::max(worst, res[i] / std::max(1.0, traj.rmax.front()[i]));
    }
  }
  return {2, "piecewise play conserves t * max regret from 15 interior starts",
          "max relative drift = " + fmt(worst), "<= " + fmt(kConservationTol),
          worst <= kConservationTol};
}

CriterionResult conservation_scripted() {
  Game g = catalog_build("matching_pennies");
  MixedProfile p{{{0.3, 0.7}}, {{0.6, 0.4}}};
  JointDistribution z0 = product_distribution(p);
  std::vector<ScriptSegment> script;
  for (double t = 2.0; t < 1000.0; t *= 2.0)
    script.push_back({t, pure_mixed(2, script.size() % 2 == 0 ? 0 : 1)});
  script.push_back({1000.0, pure_mixed(2, script.size() % 2 == 0 ? 0 : 1)});
  ContinuousTrajectory traj =
      cfp_integrate_scripted(g, p, z0, 1000.0, script, kConservationRootTol);
  std::array<double, 2> res = regret_conservation_residual(traj);
  double drift = res[0] / std::max(1.0, traj.rmax.front()[0]);
  return {3, "best-replying against a scripted opponent conserves own scaled regret",
          "player 1 relative drift = " + fmt(drift), "<= " + fmt(kConservationTol),
          drift <= kConservationTol};
}

double batch_fraction(const std::vector<BatchRun>& runs,
                      bool (*good)(const BatchRun&)) {
  int ok = 0;
  for (const BatchRun& r : runs) ok += good(r) ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(runs.size());
}

CriterionResult regret_vanishes(BatchCache& cache) {
  ensure_batch(cache);
  double least = 1.0;
  for (const auto& runs : cache.games)
    least = std::min(least, batch_fraction(runs, [](const BatchRun& r) {
              return std::max(r.final_rmax[0], r.final_rmax[1]) <= kRegretLevel;
            }));
  return {4, "regret matching ends with both max regrets under 0.05 (3 games x 50 seeds)",
          "min over games of success fraction = " + fmt(least),
          ">= " + fmt(kRegretFraction), least >= kRegretFraction};
}

CriterionResult pennies_beliefs(BatchCache& cache) {
  ensure_batch(cache);
  double frac = batch_fraction(cache.games[0], [](const BatchRun& r) {
    double d = 0.0;
    for (double w : r.final_beliefs.x1.w) d = std::max(d, std::abs(w - 0.5));
    for (double w : r.final_beliefs.x2.w) d = std::max(d, std::abs(w - 0.5));
    return d <= kProximity;
  });
  return {5, "matching-pennies beliefs finish within 0.05 of the mixed point",
          "success fraction = " + fmt(frac), ">= " + fmt(kProximityFraction),
          frac >= kProximityFraction};
}

CriterionResult dominated_vanish() {
  Game g = catalog_build("fig3ii:0.25");
  int ok = 0;
  for (int k = 0; k < kBatchRuns; ++k) {
    RunConfig rc;
    rc.T = kBatchT;
    rc.seed = 6;
    rc.stream = static_cast<std::uint64_t>(k);
    rc.record_periods = false;
    Trajectory traj = run(g, rc);
    const MixedProfile& b = traj.final_state().beliefs;
    // Action indices 1 and 3 are the eps-shaded copies.
    if (b.x1.w[1] + b.x1.w[3] <= kProximity && b.x2.w[1] + b.x2.w[3] <= kProximity)
      ++ok;
  }
  double frac = static_cast<double>(ok) / kBatchRuns;
  return {6, "weight on the strictly dominated copies dies out (fig3ii eps=0.25)",
          "success fraction = " + fmt(frac), ">= " + fmt(kProximityFraction),
          frac >= kProximityFraction};
}

CriterionResult potential_lockon(BatchCache& cache) {
  ensure_batch(cache);
  double frac_belief = batch_fraction(cache.games[2], [](const BatchRun& r) {
    return r.final_beliefs.x1.w[0] >= kDominantWeight &&
           r.final_beliefs.x2.w[0] >= kDominantWeight;
  });
  double frac_payoff = batch_fraction(cache.games[2], [](const BatchRun& r) {
    return std::abs(r.final_payoffs[0] - 2.0) <= kPayoffWindow &&
           std::abs(r.final_payoffs[1] - 2.0) <= kPayoffWindow;
  });
  double least = std::min(frac_belief, frac_payoff);
  return {7, "fig3i play concentrates on the top action and its payoff",
          "belief fraction = " + fmt(frac_belief) + ", payoff fraction = " +
              fmt(frac_payoff),
          "both >= " + fmt(kProximityFraction), least >= kProximityFraction};
}

CriterionResult hannan_exact() {
  Game g3 = catalog_build("fig3i");
  JointDistribution diag{3, 3, std::vector<double>(9, 0.0)};
  for (int k = 0; k < 3; ++k) diag.at(k, k) = 1.0 / 3.0;
  HannanStatus a = hannan_status(g3, diag);

  JointDistribution mix{4, 4, std::vector<double>(16, 0.0)};
  mix.at(1, 1) = 0.5;
  mix.at(3, 3) = 0.5;
  HannanStatus b = hannan_status(catalog_build("fig3ii:0.5"), mix);
  HannanStatus c = hannan_status(catalog_build("fig3ii:0.6"), mix);

  bool pass = a.cls == HannanClass::ReducedHR && std::abs(a.margin) <= kExactMargin &&
              b.cls != HannanClass::Outside && b.margin <= kExactMargin &&
              c.cls == HannanClass::Outside &&
              std::abs(c.margin - 0.1) <= kExactMargin;
  return {8, "hannan margins at the pinned points: 0 on both edges, 0.1 outside",
          "margins = " + fmt(a.margin) + ", " + fmt(b.margin) + ", " + fmt(c.margin),
          "|.| <= 1e-12, <= 1e-12, = 0.1 +- 1e-12", pass};
}

CriterionResult graph_distance_exact() {
  Game g = catalog_build("fig5:0.1");
  MixedAction opp{{0.8, 0.2}};
  double dc = graph_br_distance(g, 0, pure_mixed(3, 1), opp);
  double db = graph_br_distance(g, 0, pure_mixed(3, 2), opp);
  bool pass = std::abs(dc - 0.3) <= kGraphTol && std::abs(db - 1.0) <= kGraphTol;
  return {9, "graph distances of the middle and bottom actions at (0.8, 0.2)",
          "d(C) = " + fmt(dc) + ", d(B) = " + fmt(db),
          "0.3 +- 1e-9 and 1 +- 1e-9", pass};
}

CriterionResult perturbation_bound() {
  Game g = catalog_build("shapley");
  int violations = 0;
  long checked = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < 20; ++s) {
    RunConfig rc;
    rc.T = 10000;
    rc.seed = 10;
    rc.stream = static_cast<std::uint64_t>(s);
    Trajectory traj = run(g, rc);
    PerturbationSeries series = payoff_perturbation_series(g, traj);
    for (std::size_t j = 1; j < series.eps.size(); ++j) {
      double r1 = traj.rmax[j - 1][0], r2 = traj.rmax[j - 1][1];
      if (r1 > 0.0 && r2 > 0.0) {
        ++checked;
        double gap = series.eps[j] - std::max(r1, r2);
        worst = std::max(worst, gap);
        if (gap > kExactMargin) ++violations;
      }
    }
  }
  return {10, "positive-regret periods are eps-best replies with eps <= max regret",
          std::to_string(violations) + " violations over " + std::to_string(checked) +
              " periods, worst slack = " + fmt(worst),
          "0 violations (slack <= 1e-12)", violations == 0};
}

CriterionResult curb_exact() {
  Game g = catalog_build("fig3i");
  ProductSet a{{std::vector<int>{0}, std::vector<int>{0}}};
  double delta = delta_B(g, a);
  double gamma = gamma_B(g, a, PotentialSpec::lp_norm(2.0));

  std::vector<ProductSet> found = curb_enumerate(g);
  std::vector<ProductSet> expected{
      a,
      {{std::vector<int>{0, 1}, std::vector<int>{0, 1}}},
      full_product(g)};
  bool sets_match = found.size() == expected.size();
  for (const ProductSet& want : expected)
    sets_match = sets_match && std::find(found.begin(), found.end(), want) != found.end();

  std::vector<ProductSet> pennies = curb_enumerate(catalog_build("matching_pennies"));
  bool pennies_full = pennies.size() == 1 &&
                      pennies.front() == full_product(catalog_build("matching_pennies"));

  bool pass = std::abs(delta - 1.0) <= kCurbTol && std::abs(gamma - 0.1) <= kCurbTol &&
              sets_match && pennies_full;
  return {11, "curb gap 1 and radius 0.1 on fig3i; pinned curb enumerations",
          "delta = " + fmt(delta) + ", gamma = " + fmt(gamma) + ", fig3i sets = " +
              std::to_string(found.size()) + ", pennies sets = " +
              std::to_string(pennies.size()),
          "1 +- 1e-10, 0.1 +- 1e-10, {A^2, {A,B}^2, full}, {full}", pass};
}

CriterionResult curb_attraction() {
  Game g = catalog_build("fig3i");
  ProductSet B{{std::vector<int>{0}, std::vector<int>{0}}};
  AttractionConfig cfg;
  cfg.t0 = 1000;
  cfg.T = 100000;
  cfg.runs = 200;
  cfg.gamma = 0.05;
  cfg.seed = 12;
  std::array<PotentialSpec, 2> specs{PotentialSpec::lp_norm(2.0),
                                     PotentialSpec::lp_norm(2.0)};
  AttractionStats stats = curb_attraction_experiment(g, B, specs, cfg);
  double q90 = stats.quantile(kAttractionQuantile);
  bool pass = stats.stay_frequency >= kStayFrequency && q90 <= kAttractionDistance;
  return {12, "play seeded inside the curb neighborhood stays and closes in (200 runs)",
          "stay fraction = " + fmt(stats.stay_frequency) + ", q90 distance = " + fmt(q90),
          ">= " + fmt(kStayFrequency) + " and <= " + fmt(kAttractionDistance), pass};
}

CriterionResult shapley_dichotomy() {
  Game g = catalog_build("shapley");
  std::vector<MixedProfile> eqs = nash_support_enumeration(g);
  int unclassified = 0, regret_ok = 0;
  const int runs = 20;
  for (int s = 0; s < runs; ++s) {
    RunConfig rc;
    rc.T = 1000000;
    rc.seed = 13;
    rc.stream = static_cast<std::uint64_t>(s);
    rc.record_periods = false;
    Trajectory traj = run(g, rc);
    LimitSetReport rep = limit_set_estimate(g, traj, 0.5, eqs, 0.02);
    if (!(rep.cycling || rep.equilibrium_distance[0] <= kProximity)) ++unclassified;
    const SimState& fin = traj.final_state();
    if (std::max(fin.rmax(0), fin.rmax(1)) <= kRegretLevel) ++regret_ok;
  }
  double frac = static_cast<double>(regret_ok) / runs;
  bool pass = unclassified == 0 && frac >= kRegretFraction;
  return {13, "every shapley run is near the mixed point or flagged as cycling",
          std::to_string(unclassified) + " unclassified, regret fraction = " + fmt(frac),
          "0 unclassified, fraction >= " + fmt(kRegretFraction), pass};
}

CriterionResult edge_equilibria() {
  Game g = catalog_build("a2ex2");
  int ok = 0;
  for (int k = 0; k < kBatchRuns; ++k) {
    RunConfig rc;
    rc.T = kBatchT;
    rc.seed = 14;
    rc.stream = static_cast<std::uint64_t>(k);
    rc.record_periods = false;
    Trajectory traj = run(g, rc);
    const MixedProfile& b = traj.final_state().beliefs;
    // Distance to the union of the two equilibrium edges x_B = 0, y_R = 0.
    if (std::min(b.x1.w[1], b.x2.w[1]) <= kProximity) ++ok;
  }
  double frac = static_cast<double>(ok) / kBatchRuns;
  return {14, "a2ex2 beliefs end within 0.05 of an equilibrium edge",
          "success fraction = " + fmt(frac), ">= " + fmt(kProximityFraction),
          frac >= kProximityFraction};
}

CriterionResult step_identities(BatchCache& cache) {
  ensure_batch(cache);
  double worst_orth = 0.0, worst_drift = 0.0;
  int sign = 0;
  for (const auto& runs : cache.games) {
    for (const BatchRun& r : runs) {
      worst_orth = std::max(worst_orth, r.diag.max_orthogonality);
      worst_drift = std::max(worst_drift, r.diag.fallback_drift);
      sign += r.diag.sign_violations;
    }
  }
  bool pass = worst_orth <= kOrthogonalityTol && sign == 0 &&
              worst_drift <= kFallbackDriftTol;
  return {15, "step identities: mixing orthogonality, sign persistence, scaled-sum drift",
          "orthogonality = " + fmt(worst_orth) + ", sign returns = " +
              std::to_string(sign) + ", drift = " + fmt(worst_drift),
          "<= 1e-12, 0, <= 1e-10", pass};
}

CriterionResult smooth_no_regret() {
  std::array<PotentialSpec, 2> specs{PotentialSpec::lp_norm(2.0),
                                     PotentialSpec::lp_norm(2.0)};
  Game mp = catalog_build("matching_pennies");
  JointDistribution z1{2, 2, {0.25, 0.75, 0.0, 0.0}};
  OdeTrajectory a = cont_no_regret_integrate(mp, specs, z1, 10000.0);
  OdeTrajectory b = cont_no_regret_integrate(catalog_build("fig3i"), specs,
                                             uniform_joint(catalog_build("fig3i")),
                                             10000.0);
  double final_a = std::max(a.rmax.back()[0], a.rmax.back()[1]);
  double final_b = std::max(b.rmax.back()[0], b.rmax.back()[1]);
  double least = std::numeric_limits<double>::infinity();
  for (const auto& r : a.rmax) least = std::min({least, r[0], r[1]});
  for (const auto& r : b.rmax) least = std::min({least, r[0], r[1]});
  bool pass = final_a <= kSmoothFinalRegret && final_b <= kSmoothFinalRegret &&
              least > 0.0;
  return {16, "smooth dynamics keep both regrets positive and drive them under 0.02",
          "final = " + fmt(final_a) + ", " + fmt(final_b) + "; min along runs = " +
              fmt(least),
          "finals <= 0.02, min > 0", pass};
}

}  // namespace

bool VerificationReport::all_pass() const {
  for (const CriterionResult& r : rows)
    if (!r.pass) return false;
  return true;
}

VerificationReport run_verification(const std::string& selector) {
  bool want_static = selector == "static" || selector == "all";
  bool want_dynamics = selector == "dynamics" || selector == "all";
  if (!want_static && !want_dynamics)
    throw std::invalid_argument("unknown suite '" + selector +
                                "' (use static, dynamics, or all)");

  BatchCache cache;
  VerificationReport report;
  auto add = [&](bool wanted, CriterionResult (*fn)()) {
    if (wanted) report.rows.push_back(fn());
  };
  auto add_cached = [&](bool wanted, CriterionResult (*fn)(BatchCache&)) {
    if (wanted) report.rows.push_back(fn(cache));
  };

  add(want_dynamics, lock_in_floor);            // 1
  add(want_dynamics, conservation_interior);    // 2
  add(want_dynamics, conservation_scripted);    // 3
  add_cached(want_dynamics, regret_vanishes);   // 4
  add_cached(want_dynamics, pennies_beliefs);   // 5
  add(want_dynamics, dominated_vanish);         // 6
  add_cached(want_dynamics, potential_lockon);  // 7
  add(want_static, hannan_exact);               // 8
  add(want_static, graph_distance_exact);       // 9
  add(want_dynamics, perturbation_bound);       // 10
  add(want_static, curb_exact);                 // 11
  add(want_dynamics, curb_attraction);          // 12
  add(want_dynamics, shapley_dichotomy);        // 13
  add(want_dynamics, edge_equilibria);          // 14
  add_cached(want_dynamics, step_identities);   // 15
  add(want_dynamics, smooth_no_regret);         // 16
  return report;
}

void print_verification(const VerificationReport& report, std::ostream& out) {
  int passed = 0;
  for (const CriterionResult& r : report.rows) {
    out << std::setw(2) << r.id << "  " << std::left << std::setw(58) << r.claim
        << std::right << "  " << std::left << std::setw(64) << r.measured
        << std::right << "  " << std::left << std::setw(44) << r.threshold
        << std::right << "  " << (r.pass ? "PASS" : "FAIL") << "\n";
    passed += r.pass ? 1 : 0;
  }
  out << passed << "/" << report.rows.size() << " criteria passed\n";
}

}  // namespace regretlab
