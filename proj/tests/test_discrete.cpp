#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "regretlab/catalog.hpp"
#include "regretlab/discrete.hpp"

using namespace regretlab;

namespace {

RunConfig rm_config(long T, uint64_t seed = 7, uint64_t stream = 0) {
  RunConfig cfg;
  cfg.strategy = {parse_strategy("rm"), parse_strategy("rm")};
  cfg.kind = DynamicsKind::Stochastic;
  cfg.T = T;
  cfg.seed = seed;
  cfg.stream = stream;
  return cfg;
}

}  // namespace

TEST_CASE("average play equals the empirical action frequencies") {
  Game g = catalog_build("shapley");
  RunConfig cfg = rm_config(500);
  Trajectory traj = run(g, cfg);
  REQUIRE(traj.actions.size() == 499);

  // Rebuild counts: the initial draw plus every recorded step.
  std::vector<std::vector<long>> count(g.n1, std::vector<long>(g.n2, 0));
  SimState first = traj.snapshots.front();
  REQUIRE(traj.snapshot_periods.front() == 1);
  int a0 = first.last_realized[0], b0 = first.last_realized[1];
  count[a0][b0]++;
  for (const auto& ab : traj.actions) count[ab[0]][ab[1]]++;

  const SimState& last = traj.final_state();
  for (int a = 0; a < g.n1; ++a)
    for (int b = 0; b < g.n2; ++b)
      CHECK(last.z.at(a, b) ==
            doctest::Approx(count[a][b] / 500.0).epsilon(1e-12));
}

TEST_CASE("identical seed and stream replay bit-exactly") {
  Game g = catalog_build("shapley");
  RunConfig cfg = rm_config(2000, 42, 3);
  Trajectory t1 = run(g, cfg);
  Trajectory t2 = run(g, cfg);
  REQUIRE(t1.actions.size() == t2.actions.size());
  for (size_t i = 0; i < t1.actions.size(); ++i) {
    CHECK(t1.actions[i] == t2.actions[i]);
    CHECK(t1.rmax[i][0] == t2.rmax[i][0]);
    CHECK(t1.rmax[i][1] == t2.rmax[i][1]);
  }
  const SimState &s1 = t1.final_state(), &s2 = t2.final_state();
  for (int a = 0; a < g.n1; ++a)
    for (int b = 0; b < g.n2; ++b)
      CHECK(s1.z.at(a, b) == s2.z.at(a, b));

  Trajectory t3 = run(g, rm_config(2000, 42, 4));
  bool differ = false;
  for (size_t i = 0; i < t1.actions.size() && !differ; ++i)
    differ = t1.actions[i] != t3.actions[i];
  CHECK(differ);
}

TEST_CASE("fictitious play on the 2x2 miscoordination game locks off-diagonal") {
  // From (L, R) both players keep miscoordinating forever and the larger
  // per-player regret stays at least sqrt(2)/(1+sqrt(2)).
  Game g = catalog_build("fig1");
  const double eta = std::sqrt(2.0) / (1.0 + std::sqrt(2.0));

  RunConfig cfg;
  cfg.kind = DynamicsKind::Dfp;
  cfg.tie = TieRule::Lowest;
  cfg.T = 4000;
  cfg.seed = 1;
  cfg.t0 = 1;
  cfg.initial_z = pure_joint(2, 2, 0, 1);  // (L, R)
  Trajectory traj = run(g, cfg);

  for (const auto& ab : traj.actions) CHECK(ab[0] != ab[1]);
  long t = cfg.t0;
  for (const auto& r : traj.rmax) {
    ++t;
    if (t < 8) continue;  // early periods still carry the start-up transient
    CHECK(std::max(r[0], r[1]) >= eta - 1e-6);
  }
  CHECK(std::max(traj.rmax.back()[0], traj.rmax.back()[1]) ==
        doctest::Approx(eta).epsilon(1e-3));
}

TEST_CASE("the secure action is never chosen after the first period") {
  // In the 3x2 variant the row player's third action guarantees the payoff
  // eta but is never a strict best reply, so fictitious play avoids it.
  Game g = catalog_build("fig2");
  RunConfig cfg;
  cfg.kind = DynamicsKind::Dfp;
  cfg.T = 3000;
  cfg.seed = 11;
  Trajectory traj = run(g, cfg);
  for (const auto& ab : traj.actions) CHECK(ab[0] != 2);

  // ... yet both players end with positive maximal regret.
  CHECK(traj.rmax.back()[0] > 0.0);
  CHECK(traj.rmax.back()[1] > 0.0);
}

TEST_CASE("step identities hold along a regret matching run") {
  Game g = catalog_build("shapley");
  RunConfig cfg = rm_config(20000, 5);
  cfg.scratch_check_every = 500;
  Trajectory traj = run(g, cfg);
  CHECK(traj.diag.max_orthogonality <= 1e-12);
  CHECK(traj.diag.sign_violations == 0);
  CHECK(traj.diag.max_scratch_gap <= 1e-9);
}

TEST_CASE("constant-action fallback leaves its own cumulative regret frozen") {
  // Player 2 gets nothing, so their regrets never turn positive and the
  // fallback action's cumulative regret must stay numerically constant.
  Game g = catalog_build("fig5:0.1");
  RunConfig cfg = rm_config(5000, 3);
  Trajectory traj = run(g, cfg);
  CHECK(traj.diag.fallback_drift == 0.0);
  CHECK(traj.final_state().rmax(1) <= 0.0);
}

TEST_CASE("expected-play dynamics are deterministic") {
  Game g = catalog_build("shapley");
  RunConfig cfg = rm_config(300, 9);
  cfg.kind = DynamicsKind::Expected;
  cfg.record_mixed = true;
  Trajectory t1 = run(g, cfg);
  cfg.seed = 123456;  // seed is irrelevant without realized draws
  cfg.initial_z = t1.snapshots.front().z;
  Trajectory t2 = run(g, cfg);
  const SimState &s1 = t1.final_state(), &s2 = t2.final_state();
  for (int a = 0; a < g.n1; ++a)
    for (int b = 0; b < g.n2; ++b)
      CHECK(s1.z.at(a, b) == doctest::Approx(s2.z.at(a, b)).epsilon(1e-12));
  CHECK(t1.actions.back()[0] == -1);
  CHECK(t1.mixed.size() == t1.actions.size());
}

TEST_CASE("exponential weights play full-support mixtures") {
  Game g = catalog_build("matching_pennies");
  RunConfig cfg;
  cfg.strategy = {parse_strategy("expw:0.5"), parse_strategy("expw:0.5")};
  cfg.kind = DynamicsKind::Expected;
  cfg.T = 2000;
  cfg.seed = 2;
  cfg.record_mixed = true;
  Trajectory traj = run(g, cfg);
  for (const MixedProfile& m : traj.mixed) {
    for (double w : m.x1.w) CHECK(w > 0.0);
    for (double w : m.x2.w) CHECK(w > 0.0);
  }
  // Play should concentrate toward the mixed equilibrium as beta grows.
  const SimState& s = traj.final_state();
  CHECK(s.rmax(0) < 0.05);
  CHECK(s.rmax(1) < 0.05);
}

TEST_CASE("geometric schedule structure") {
  std::vector<long> sch = geometric_schedule(1, 1000000);
  CHECK(sch.front() == 1);
  CHECK(sch.back() == 1000000);
  for (size_t i = 1; i < sch.size(); ++i) CHECK(sch[i] > sch[i - 1]);
  // ~145 points cover a million periods at ratio 1.1.
  CHECK(sch.size() < 200);
  CHECK(sch.size() > 100);

  std::vector<long> tail = geometric_schedule(500, 1000);
  CHECK(tail.front() == 500);
  CHECK(tail.back() == 1000);
  for (long p : tail) {
    CHECK(p >= 500);
    CHECK(p <= 1000);
  }

  CHECK(geometric_schedule(7, 7) == std::vector<long>{7});
  CHECK_THROWS_AS(geometric_schedule(8, 7), std::invalid_argument);
}

TEST_CASE("snapshots land exactly on the schedule") {
  Game g = catalog_build("shapley");
  RunConfig cfg = rm_config(1500, 21);
  cfg.record_periods = false;
  Trajectory traj = run(g, cfg);
  std::vector<long> sch = geometric_schedule(1, 1500);
  REQUIRE(traj.snapshot_periods == sch);
  for (size_t i = 0; i < traj.snapshots.size(); ++i)
    CHECK(traj.snapshots[i].t == traj.snapshot_periods[i]);
  CHECK(traj.actions.empty());
}

TEST_CASE("tie rules control best-reply selection") {
  // Identical-payoff 2x2 game: every action is always a best reply.
  Game g = make_game(2, 2, {1, 1, 1, 1}, {1, 1, 1, 1});

  RunConfig cfg;
  cfg.kind = DynamicsKind::Dfp;
  cfg.T = 200;
  cfg.seed = 17;
  cfg.t0 = 1;

  cfg.tie = TieRule::Lowest;
  cfg.initial_z = pure_joint(2, 2, 1, 1);
  Trajectory lo = run(g, cfg);
  for (const auto& ab : lo.actions) {
    CHECK(ab[0] == 0);
    CHECK(ab[1] == 0);
  }

  cfg.tie = TieRule::Stay;
  cfg.initial_z.reset();  // random first draw, then stay put forever
  Trajectory st = run(g, cfg);
  auto first = st.snapshots.front().last_realized;
  for (const auto& ab : st.actions) CHECK(ab == first);
  cfg.initial_z = pure_joint(2, 2, 1, 1);

  cfg.tie = TieRule::Random;
  Trajectory rd = run(g, cfg);
  std::set<int> seen;
  for (const auto& ab : rd.actions) seen.insert(ab[0]);
  CHECK(seen.size() == 2);
}

TEST_CASE("explicit initial state seeds consistent regrets") {
  Game g = catalog_build("fig3i");
  JointDistribution z0{3, 3, std::vector<double>(9, 1.0 / 9.0)};
  SimState s = initial_state(g, 10, z0);
  CHECK(s.t == 10);
  for (int i = 0; i < 2; ++i) {
    RegretVector direct = regret_vector(g, i, z0);
    RegretVector inc = s.regrets(i);
    for (size_t k = 0; k < direct.v.size(); ++k)
      CHECK(inc.v[k] == doctest::Approx(direct.v[k]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(initial_state(g, 0, z0), std::invalid_argument);
}

TEST_CASE("stochastic and fictitious steps advance a shared state correctly") {
  Game g = catalog_build("shapley");
  RngStream rng(99, 0);
  SimState s = initial_state(g, rng);
  std::array<Strategy, 2> strat = {parse_strategy("lp:3"),
                                   parse_strategy("rm")};
  StepDiagnostics diag;
  for (int k = 0; k < 50; ++k) step_no_regret(g, s, strat, rng, &diag);
  CHECK(s.t == 51);
  CHECK(diag.max_orthogonality <= 1e-12);

  step_dfp(g, s, TieRule::Lowest, rng, &diag);
  CHECK(s.t == 52);
  CHECK(s.last_realized[0] >= 0);

  step_expected(g, s, strat, &diag);
  CHECK(s.t == 53);
  CHECK(s.last_realized[0] == -1);
  double mass = 0.0;
  for (double w : s.z.w) mass += w;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lp potentials with large exponent stay finite") {
  Game g = catalog_build("shapley");
  RunConfig cfg = rm_config(3000, 13);
  cfg.strategy = {parse_strategy("lp:100"), parse_strategy("lp:100")};
  Trajectory traj = run(g, cfg);
  for (const auto& r : traj.rmax) {
    CHECK(std::isfinite(r[0]));
    CHECK(std::isfinite(r[1]));
  }
  CHECK(traj.diag.sign_violations == 0);
}
