#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "regretlab/catalog.hpp"
#include "regretlab/continuous.hpp"
#include "regretlab/rng.hpp"
#include "regretlab/strategies.hpp"

using namespace regretlab;

namespace {

MixedProfile pure_profile(const Game& g, int a, int b) {
  return {pure_mixed(g.n1, a), pure_mixed(g.n2, b)};
}

// Index of the single mass-carrying action, or -1 if the play is mixed.
int pure_index(const MixedAction& q) {
  for (int k = 0; k < q.size(); ++k) {
    if (q[k] > 0.5) return k;
  }
  return -1;
}

void check_simplex(const ContinuousTrajectory& tr) {
  for (const JointDistribution& z : tr.z) {
    double sum = 0.0;
    for (double w : z.w) {
      CHECK(w >= -1e-12);
      sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
  for (const MixedProfile& p : tr.x) {
    for (int i = 0; i < 2; ++i) {
      double sum = 0.0;
      for (int k = 0; k < p.of(i).size(); ++k) {
        CHECK(p.of(i)[k] >= -1e-12);
        sum += p.of(i)[k];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

void check_piece_best_replies(const Game& g, const ContinuousTrajectory& tr) {
  for (std::size_t k = 0; k < tr.piece_q.size(); ++k) {
    for (int i = 0; i < 2; ++i) {
      const MixedAction& own = tr.piece_q[k].of(i);
      const MixedAction& opp = tr.x[k].of(1 - i);
      BestReplySet br = best_replies(g, i, opp);
      double v = 0.0;
      for (int a = 0; a < own.size(); ++a) {
        v += own[a] * action_payoff(g, i, a, opp);
      }
      CHECK(v >= br.max_payoff - 1e-8);
    }
  }
}

}  // namespace

TEST_CASE("simultaneous tie at the mixed point, then lock") {
  // Weighted coordination from mismatched corners: both players' alternatives
  // catch up at exactly t = 1 + sqrt(2), where the average play is the mixed
  // equilibrium; the restricted game there is the full game and its first
  // equilibrium (both play the first action) takes over for good.
  Game g = catalog_build("fig1");
  double t_star = 1.0 + std::sqrt(2.0);
  auto tr = cfp_integrate(g, pure_profile(g, 0, 1), pure_joint(2, 2, 0, 1), 100.0);

  REQUIRE(tr.times.size() == 3);
  REQUIRE(tr.piece_q.size() == 2);
  CHECK(tr.times[1] == doctest::Approx(t_star).epsilon(1e-8));
  CHECK(tr.x[1].x1[0] == doctest::Approx(1.0 / t_star).epsilon(1e-7));
  CHECK(tr.x[1].x2[0] == doctest::Approx(std::sqrt(2.0) / t_star).epsilon(1e-7));
  CHECK(pure_index(tr.piece_q[0].x1) == 1);
  CHECK(pure_index(tr.piece_q[0].x2) == 0);
  CHECK(pure_index(tr.piece_q[1].x1) == 0);
  CHECK(pure_index(tr.piece_q[1].x2) == 0);
  CHECK(tr.final_time() == doctest::Approx(100.0));
  CHECK(tr.final_x().x1[0] > 0.98);
  CHECK(tr.final_x().x2[0] > 0.98);

  // t * max-regret starts at sqrt(2) for both players and stays there.
  CHECK(tr.times[0] * tr.rmax[0][0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(tr.times[0] * tr.rmax[0][1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  auto res = regret_conservation_residual(tr);
  CHECK(res[0] <= 1e-8);
  CHECK(res[1] <= 1e-8);
}

TEST_CASE("a strict equilibrium is a rest point") {
  Game g = catalog_build("fig3i");
  auto tr = cfp_integrate(g, pure_profile(g, 0, 0), pure_joint(3, 3, 0, 0), 500.0);
  REQUIRE(tr.piece_q.size() == 1);
  CHECK(tr.times.front() == 1.0);
  CHECK(tr.final_time() == doctest::Approx(500.0));
  CHECK(tr.final_x().x1[0] == 1.0);
  CHECK(tr.final_x().x2[0] == 1.0);
  CHECK(tr.rmax.back()[0] <= 0.0);
  CHECK(tr.rmax.back()[1] <= 0.0);
}

TEST_CASE("pennies spiral into the mixed equilibrium") {
  Game g = catalog_build("matching_pennies");
  auto tr = cfp_integrate(g, pure_profile(g, 0, 0), pure_joint(2, 2, 0, 0), 1000.0);

  // Switches land at t = 2, 4, 6, ...: one player flips per piece, cycling
  // through the four pure profiles counterclockwise.
  REQUIRE(tr.times.size() >= 6);
  CHECK(tr.times[1] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(tr.times[2] == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(tr.times[3] == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(tr.times[4] == doctest::Approx(8.0).epsilon(1e-9));
  const int want[4][2] = {{0, 1}, {1, 1}, {1, 0}, {0, 0}};
  for (int k = 0; k < 8; ++k) {
    CHECK(pure_index(tr.piece_q[k].x1) == want[k % 4][0]);
    CHECK(pure_index(tr.piece_q[k].x2) == want[k % 4][1]);
  }

  // The averages close in on (1/2, 1/2) at rate 1/t.
  double dist = std::max(std::abs(tr.final_x().x1[0] - 0.5),
                         std::abs(tr.final_x().x2[0] - 0.5));
  CHECK(dist <= 1.05e-3);
  CHECK(dist >= 5e-4);

  // Player 1 starts with zero max regret, so it stays exactly zero; player
  // 2 starts at 2 and t * max-regret is conserved.
  for (const auto& r : tr.rmax) CHECK(std::abs(r[0]) <= 1e-8);
  CHECK(tr.rmax[0][1] == doctest::Approx(2.0).epsilon(1e-12));
  auto res = regret_conservation_residual(tr);
  CHECK(res[1] <= 2e-6);
}

TEST_CASE("lowest-index ties stall on the pennies diagonal") {
  // At the first tie the lowest-index rule keeps the action that is about to
  // be overtaken, so every piece it starts has zero length.
  Game g = catalog_build("matching_pennies");
  CHECK_THROWS_AS(cfp_integrate(g, pure_profile(g, 0, 0), pure_joint(2, 2, 0, 0),
                                1000.0, TiePolicy::LowestIndex),
                  StalledIntegration);
}

TEST_CASE("shapley play cycles with lengthening pieces") {
  Game g = catalog_build("shapley");
  auto tr = cfp_integrate(g, pure_profile(g, 0, 1), pure_joint(3, 3, 0, 1), 1000.0);

  REQUIRE(tr.piece_q.size() >= 13);
  CHECK(tr.piece_q.size() <= 30);

  // Tail pieces repeat with period six, visiting six distinct pure profiles.
  std::size_t n = tr.piece_q.size();
  std::size_t last_full = n - 1;  // final piece is truncated by the horizon
  for (std::size_t k = last_full - 6; k < last_full; ++k) {
    CHECK(pure_index(tr.piece_q[k].x1) == pure_index(tr.piece_q[k - 6].x1));
    CHECK(pure_index(tr.piece_q[k].x2) == pure_index(tr.piece_q[k - 6].x2));
  }
  std::vector<int> seen;
  for (std::size_t k = last_full - 6; k < last_full; ++k) {
    int code = pure_index(tr.piece_q[k].x1) * 3 + pure_index(tr.piece_q[k].x2);
    for (int c : seen) CHECK(c != code);
    seen.push_back(code);
  }
  CHECK(seen.size() == 6);

  // Piece lengths grow geometrically toward the end.
  for (std::size_t k = n - 5; k < n - 1; ++k) {
    CHECK(tr.times[k + 1] - tr.times[k] > tr.times[k] - tr.times[k - 1]);
  }

  auto res = regret_conservation_residual(tr);
  CHECK(res[0] <= 1e-6);
  CHECK(res[1] <= 1e-6);
}

TEST_CASE("symmetric shapley start finds the mixed equilibrium exactly") {
  // From matching corners the tie set grows to all three actions at t = 3,
  // where the average play is already uniform: the restricted game is the
  // full game, whose equilibrium is uniform x uniform, and the target of the
  // final piece equals the current average, so nothing moves again.
  Game g = catalog_build("shapley");
  auto tr = cfp_integrate(g, pure_profile(g, 0, 0), pure_joint(3, 3, 0, 0), 1000.0);

  REQUIRE(tr.times.size() == 4);
  CHECK(tr.times[1] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(tr.times[2] == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(tr.final_time() == doctest::Approx(1000.0));
  for (int k = 0; k < 3; ++k) {
    CHECK(tr.final_x().x1[k] == doctest::Approx(1.0 / 3).epsilon(1e-9));
    CHECK(tr.final_x().x2[k] == doctest::Approx(1.0 / 3).epsilon(1e-9));
    CHECK(tr.piece_q.back().x1[k] == doctest::Approx(1.0 / 3).epsilon(1e-9));
  }
}

TEST_CASE("trajectory states stay on the simplex") {
  Game fig1 = catalog_build("fig1");
  check_simplex(cfp_integrate(fig1, pure_profile(fig1, 0, 1),
                              pure_joint(2, 2, 0, 1), 100.0));
  Game mp = catalog_build("matching_pennies");
  check_simplex(cfp_integrate(mp, pure_profile(mp, 0, 0),
                              pure_joint(2, 2, 0, 0), 500.0));
  Game sh = catalog_build("shapley");
  check_simplex(cfp_integrate(sh, pure_profile(sh, 0, 1),
                              pure_joint(3, 3, 0, 1), 500.0));
}

TEST_CASE("piece plays are best replies where the piece starts") {
  Game fig1 = catalog_build("fig1");
  check_piece_best_replies(fig1, cfp_integrate(fig1, pure_profile(fig1, 0, 1),
                                               pure_joint(2, 2, 0, 1), 100.0));
  Game mp = catalog_build("matching_pennies");
  check_piece_best_replies(mp, cfp_integrate(mp, pure_profile(mp, 0, 0),
                                             pure_joint(2, 2, 0, 0), 500.0));
  Game sh = catalog_build("shapley");
  check_piece_best_replies(sh, cfp_integrate(sh, pure_profile(sh, 0, 1),
                                             pure_joint(3, 3, 0, 1), 500.0));
}

TEST_CASE("one-sided best replies conserve scaled regret against any script") {
  Game g = catalog_build("matching_pennies");
  std::vector<ScriptSegment> script{{3.0, MixedAction{{1.0, 0.0}}},
                                    {10.0, MixedAction{{0.3, 0.7}}},
                                    {1001.0, MixedAction{{0.0, 1.0}}}};
  auto tr = cfp_integrate_scripted(g, pure_profile(g, 0, 1), pure_joint(2, 2, 0, 1),
                                   1000.0, script);

  CHECK(tr.piece_q.size() >= 3);
  CHECK(tr.times[0] * tr.rmax[0][0] == doctest::Approx(2.0).epsilon(1e-12));
  auto res = regret_conservation_residual(tr);
  CHECK(res[0] <= 1e-8);
  // The scripted side is not best-replying, so its scaled regret drifts.
  CHECK(res[1] > 1.0);
}

TEST_CASE("script validation") {
  Game g = catalog_build("matching_pennies");
  MixedProfile x0 = pure_profile(g, 0, 1);
  JointDistribution z0 = pure_joint(2, 2, 0, 1);
  CHECK_THROWS_AS(cfp_integrate_scripted(g, x0, z0, 100.0, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      cfp_integrate_scripted(g, x0, z0, 100.0,
                             {{50.0, MixedAction{{1.0, 0.0}}},
                              {40.0, MixedAction{{0.0, 1.0}}}}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      cfp_integrate_scripted(g, x0, z0, 100.0, {{50.0, MixedAction{{1.0, 0.0}}}}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      cfp_integrate_scripted(g, x0, z0, 100.0,
                             {{200.0, MixedAction{{0.5, 0.3, 0.2}}}}),
      std::invalid_argument);
}

TEST_CASE("piecewise integrator input validation") {
  Game g = catalog_build("matching_pennies");
  MixedProfile x0 = pure_profile(g, 0, 0);
  JointDistribution z0 = pure_joint(2, 2, 0, 0);
  CHECK_THROWS_AS(cfp_integrate(g, x0, z0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cfp_integrate(g, x0, z0, 100.0, TiePolicy::RestrictedEquilibrium, 0.0),
                  std::invalid_argument);
  // Beliefs not matching the marginals of the joint average.
  CHECK_THROWS_AS(cfp_integrate(g, pure_profile(g, 1, 0), z0, 100.0),
                  std::invalid_argument);
  Game sh = catalog_build("shapley");
  CHECK_THROWS_AS(cfp_integrate(sh, x0, z0, 100.0), std::invalid_argument);
}

TEST_CASE("smooth dynamics field points from the state toward the joint play") {
  Game g = catalog_build("shapley");
  std::array<PotentialSpec, 2> specs{PotentialSpec::lp_norm(2.0),
                                     PotentialSpec::lp_norm(3.0)};
  RngStream rng(7, 0);
  int used = 0;
  for (int tried = 0; tried < 200 && used < 50; ++tried) {
    JointDistribution z{3, 3, std::vector<double>(9)};
    double sum = 0.0;
    for (double& w : z.w) {
      w = rng.uniform(0.0, 1.0);
      sum += w;
    }
    for (double& w : z.w) w /= sum;
    RegretVector r1 = regret_vector(g, 0, z);
    RegretVector r2 = regret_vector(g, 1, z);
    if (r1.max() <= 1e-6 || r2.max() <= 1e-6) continue;
    ++used;
    double t = 1.0 + 10.0 * rng.uniform(0.0, 1.0);
    std::vector<double> f = ode_field(g, specs, z, t);
    MixedAction q1 = q1_action(specs[0], r1);
    MixedAction q2 = q1_action(specs[1], r2);
    // t * field + state reconstructs the joint play exactly, so the field
    // vanishes precisely when the joint play equals the state.
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        CHECK(f[a * 3 + b] * t + z.at(a, b) ==
              doctest::Approx(q1[a] * q2[b]).epsilon(1e-13));
      }
    }
  }
  CHECK(used == 50);

  // Zero max regret for player 1 makes the direction undefined.
  Game mp = catalog_build("matching_pennies");
  std::array<PotentialSpec, 2> l2{PotentialSpec::lp_norm(2.0),
                                  PotentialSpec::lp_norm(2.0)};
  CHECK_THROWS_AS(ode_field(mp, l2, pure_joint(2, 2, 0, 0), 1.0),
                  PreconditionViolated);
  CHECK_THROWS_AS(ode_field(mp, l2, pure_joint(2, 2, 0, 1), 0.0),
                  std::invalid_argument);
}

TEST_CASE("smooth pennies dynamics drive regrets to zero") {
  Game g = catalog_build("matching_pennies");
  std::array<PotentialSpec, 2> specs{PotentialSpec::lp_norm(2.0),
                                     PotentialSpec::lp_norm(2.0)};
  JointDistribution z1{2, 2, {0.25, 0.75, 0.0, 0.0}};
  auto tr = cont_no_regret_integrate(g, specs, z1, 1000.0);

  CHECK(tr.rmax.front()[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tr.rmax.front()[1] == doctest::Approx(0.5).epsilon(1e-12));
  // Positive max regret is preserved by the flow while it decays.
  for (const auto& r : tr.rmax) {
    CHECK(r[0] > 0.0);
    CHECK(r[1] > 0.0);
  }
  CHECK(tr.rmax.back()[0] <= 2e-3);
  CHECK(tr.rmax.back()[1] <= 2e-3);
  CHECK(tr.rmax.back()[0] < tr.rmax.front()[0] / 50.0);
  for (std::size_t k = 1; k < tr.times.size(); ++k) {
    CHECK(tr.times[k] > tr.times[k - 1]);
  }
  CHECK(tr.times.size() < 20000);
  for (const JointDistribution& z : tr.z) {
    double sum = 0.0;
    for (double w : z.w) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("smooth dynamics settle on the dominance-solvable equilibrium") {
  Game g = catalog_build("fig3i");
  std::array<PotentialSpec, 2> specs{PotentialSpec::lp_norm(2.0),
                                     PotentialSpec::lp_norm(2.0)};
  JointDistribution z1{3, 3, std::vector<double>(9, 1.0 / 9)};
  auto tr = cont_no_regret_integrate(g, specs, z1, 10000.0);

  CHECK(tr.final_z().at(0, 0) >= 0.99);
  CHECK(tr.rmax.back()[0] > 0.0);
  CHECK(tr.rmax.back()[1] > 0.0);
  CHECK(tr.rmax.back()[0] <= 1e-3);
  CHECK(tr.rmax.back()[1] <= 1e-3);
}

TEST_CASE("smooth dynamics refuse a start without positive regret") {
  Game g = catalog_build("fig3i");
  std::array<PotentialSpec, 2> specs{PotentialSpec::lp_norm(2.0),
                                     PotentialSpec::lp_norm(2.0)};
  // A strict equilibrium has max regret exactly zero for both players.
  CHECK_THROWS_AS(cont_no_regret_integrate(g, specs, pure_joint(3, 3, 0, 0), 100.0),
                  PreconditionViolated);
  JointDistribution ok{3, 3, std::vector<double>(9, 1.0 / 9)};
  CHECK_THROWS_AS(cont_no_regret_integrate(g, specs, ok, 1.0),
                  std::invalid_argument);
  StepControl bad;
  bad.rel_tol = 0.0;
  CHECK_THROWS_AS(cont_no_regret_integrate(g, specs, ok, 100.0, bad),
                  std::invalid_argument);
}

TEST_CASE("clock change maps onto best-reply dynamics and back") {
  Game g = catalog_build("matching_pennies");
  auto tr = cfp_integrate(g, pure_profile(g, 0, 0), pure_joint(2, 2, 0, 0), 1000.0);
  auto br = rescale_to_br_dynamics(tr);
  CHECK(br.times.front() == 0.0);  // log 1
  for (std::size_t k = 0; k < br.times.size(); ++k) {
    CHECK(br.times[k] == doctest::Approx(std::log(tr.times[k])).epsilon(1e-14));
    CHECK(sup_distance(br.z[k], tr.z[k]) == 0.0);
  }
  auto back = rescale_to_cfp_time(br);
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    CHECK(back.times[k] == doctest::Approx(tr.times[k]).epsilon(1e-12));
  }

  ContinuousTrajectory degenerate;
  degenerate.times = {0.0};
  CHECK_THROWS_AS(rescale_to_br_dynamics(degenerate), std::invalid_argument);
}
