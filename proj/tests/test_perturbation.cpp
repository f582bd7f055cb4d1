#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "regretlab/catalog.hpp"
#include "regretlab/equilibrium.hpp"
#include "regretlab/perturbation.hpp"

using namespace regretlab;

namespace {

// All compositions of `total` into simplex points over `parts` coordinates.
void grid_rec(int parts, int total, int idx, int left, std::vector<int>& comp,
              std::vector<MixedAction>& out) {
  if (idx == parts - 1) {
    comp[idx] = left;
    MixedAction x;
    for (int c : comp) x.w.push_back(static_cast<double>(c) / total);
    out.push_back(std::move(x));
    return;
  }
  for (int c = 0; c <= left; ++c) {
    comp[idx] = c;
    grid_rec(parts, total, idx + 1, left - c, comp, out);
  }
}

std::vector<MixedAction> simplex_grid(int parts, int total) {
  std::vector<MixedAction> out;
  std::vector<int> comp(parts, 0);
  grid_rec(parts, total, 0, total, comp, out);
  return out;
}

}  // namespace

TEST_CASE("graph distance oracles") {
  Game g = catalog_build("fig5:0.1");
  MixedAction opp{{0.8, 0.2}};
  // The middle action is the exact best reply at (1/2, 1/2), which is 0.3
  // away; the bottom action is never a best reply, so only the own-action
  // coordinate can reach the graph and that costs a full unit.
  CHECK(graph_br_distance(g, 0, pure_mixed(3, 1), opp) ==
        doctest::Approx(0.3).epsilon(1e-10));
  CHECK(graph_br_distance(g, 0, pure_mixed(3, 2), opp) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(graph_br_distance(g, 0, pure_mixed(3, 0), opp) <= 1e-10);
  // A mixture over the two tied actions sits on the graph at the tie belief.
  CHECK(graph_br_distance(g, 0, MixedAction{{0.5, 0.5, 0.0}},
                          MixedAction{{0.5, 0.5}}) <= 1e-10);

  Game mp = catalog_build("matching_pennies");
  // Second action's region is the half where the opponent favors the second
  // column; from (0.6, 0.4) that region is 0.1 away.
  CHECK(graph_br_distance(mp, 0, pure_mixed(2, 1), MixedAction{{0.6, 0.4}}) ==
        doctest::Approx(0.1).epsilon(1e-10));

  CHECK_THROWS_AS(graph_br_distance(mp, 2, pure_mixed(2, 0), MixedAction{{0.5, 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(graph_br_distance(mp, 0, pure_mixed(3, 0), MixedAction{{0.5, 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(graph_br_distance(mp, 0, MixedAction{{0.9, 0.3}},
                                    MixedAction{{0.5, 0.5}}),
                  std::invalid_argument);
}

TEST_CASE("graph distance vanishes exactly at best replies") {
  for (const char* name : {"matching_pennies", "shapley", "fig1"}) {
    Game g = catalog_build(name);
    for (int i = 0; i < 2; ++i) {
      for (const MixedAction& y : simplex_grid(g.actions(1 - i), 6)) {
        BestReplySet br = best_replies(g, i, y);
        for (int k = 0; k < g.actions(i); ++k) {
          double d = graph_br_distance(g, i, pure_mixed(g.actions(i), k), y);
          double slack = br.max_payoff - action_payoff(g, i, k, y);
          if (slack <= 1e-12) {
            CHECK(d <= 1e-10);
          } else if (slack > 0.05) {
            CHECK(d > 1e-4);
          }
        }
      }
    }
  }
}

TEST_CASE("graph distance is bounded by any exact-reply witness") {
  Game g = catalog_build("shapley");
  std::vector<MixedAction> ys = simplex_grid(3, 8);
  for (int k = 0; k < 3; ++k) {
    MixedAction own = pure_mixed(3, k);
    for (const MixedAction& y0 : {MixedAction{{0.7, 0.2, 0.1}},
                                  MixedAction{{0.1, 0.1, 0.8}},
                                  MixedAction{{1.0 / 3, 1.0 / 3, 1.0 / 3}}}) {
      double d = graph_br_distance(g, 0, own, y0);
      for (const MixedAction& y : ys) {
        BestReplySet br = best_replies(g, 0, y);
        bool exact = std::find(br.actions.begin(), br.actions.end(), k) !=
                     br.actions.end();
        if (exact) {
          CHECK(d <= sup_distance(y0, y) + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("epsilon best replies stay near the graph") {
  // For each graph radius there is a positive payoff slack below which every
  // near-best reply is within that radius of the correspondence, realized
  // here by bisection over precomputed grid tables.
  for (const char* name : {"matching_pennies", "fig5:0.1", "shapley", "fig1"}) {
    Game g = catalog_build(name);
    for (int i = 0; i < 2; ++i) {
      std::vector<MixedAction> ys = simplex_grid(g.actions(1 - i), 8);
      std::vector<std::vector<double>> slack(ys.size()), dist(ys.size());
      for (std::size_t j = 0; j < ys.size(); ++j) {
        BestReplySet br = best_replies(g, i, ys[j]);
        for (int k = 0; k < g.actions(i); ++k) {
          slack[j].push_back(br.max_payoff - action_payoff(g, i, k, ys[j]));
          dist[j].push_back(
              graph_br_distance(g, i, pure_mixed(g.actions(i), k), ys[j]));
        }
      }
      for (double delta : {0.1, 0.05, 0.01}) {
        auto contained = [&](double eps) {
          for (std::size_t j = 0; j < ys.size(); ++j) {
            for (std::size_t k = 0; k < slack[j].size(); ++k) {
              if (slack[j][k] <= eps && dist[j][k] > delta) return false;
            }
          }
          return true;
        };
        double lo = 0.0, hi = 1.0;
        if (contained(hi)) {
          lo = hi;
        } else {
          for (int it = 0; it < 40; ++it) {
            double mid = 0.5 * (lo + hi);
            (contained(mid) ? lo : hi) = mid;
          }
        }
        CHECK(lo >= 0.01);
        CHECK(contained(lo));
      }
    }
  }
}

TEST_CASE("fictitious play perturbation levels are exactly zero") {
  Game g = catalog_build("fig1");
  RunConfig cfg;
  cfg.kind = DynamicsKind::Dfp;
  cfg.T = 300;
  cfg.seed = 11;
  Trajectory traj = run(g, cfg);
  PerturbationSeries series = payoff_perturbation_series(g, traj);
  REQUIRE(series.eps.size() == 299);
  CHECK(series.periods.front() == 2);
  CHECK(series.periods.back() == 300);
  for (double e : series.eps) CHECK(e == 0.0);
  for (double d : series.delta) CHECK(d <= 1e-12);
}

TEST_CASE("positive-regret play is perturbed by at most the max regret") {
  Game g = catalog_build("matching_pennies");
  RunConfig cfg;
  cfg.T = 100000;
  cfg.seed = 5;
  Trajectory traj = run(g, cfg);
  PerturbationSeries series = payoff_perturbation_series(g, traj);

  int checked = 0;
  for (std::size_t j = 1; j < series.eps.size(); ++j) {
    double r1 = traj.rmax[j - 1][0];
    double r2 = traj.rmax[j - 1][1];
    if (r1 > 0.0 && r2 > 0.0) {
      ++checked;
      CHECK(series.eps[j] <= std::max(r1, r2) + 1e-12);
    }
  }
  CHECK(checked > 90000);
  // Perturbation levels die out with the regrets over the last decade.
  CHECK(series.tail_max_eps(0.9) <= 0.05);
}

TEST_CASE("perturbation series needs realized actions") {
  Game g = catalog_build("matching_pennies");
  RunConfig cfg;
  cfg.kind = DynamicsKind::Expected;
  cfg.T = 50;
  Trajectory traj = run(g, cfg);
  CHECK_THROWS_AS(payoff_perturbation_series(g, traj), std::invalid_argument);

  cfg.kind = DynamicsKind::Stochastic;
  cfg.record_periods = false;
  Trajectory bare = run(g, cfg);
  CHECK_THROWS_AS(payoff_perturbation_series(g, bare), std::invalid_argument);

  PerturbationSeries empty;
  CHECK_THROWS_AS(empty.tail_max_eps(0.5), std::invalid_argument);
}

TEST_CASE("interpolated path is affine between knots and endpoint-exact") {
  // Constant sequence: constant path.
  std::vector<MixedAction> flat(5, MixedAction{{0.25, 0.75}});
  InterpolatedPath p = interpolate(flat, 1);
  for (double t : {1.0, 1.4, 2.9, 4.3, 5.0}) {
    CHECK(p.eval(t).w[0] == doctest::Approx(0.25).epsilon(1e-14));
  }

  // Two-point sequence, worked by hand from the average identity.
  InterpolatedPath two =
      interpolate({MixedAction{{1.0, 0.0}}, MixedAction{{0.5, 0.5}}}, 1);
  CHECK(two.plays[0].w[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(two.plays[0].w[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(two.eval(1.5).w[0] == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(two.eval(2.0).w[0] == doctest::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(two.eval(0.5), std::invalid_argument);
  CHECK_THROWS_AS(two.eval(2.5), std::invalid_argument);
  // A jump impossible for a running average of simplex points.
  CHECK_THROWS_AS(interpolate({MixedAction{{1.0, 0.0}}, MixedAction{{0.0, 1.0}},
                               MixedAction{{1.0, 0.0}}},
                              1),
                  std::invalid_argument);
}

TEST_CASE("interpolated path movement shrinks like one over t") {
  // Rebuild player 2's belief sequence from a recorded run, then check the
  // within-interval displacement bound on every unit interval.
  Game g = catalog_build("fig2");
  RunConfig cfg;
  cfg.kind = DynamicsKind::Dfp;
  cfg.T = 101;
  cfg.seed = 2;
  Trajectory traj = run(g, cfg);

  std::vector<MixedAction> beliefs{traj.snapshots.front().beliefs.x2};
  MixedAction avg = beliefs.front();
  for (std::size_t j = 0; j < traj.actions.size(); ++j) {
    update_average(avg, pure_mixed(g.n2, traj.actions[j][1]),
                   traj.t0 + 1 + static_cast<long>(j));
    beliefs.push_back(avg);
  }
  InterpolatedPath path = interpolate(beliefs, traj.t0);

  for (std::size_t j = 0; j + 1 < beliefs.size(); ++j) {
    double n = static_cast<double>(traj.t0 + static_cast<long>(j));
    for (double f : {0.25, 0.5, 0.75, 0.999}) {
      MixedAction x = path.eval(n + f);
      CHECK(sup_distance(x, beliefs[j]) <= 1.0 / (n + 1.0) + 1e-12);
    }
    // Knot continuity: approaching n+1 from the left meets the next knot.
    CHECK(sup_distance(path.eval(n + 1.0), beliefs[j + 1]) == 0.0);
  }
}

TEST_CASE("limit report finds a point attractor") {
  Game g = catalog_build("fig3i");
  RunConfig cfg;
  cfg.kind = DynamicsKind::Dfp;
  cfg.T = 5000;
  cfg.initial_z = pure_joint(3, 3, 0, 0);
  Trajectory traj = run(g, cfg);
  std::vector<MixedProfile> eqs{{pure_mixed(3, 0), pure_mixed(3, 0)}};
  LimitSetReport rep = limit_set_estimate(g, traj, 0.5, eqs);

  REQUIRE(rep.accumulation_points.size() == 1);
  CHECK(rep.equilibrium_distance[0] == 0.0);
  CHECK(rep.hr_distance <= 1e-9);
  CHECK(!rep.cycling);
  double sum = 0.0;
  for (double w : rep.accumulation_points[0].x1.w) {
    CHECK(w >= 0.0);
    sum += w;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("limit report centers pennies regret matching") {
  Game g = catalog_build("matching_pennies");
  RunConfig cfg;
  cfg.T = 100000;
  cfg.seed = 5;
  Trajectory traj = run(g, cfg);
  std::vector<MixedProfile> eqs = nash_support_enumeration(g);
  REQUIRE(eqs.size() == 1);
  LimitSetReport rep = limit_set_estimate(g, traj, 0.2, eqs);

  REQUIRE(rep.accumulation_points.size() == 1);
  CHECK(rep.equilibrium_distance[0] <= 0.05);
  CHECK(sup_distance(rep.accumulation_points[0], eqs[0]) <= 0.05);
  CHECK(rep.hr_distance <= 0.02);
  CHECK(!rep.cycling);
  CHECK(rep.tail_snapshots >= 20);
}

TEST_CASE("limit report flags the shapley fictitious-play cycle") {
  Game g = catalog_build("shapley");
  RunConfig cfg;
  cfg.kind = DynamicsKind::Dfp;
  cfg.T = 1000000;
  cfg.initial_z = pure_joint(3, 3, 0, 1);
  Trajectory traj = run(g, cfg);
  std::vector<MixedProfile> eqs = nash_support_enumeration(g);
  LimitSetReport rep = limit_set_estimate(g, traj, 0.5, eqs);

  CHECK(rep.cycling);
  // Log-time period of the six-segment cycle, matching the piecewise
  // integrator's per-cycle breakpoint ratio.
  CHECK(rep.period_log_time > 2.0);
  CHECK(rep.period_log_time < 2.6);
  CHECK(rep.accumulation_points.size() >= 3);
  // The cycle stays away from the mixed equilibrium but hugs the
  // zero-regret set.
  CHECK(rep.equilibrium_distance[0] >= 0.1);
  CHECK(rep.hr_distance <= 0.01);
}

TEST_CASE("shapley regret matching cycles or settles") {
  Game g = catalog_build("shapley");
  RunConfig cfg;
  cfg.T = 1000000;
  cfg.seed = 3;
  Trajectory traj = run(g, cfg);
  std::vector<MixedProfile> eqs = nash_support_enumeration(g);
  LimitSetReport rep = limit_set_estimate(g, traj, 0.5, eqs);

  CHECK((rep.cycling || rep.equilibrium_distance[0] <= 0.05));
  CHECK(rep.hr_distance <= 0.05);
}

TEST_CASE("limit report validation") {
  Game g = catalog_build("matching_pennies");
  RunConfig cfg;
  cfg.T = 200;
  Trajectory traj = run(g, cfg);
  CHECK_THROWS_AS(limit_set_estimate(g, traj, 0.0, {}), std::invalid_argument);
  CHECK_THROWS_AS(limit_set_estimate(g, traj, 1.0, {}), std::invalid_argument);
  // ~60 snapshots reach T = 200, so a thin tail has fewer than 20.
  CHECK_THROWS_AS(limit_set_estimate(g, traj, 0.05, {}), std::invalid_argument);
  CHECK_THROWS_AS(limit_set_estimate(g, traj, 0.5, {}, 0.0), std::invalid_argument);
}
