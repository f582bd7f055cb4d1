#pragma once

#include <vector>

#include "regretlab/discrete.hpp"
#include "regretlab/game.hpp"

namespace regretlab {

// Per-period perturbation levels of a realized-play trajectory. eps[j] is the
// payoff shortfall of the period-t action against the prior average,
//   max_i [ max_k u_i(k, z_{-i}(t-1)) - u_i(a_i(t), z_{-i}(t-1)) ]+,
// and delta[j] is the graph analog: the smallest radius by which the pair
// (realized action, prior opponent average) misses the best-reply graph.
// Both are zero exactly when the action was an exact best reply.
struct PerturbationSeries {
  long t0 = 1;
  std::vector<long> periods;  // t0+1 .. T
  std::vector<double> eps;
  std::vector<double> delta;

  double tail_max_eps(double fraction) const;
};

// Requires per-period realized actions (stochastic or fictitious-play runs
// with record_periods); throws on expected-play trajectories.
PerturbationSeries payoff_perturbation_series(const Game& g, const Trajectory& traj);

// Smallest d such that some (b, y) with b a best reply to y lies within
// sup-norm d of (x_i, x_opp), in each player's own simplex. Exact: for every
// candidate tie set the feasible opponent region is a polytope and both
// coordinate distances are linear programs.
double graph_br_distance(const Game& g, int player, const MixedAction& x_i,
                         const MixedAction& x_opp);

// Continuous path through a per-period belief sequence x(t0), x(t0+1), ...:
// on [n, n+1), t * x(t) = n * x(n) + (t - n) * q(n), with the period play
// q(n) = (n+1) x(n+1) - n x(n) recovered from consecutive averages. The path
// is continuous and endpoint-exact at every knot.
struct InterpolatedPath {
  long t0 = 1;
  std::vector<MixedAction> knots;  // x(n) for n = t0 .. t0 + size - 1
  std::vector<MixedAction> plays;  // q(n) for n = t0 .. t0 + size - 2

  MixedAction eval(double t) const;
  long t_end() const { return t0 + static_cast<long>(knots.size()) - 1; }
};

InterpolatedPath interpolate(const std::vector<MixedAction>& beliefs, long t0 = 1);

// Empirical description of where the tail of a run's beliefs accumulates.
struct LimitSetReport {
  std::vector<MixedProfile> accumulation_points;  // cluster means
  std::vector<int> cluster_sizes;
  std::vector<double> equilibrium_distance;  // min over tail, per equilibrium
  double hr_distance = 0.0;  // max over tail, joint average to the zero-regret face
  bool cycling = false;           // log-time first returns nearly periodic
  double period_log_time = 0.0;   // mean log-time return when cycling
  int returns_used = 0;
  double tail_fraction = 0.0;
  int tail_snapshots = 0;
  double cluster_radius = 0.0;
};

// Clusters the last tail_fraction of the trajectory's snapshots (sup-norm
// agglomerative at cluster_radius), measures distances to the supplied
// equilibria and to the zero-max-regret face, and flags near-periodic
// recurrence. The cycle flag is a reporting heuristic: returns are counted in
// log time, where fictitious-play-style cycles have constant period. Needs at
// least 20 tail snapshots.
LimitSetReport limit_set_estimate(const Game& g, const Trajectory& traj,
                                  double tail_fraction,
                                  const std::vector<MixedProfile>& equilibria,
                                  double cluster_radius = 0.02);

}  // namespace regretlab
