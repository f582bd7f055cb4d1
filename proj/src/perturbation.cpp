#include "regretlab/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "regretlab/lp.hpp"

namespace regretlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Coefficient row c with R_{player,k}(z) = sum_cells c * z.
std::vector<double> regret_row(const Game& g, int player, int k) {
  std::vector<double> c(static_cast<std::size_t>(g.n1) * g.n2);
  for (int a = 0; a < g.n1; ++a) {
    for (int b = 0; b < g.n2; ++b) {
      c[a * g.n2 + b] = player == 0 ? g.pay1(k, b) - g.pay1(a, b)
                                    : g.pay2(a, k) - g.pay2(a, b);
    }
  }
  return c;
}

// Sup-norm distance from y0 to the opponent-belief region where every action
// in S is a best reply (all of S tied, at least as good as everything else);
// +inf when the region is empty.
double region_distance(const Game& g, int player, const std::vector<int>& S,
                       const MixedAction& y0) {
  const int m = y0.size();
  LpProblem lp(m + 1);  // y, then d
  lp.c[m] = 1.0;
  for (double& b : lp.lo) b = 0.0;

  std::vector<double> ones(lp.n, 0.0);
  for (int b = 0; b < m; ++b) ones[b] = 1.0;
  lp.add_eq(ones, 1.0);

  auto pay_row = [&](int k) {
    std::vector<double> r(lp.n, 0.0);
    for (int b = 0; b < m; ++b) r[b] = action_payoff(g, player, k, pure_mixed(m, b));
    return r;
  };
  std::vector<double> ref = pay_row(S.front());
  for (std::size_t j = 1; j < S.size(); ++j) {
    std::vector<double> row = pay_row(S[j]);
    for (int b = 0; b < m; ++b) row[b] -= ref[b];
    lp.add_eq(row, 0.0);
  }
  for (int k = 0; k < g.actions(player); ++k) {
    if (std::find(S.begin(), S.end(), k) != S.end()) continue;
    std::vector<double> row = pay_row(k);
    for (int b = 0; b < m; ++b) row[b] -= ref[b];
    lp.add_ub(row, 0.0);
  }
  for (int b = 0; b < m; ++b) {
    std::vector<double> up(lp.n, 0.0), down(lp.n, 0.0);
    up[b] = 1.0;
    up[m] = -1.0;
    lp.add_ub(up, y0[b]);
    down[b] = -1.0;
    down[m] = -1.0;
    lp.add_ub(down, -y0[b]);
  }
  LpSolution sol = lp_solve(lp);
  if (sol.status != LpStatus::Optimal) return kInf;
  return std::max(0.0, sol.objective);
}

// Sup-norm distance from x to the face of the simplex supported on S.
double face_distance(const MixedAction& x, const std::vector<int>& S) {
  const int n = x.size();
  std::vector<bool> in(n, false);
  for (int k : S) in[k] = true;
  LpProblem lp(n + 1);  // b, then d
  lp.c[n] = 1.0;
  for (double& b : lp.lo) b = 0.0;
  std::vector<double> ones(lp.n, 0.0);
  for (int k = 0; k < n; ++k) {
    if (in[k]) {
      ones[k] = 1.0;
    } else {
      lp.hi[k] = 0.0;
    }
  }
  lp.add_eq(ones, 1.0);
  for (int k = 0; k < n; ++k) {
    std::vector<double> up(lp.n, 0.0), down(lp.n, 0.0);
    up[k] = 1.0;
    up[n] = -1.0;
    lp.add_ub(up, x[k]);
    down[k] = -1.0;
    down[n] = -1.0;
    lp.add_ub(down, -x[k]);
  }
  LpSolution sol = lp_solve(lp);
  return std::max(0.0, sol.objective);
}

}  // namespace

double graph_br_distance(const Game& g, int player, const MixedAction& x_i,
                         const MixedAction& x_opp) {
  if (player != 0 && player != 1) throw std::invalid_argument("player must be 0 or 1");
  validate_mixed(x_i, 1e-9);
  validate_mixed(x_opp, 1e-9);
  const int n = g.actions(player);
  if (x_i.size() != n || x_opp.size() != g.actions(1 - player)) {
    throw std::invalid_argument("action dimensions do not match the game");
  }
  double best = kInf;
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> S;
    for (int k = 0; k < n; ++k) {
      if (mask & (1 << k)) S.push_back(k);
    }
    double dx = face_distance(x_i, S);
    if (dx >= best) continue;
    double dy = region_distance(g, player, S, x_opp);
    best = std::min(best, std::max(dx, dy));
  }
  return best;
}

double PerturbationSeries::tail_max_eps(double fraction) const {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("fraction must be in (0, 1]");
  }
  if (eps.empty()) throw std::invalid_argument("empty series");
  std::size_t count = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(eps.size())));
  double m = 0.0;
  for (std::size_t j = eps.size() - count; j < eps.size(); ++j) {
    m = std::max(m, eps[j]);
  }
  return m;
}

PerturbationSeries payoff_perturbation_series(const Game& g, const Trajectory& traj) {
  if (traj.actions.empty()) {
    throw std::invalid_argument("trajectory has no per-period records");
  }
  if (traj.kind == DynamicsKind::Expected) {
    throw std::invalid_argument("expected play has no realized actions");
  }
  if (traj.snapshots.empty() || traj.snapshots.front().t != traj.t0) {
    throw std::invalid_argument("trajectory is missing its initial state");
  }

  PerturbationSeries out;
  out.t0 = traj.t0;
  const std::size_t steps = traj.actions.size();
  out.periods.reserve(steps);
  out.eps.reserve(steps);
  out.delta.reserve(steps);

  JointDistribution z = traj.snapshots.front().z;
  for (std::size_t j = 0; j < steps; ++j) {
    const long t = traj.t0 + 1 + static_cast<long>(j);
    MixedProfile y = marginals(z);
    double eps = 0.0, delta = 0.0;
    for (int i = 0; i < 2; ++i) {
      const int a = traj.actions[j][i];
      if (a < 0) throw std::invalid_argument("missing realized action");
      const MixedAction& opp = y.of(1 - i);
      double top = -kInf;
      for (int k = 0; k < g.actions(i); ++k) {
        top = std::max(top, action_payoff(g, i, k, opp));
      }
      eps = std::max(eps, top - action_payoff(g, i, a, opp));
      // For a pure point the cheapest tie set containing it is the singleton,
      // whose region is largest; tie sets without it cost a full unit in the
      // own-action coordinate.
      delta = std::max(delta, std::min(region_distance(g, i, {a}, opp), 1.0));
    }
    out.periods.push_back(t);
    out.eps.push_back(std::max(0.0, eps));
    out.delta.push_back(delta);
    update_average(z, pure_joint(g.n1, g.n2, traj.actions[j][0], traj.actions[j][1]), t);
  }
  return out;
}

MixedAction InterpolatedPath::eval(double t) const {
  const double lo = static_cast<double>(t0);
  const double hi = static_cast<double>(t_end());
  if (!(t >= lo && t <= hi)) {
    throw std::invalid_argument("time outside the interpolated range");
  }
  double ip;
  double frac = std::modf(t, &ip);
  std::size_t idx = static_cast<std::size_t>(ip - lo);
  if (frac == 0.0) return knots[idx];
  const MixedAction& x = knots[idx];
  const MixedAction& q = plays[idx];
  double n = ip;
  MixedAction out;
  out.w.resize(x.size());
  for (int k = 0; k < x.size(); ++k) {
    out.w[k] = (n * x[k] + (t - n) * q[k]) / t;
  }
  return out;
}

InterpolatedPath interpolate(const std::vector<MixedAction>& beliefs, long t0) {
  if (beliefs.empty()) throw std::invalid_argument("empty belief sequence");
  if (t0 < 1) throw std::invalid_argument("start period must be >= 1");
  for (const MixedAction& x : beliefs) {
    validate_mixed(x, 1e-9);
    if (x.size() != beliefs.front().size()) {
      throw std::invalid_argument("belief dimensions differ");
    }
  }
  InterpolatedPath path;
  path.t0 = t0;
  path.knots = beliefs;
  path.plays.reserve(beliefs.size() - 1);
  for (std::size_t j = 0; j + 1 < beliefs.size(); ++j) {
    const double n = static_cast<double>(t0 + static_cast<long>(j));
    MixedAction q;
    q.w.resize(beliefs[j].size());
    for (int k = 0; k < beliefs[j].size(); ++k) {
      double v = (n + 1.0) * beliefs[j + 1][k] - n * beliefs[j][k];
      if (v < -1e-9) {
        throw std::invalid_argument("sequence is not a running average");
      }
      q.w[k] = std::max(0.0, v);
    }
    path.plays.push_back(std::move(q));
  }
  return path;
}

namespace {

// Sup-norm distance from z to the polytope where all regrets are <= 0 and
// each player's max regret is exactly 0, decomposed over the choice of the
// action attaining the zero.
double hr_face_distance(const Game& g, const JointDistribution& z) {
  const int cells = g.n1 * g.n2;
  double best = kInf;
  for (int k = 0; k < g.n1; ++k) {
    for (int j = 0; j < g.n2; ++j) {
      LpProblem lp(cells + 1);  // y, then d
      lp.c[cells] = 1.0;
      for (double& b : lp.lo) b = 0.0;
      std::vector<double> ones(lp.n, 0.0);
      for (int i = 0; i < cells; ++i) ones[i] = 1.0;
      lp.add_eq(ones, 1.0);
      for (int i = 0; i < 2; ++i) {
        for (int a = 0; a < g.actions(i); ++a) {
          std::vector<double> row = regret_row(g, i, a);
          row.resize(lp.n, 0.0);
          if ((i == 0 && a == k) || (i == 1 && a == j)) {
            lp.add_eq(row, 0.0);
          } else {
            lp.add_ub(row, 0.0);
          }
        }
      }
      for (int i = 0; i < cells; ++i) {
        std::vector<double> up(lp.n, 0.0), down(lp.n, 0.0);
        up[i] = 1.0;
        up[cells] = -1.0;
        lp.add_ub(up, z.w[i]);
        down[i] = -1.0;
        down[cells] = -1.0;
        lp.add_ub(down, -z.w[i]);
      }
      LpSolution sol = lp_solve(lp);
      if (sol.status == LpStatus::Optimal) {
        best = std::min(best, std::max(0.0, sol.objective));
      }
    }
  }
  return best;
}

}  // namespace

LimitSetReport limit_set_estimate(const Game& g, const Trajectory& traj,
                                  double tail_fraction,
                                  const std::vector<MixedProfile>& equilibria,
                                  double cluster_radius) {
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) {
    throw std::invalid_argument("tail fraction must be in (0, 1)");
  }
  if (!(cluster_radius > 0.0)) {
    throw std::invalid_argument("cluster radius must be positive");
  }
  const std::size_t total = traj.snapshots.size();
  const std::size_t m = static_cast<std::size_t>(
      std::ceil(tail_fraction * static_cast<double>(total)));
  if (m < 20) {
    throw std::invalid_argument("tail too short: need at least 20 snapshots");
  }
  const std::size_t first = total - m;

  std::vector<const SimState*> tail;
  tail.reserve(m);
  for (std::size_t i = first; i < total; ++i) tail.push_back(&traj.snapshots[i]);

  LimitSetReport rep;
  rep.tail_fraction = tail_fraction;
  rep.tail_snapshots = static_cast<int>(m);
  rep.cluster_radius = cluster_radius;

  // Single-link agglomerative clustering of the tail beliefs.
  std::vector<std::vector<std::size_t>> clusters(m);
  for (std::size_t i = 0; i < m; ++i) clusters[i] = {i};
  auto link = [&](const std::vector<std::size_t>& a,
                  const std::vector<std::size_t>& b) {
    double d = kInf;
    for (std::size_t i : a) {
      for (std::size_t j : b) {
        d = std::min(d, sup_distance(tail[i]->beliefs, tail[j]->beliefs));
      }
    }
    return d;
  };
  for (;;) {
    double dmin = kInf;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double d = link(clusters[i], clusters[j]);
        if (d < dmin) {
          dmin = d;
          bi = i;
          bj = j;
        }
      }
    }
    if (clusters.size() <= 1 || dmin > cluster_radius) break;
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return a.size() > b.size(); });
  for (const auto& members : clusters) {
    MixedProfile mean{MixedAction{std::vector<double>(g.n1, 0.0)},
                      MixedAction{std::vector<double>(g.n2, 0.0)}};
    for (std::size_t i : members) {
      for (int k = 0; k < g.n1; ++k) mean.x1.w[k] += tail[i]->beliefs.x1[k];
      for (int k = 0; k < g.n2; ++k) mean.x2.w[k] += tail[i]->beliefs.x2[k];
    }
    const double inv = 1.0 / static_cast<double>(members.size());
    for (double& v : mean.x1.w) v *= inv;
    for (double& v : mean.x2.w) v *= inv;
    rep.accumulation_points.push_back(std::move(mean));
    rep.cluster_sizes.push_back(static_cast<int>(members.size()));
  }

  for (const MixedProfile& eq : equilibria) {
    double d = kInf;
    for (const SimState* s : tail) d = std::min(d, sup_distance(s->beliefs, eq));
    rep.equilibrium_distance.push_back(d);
  }

  for (const SimState* s : tail) {
    rep.hr_distance = std::max(rep.hr_distance, hr_face_distance(g, s->z));
  }

  // First returns in log time: leave the cluster_radius ball, then come back.
  std::vector<double> returns;
  for (std::size_t i = 0; i < m; ++i) {
    bool left = false;
    for (std::size_t j = i + 1; j < m; ++j) {
      double d = sup_distance(tail[i]->beliefs, tail[j]->beliefs);
      if (!left) {
        if (d > cluster_radius) left = true;
      } else if (d <= cluster_radius) {
        returns.push_back(std::log(static_cast<double>(tail[j]->t)) -
                          std::log(static_cast<double>(tail[i]->t)));
        break;
      }
    }
  }
  rep.returns_used = static_cast<int>(returns.size());
  if (returns.size() >= 5) {
    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= static_cast<double>(returns.size());
    double var = 0.0;
    for (double r : returns) var += (r - mean) * (r - mean);
    var /= static_cast<double>(returns.size());
    double cv = mean > 0.0 ? std::sqrt(var) / mean : kInf;
    if (cv < 0.2) {
      rep.cycling = true;
      rep.period_log_time = mean;
    }
  }
  return rep;
}

}  // namespace regretlab
