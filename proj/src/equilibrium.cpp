#include "regretlab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "regretlab/discrete.hpp"
#include "regretlab/lp.hpp"
#include "regretlab/rng.hpp"

namespace regretlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> mask_to_set(unsigned mask, int n) {
  std::vector<int> out;
  for (int k = 0; k < n; ++k)
    if (mask & (1u << k)) out.push_back(k);
  return out;
}

// u_i(k, opponent action j) with j running over the opponent's actions.
double cross_payoff(const Game& g, int player, int k, int j) {
  return player == 0 ? g.pay1(k, j) : g.pay2(j, k);
}

}  // namespace

std::vector<MixedProfile> nash_support_enumeration(const Game& g, double tol) {
  if (g.n1 > 12 || g.n2 > 12)
    throw std::invalid_argument("support enumeration limited to 12 actions");

  std::vector<MixedProfile> found;
  auto already_have = [&](const MixedProfile& p) {
    for (const MixedProfile& q : found)
      if (sup_distance(p.x1, q.x1) < 1e-8 && sup_distance(p.x2, q.x2) < 1e-8)
        return true;
    return false;
  };

  // The mixture of the player opposite `player` that keeps `support` exactly
  // indifferent and everything else weakly worse.
  auto solve_side = [&](int player, const std::vector<int>& support,
                        const std::vector<int>& opp_support,
                        std::vector<double>& out) {
    const int nopp = g.actions(1 - player);
    const int nv = static_cast<int>(opp_support.size()) + 1;  // mixture + v
    LpProblem lp(nv);
    const int vcol = nv - 1;
    {
      std::vector<double> row(nv, 0.0);
      for (int j = 0; j + 1 < nv; ++j) row[j] = 1.0;
      lp.add_eq(std::move(row), 1.0);
    }
    for (int s = 0; s < g.actions(player); ++s) {
      std::vector<double> row(nv, 0.0);
      for (size_t j = 0; j < opp_support.size(); ++j)
        row[j] = cross_payoff(g, player, s, opp_support[j]);
      row[vcol] = -1.0;
      if (std::find(support.begin(), support.end(), s) != support.end())
        lp.add_eq(std::move(row), 0.0);
      else
        lp.add_ub(std::move(row), 0.0);
    }
    for (int j = 0; j + 1 < nv; ++j) lp.lo[j] = 0.0;
    LpSolution s = lp_solve(lp);
    if (s.status != LpStatus::Optimal) return false;
    out.assign(nopp, 0.0);
    for (size_t j = 0; j < opp_support.size(); ++j)
      out[opp_support[j]] = std::max(0.0, s.x[j]);
    double total = 0.0;
    for (double w : out) total += w;
    for (double& w : out) w /= total;
    return true;
  };

  for (unsigned m1 = 1; m1 < (1u << g.n1); ++m1) {
    std::vector<int> s1 = mask_to_set(m1, g.n1);
    for (unsigned m2 = 1; m2 < (1u << g.n2); ++m2) {
      std::vector<int> s2 = mask_to_set(m2, g.n2);
      MixedProfile p{MixedAction{}, MixedAction{}};
      if (!solve_side(0, s1, s2, p.x2.w)) continue;
      if (!solve_side(1, s2, s1, p.x1.w)) continue;
      const double r1 = regret_vector(g, 0, product_distribution(p)).max();
      const double r2 = regret_vector(g, 1, product_distribution(p)).max();
      if (r1 > tol || r2 > tol) continue;
      if (!already_have(p)) found.push_back(std::move(p));
    }
  }
  return found;
}

namespace {

// Does some mixture over `others` strictly beat action k against every
// surviving opponent action?  Margin above tol counts as dominance.
bool mixed_dominates(const Game& g, int player, int k,
                     const std::vector<int>& others,
                     const std::vector<int>& opp) {
  const int nv = static_cast<int>(others.size()) + 1;  // weights + margin
  LpProblem lp(nv);
  const int mcol = nv - 1;
  lp.c[mcol] = -1.0;
  {
    std::vector<double> row(nv, 0.0);
    for (int j = 0; j + 1 < nv; ++j) row[j] = 1.0;
    lp.add_eq(std::move(row), 1.0);
  }
  for (int b : opp) {
    std::vector<double> row(nv, 0.0);
    for (size_t j = 0; j < others.size(); ++j)
      row[j] = -cross_payoff(g, player, others[j], b);
    row[mcol] = 1.0;
    lp.add_ub(std::move(row), -cross_payoff(g, player, k, b));
  }
  for (int j = 0; j + 1 < nv; ++j) lp.lo[j] = 0.0;
  LpSolution s = lp_solve(lp);
  return s.status == LpStatus::Optimal && -s.objective > 1e-9;
}

}  // namespace

ReducedGame strict_dominance_eliminate(const Game& g, bool allow_mixed,
                                       bool reverse_scan) {
  std::array<std::vector<int>, 2> kept;
  for (int i = 0; i < 2; ++i) {
    kept[i].resize(g.actions(i));
    for (int k = 0; k < g.actions(i); ++k) kept[i][k] = k;
  }
  std::vector<EliminationStep> order;

  bool changed = true;
  while (changed) {
    changed = false;
    for (int scan = 0; scan < 2 && !changed; ++scan) {
      const int i = reverse_scan ? 1 - scan : scan;
      if (kept[i].size() <= 1) continue;
      const std::vector<int>& opp = kept[1 - i];
      for (size_t kp = 0; kp < kept[i].size() && !changed; ++kp) {
        const size_t pos = reverse_scan ? kept[i].size() - 1 - kp : kp;
        const int k = kept[i][pos];
        bool dominated = false;
        for (int j : kept[i]) {
          if (j == k) continue;
          bool all = true;
          for (int b : opp)
            if (cross_payoff(g, i, j, b) <= cross_payoff(g, i, k, b)) {
              all = false;
              break;
            }
          if (all) {
            dominated = true;
            break;
          }
        }
        if (!dominated && allow_mixed && kept[i].size() >= 3) {
          std::vector<int> others;
          for (int j : kept[i])
            if (j != k) others.push_back(j);
          dominated = mixed_dominates(g, i, k, others, opp);
        }
        if (dominated) {
          order.push_back({i, k});
          kept[i].erase(kept[i].begin() + pos);
          changed = true;
        }
      }
    }
  }

  const int rn1 = static_cast<int>(kept[0].size());
  const int rn2 = static_cast<int>(kept[1].size());
  std::vector<double> u1(rn1 * rn2), u2(rn1 * rn2);
  std::vector<std::string> l1, l2;
  for (int a = 0; a < rn1; ++a)
    for (int b = 0; b < rn2; ++b) {
      u1[a * rn2 + b] = g.pay1(kept[0][a], kept[1][b]);
      u2[a * rn2 + b] = g.pay2(kept[0][a], kept[1][b]);
    }
  for (int a : kept[0]) l1.push_back(g.label(0, a));
  for (int b : kept[1]) l2.push_back(g.label(1, b));
  return ReducedGame{make_game(rn1, rn2, std::move(u1), std::move(u2),
                               std::move(l1), std::move(l2)),
                     kept, std::move(order)};
}

bool ProductSet::contains(int a, int b) const {
  return std::binary_search(sets[0].begin(), sets[0].end(), a) &&
         std::binary_search(sets[1].begin(), sets[1].end(), b);
}

bool ProductSet::full(const Game& g) const {
  return static_cast<int>(sets[0].size()) == g.n1 &&
         static_cast<int>(sets[1].size()) == g.n2;
}

ProductSet full_product(const Game& g) {
  ProductSet b;
  for (int i = 0; i < 2; ++i) {
    b.sets[i].resize(g.actions(i));
    for (int k = 0; k < g.actions(i); ++k) b.sets[i][k] = k;
  }
  return b;
}

namespace {

void check_product(const Game& g, const ProductSet& B) {
  for (int i = 0; i < 2; ++i) {
    if (B.sets[i].empty())
      throw std::invalid_argument("product set side is empty");
    if (!std::is_sorted(B.sets[i].begin(), B.sets[i].end()))
      throw std::invalid_argument("product set must be sorted");
    for (int k : B.sets[i])
      if (k < 0 || k >= g.actions(i))
        throw std::invalid_argument("product set action out of range");
  }
}

// Largest m with u_i(k, x) >= u_i(s, x) + m for all s and some belief x
// supported on the opponent side of B; k is a weak best reply there iff the
// value is >= 0 (own action forces it <= 0).
double best_reply_slack(const Game& g, const ProductSet& B, int player,
                        int k) {
  const std::vector<int>& opp = B.sets[1 - player];
  const int nv = static_cast<int>(opp.size()) + 1;
  LpProblem lp(nv);
  const int mcol = nv - 1;
  lp.c[mcol] = -1.0;
  {
    std::vector<double> row(nv, 0.0);
    for (int j = 0; j + 1 < nv; ++j) row[j] = 1.0;
    lp.add_eq(std::move(row), 1.0);
  }
  for (int s = 0; s < g.actions(player); ++s) {
    if (s == k) continue;
    std::vector<double> row(nv, 0.0);
    for (size_t j = 0; j < opp.size(); ++j)
      row[j] =
          cross_payoff(g, player, s, opp[j]) - cross_payoff(g, player, k, opp[j]);
    row[mcol] = 1.0;
    lp.add_ub(std::move(row), 0.0);
  }
  for (int j = 0; j + 1 < nv; ++j) lp.lo[j] = 0.0;
  LpSolution s = lp_solve(lp);
  if (s.status != LpStatus::Optimal)
    throw std::runtime_error("best-reply slack lp failed");
  return -s.objective;
}

}  // namespace

bool is_curb(const Game& g, const ProductSet& B, double tol) {
  check_product(g, B);
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < g.actions(i); ++k) {
      if (std::binary_search(B.sets[i].begin(), B.sets[i].end(), k)) continue;
      if (best_reply_slack(g, B, i, k) >= -tol) return false;
    }
  }
  return true;
}

std::vector<ProductSet> curb_enumerate(const Game& g, double tol) {
  if (g.n1 > 8 || g.n2 > 8)
    throw std::invalid_argument("curb enumeration limited to 8 actions");
  std::vector<ProductSet> out;
  for (unsigned m1 = 1; m1 < (1u << g.n1); ++m1)
    for (unsigned m2 = 1; m2 < (1u << g.n2); ++m2) {
      ProductSet b{{mask_to_set(m1, g.n1), mask_to_set(m2, g.n2)}};
      if (is_curb(g, b, tol)) out.push_back(std::move(b));
    }
  return out;
}

double delta_B(const Game& g, const ProductSet& B) {
  check_product(g, B);
  double best = kInf;
  for (int i = 0; i < 2; ++i) {
    std::vector<int> outside;
    for (int k = 0; k < g.actions(i); ++k)
      if (!std::binary_search(B.sets[i].begin(), B.sets[i].end(), k))
        outside.push_back(k);
    const std::vector<int>& opp = B.sets[1 - i];
    // Split by which outside action attains the outside maximum, so the
    // objective max_s u(s,x) - max_k u(k,x) becomes linear on each region.
    for (int k : outside) {
      const int nv = static_cast<int>(opp.size()) + 1;  // belief + t
      LpProblem lp(nv);
      const int tcol = nv - 1;
      lp.c[tcol] = 1.0;
      for (size_t j = 0; j < opp.size(); ++j)
        lp.c[j] = -cross_payoff(g, i, k, opp[j]);
      {
        std::vector<double> row(nv, 0.0);
        for (int j = 0; j + 1 < nv; ++j) row[j] = 1.0;
        lp.add_eq(std::move(row), 1.0);
      }
      for (int s = 0; s < g.actions(i); ++s) {
        std::vector<double> row(nv, 0.0);
        for (size_t j = 0; j < opp.size(); ++j)
          row[j] = cross_payoff(g, i, s, opp[j]);
        row[tcol] = -1.0;
        lp.add_ub(std::move(row), 0.0);
      }
      for (int o : outside) {
        if (o == k) continue;
        std::vector<double> row(nv, 0.0);
        for (size_t j = 0; j < opp.size(); ++j)
          row[j] =
              cross_payoff(g, i, o, opp[j]) - cross_payoff(g, i, k, opp[j]);
        lp.add_ub(std::move(row), 0.0);
      }
      for (int j = 0; j + 1 < nv; ++j) lp.lo[j] = 0.0;
      LpSolution s = lp_solve(lp);
      if (s.status == LpStatus::Optimal) best = std::min(best, s.objective);
    }
  }
  return best;
}

double rho_of_gamma(const PotentialSpec& spec, double gamma, int dim,
                    double u_bound) {
  if (gamma < 0.0) throw std::invalid_argument("rho needs gamma >= 0");
  if (spec.kind == PotentialSpec::Kind::LpNorm) return gamma;
  if (dim < 1 || dim > 6)
    throw std::invalid_argument("rho grid search limited to 6 dimensions");
  // Upper bound by grid search over regret vectors in [-2U, 2U]^dim.
  const int per_axis = std::max(
      9, static_cast<int>(std::pow(2.0e6, 1.0 / dim)) | 1);  // odd, >= 9
  const double lo = -2.0 * u_bound, hi = 2.0 * u_bound;
  const double step = (hi - lo) / (per_axis - 1);
  std::vector<int> idx(dim, 0);
  std::vector<double> r(dim);
  double best = 0.0;
  while (true) {
    double rmax = -kInf;
    for (int d = 0; d < dim; ++d) {
      r[d] = lo + step * idx[d];
      rmax = std::max(rmax, r[d]);
    }
    if (potential_value(spec, r) <= gamma) best = std::max(best, rmax);
    int d = 0;
    while (d < dim && ++idx[d] == per_axis) idx[d++] = 0;
    if (d == dim) break;
  }
  return best;
}

double gamma_B(const Game& g, const ProductSet& B, const PotentialSpec& spec) {
  const double delta = delta_B(g, B);
  if (!std::isfinite(delta))
    throw std::invalid_argument("gamma_B needs a finite payoff advantage");
  const double ubar = g.payoff_bound;
  const int dim = std::max(g.n1, g.n2);
  auto f = [&](double x) {
    return (2.0 * ubar + delta) * x + rho_of_gamma(spec, x, dim, ubar) - delta;
  };
  double lo = 0.0, hi = delta;
  for (int k = 0; k < 60 && f(hi) < 0.0; ++k) hi *= 2.0;
  for (int k = 0; k < 200 && hi - lo > 1e-12; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool in_U_gamma(const Game& g, const ProductSet& B,
                const std::array<PotentialSpec, 2>& specs,
                const JointDistribution& z, double gamma) {
  check_product(g, B);
  if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
  double outside = 0.0;
  for (int a = 0; a < g.n1; ++a)
    for (int b = 0; b < g.n2; ++b)
      if (!B.contains(a, b)) outside += z.at(a, b);
  if (outside >= gamma) return false;
  for (int i = 0; i < 2; ++i) {
    RegretVector r = regret_vector(g, i, z);
    if (potential_value(specs[i], r.v) >= gamma) return false;
  }
  return true;
}

namespace {

// Regret coefficient of cell (a, b) in R_{player,k}: the payoff swing from
// replacing own realized action by k while the opponent keeps theirs.
double regret_coef(const Game& g, int player, int k, int a, int b) {
  return player == 0 ? g.pay1(k, b) - g.pay1(a, b)
                     : g.pay2(a, k) - g.pay2(a, b);
}

}  // namespace

HbPoint hb_point(const Game& g, const ProductSet& B) {
  check_product(g, B);
  std::vector<std::pair<int, int>> cells;
  for (int a : B.sets[0])
    for (int b : B.sets[1]) cells.push_back({a, b});
  const int nc = static_cast<int>(cells.size());
  LpProblem lp(nc + 1);  // cell weights + eps
  const int ecol = nc;
  lp.c[ecol] = -1.0;  // maximize eps
  {
    std::vector<double> row(nc + 1, 0.0);
    for (int j = 0; j < nc; ++j) row[j] = 1.0;
    lp.add_eq(std::move(row), 1.0);
  }
  // The slack pushes regrets of actions outside B strictly negative; inside
  // actions (own support included) only need the plain Hannan inequality.
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < g.actions(i); ++k) {
      std::vector<double> row(nc + 1, 0.0);
      for (int j = 0; j < nc; ++j)
        row[j] = regret_coef(g, i, k, cells[j].first, cells[j].second);
      if (!std::binary_search(B.sets[i].begin(), B.sets[i].end(), k))
        row[ecol] = 1.0;
      lp.add_ub(std::move(row), 0.0);
    }
  for (int j = 0; j < nc; ++j) lp.lo[j] = 0.0;
  lp.hi[ecol] = 2.0 * g.payoff_bound;  // keeps the objective bounded for full B
  LpSolution s = lp_solve(lp);
  if (s.status != LpStatus::Optimal)
    throw std::runtime_error("interior point lp failed");
  HbPoint out{JointDistribution{g.n1, g.n2,
                                std::vector<double>(g.n1 * g.n2, 0.0)},
              s.x[ecol]};
  double total = 0.0;
  for (int j = 0; j < nc; ++j) total += std::max(0.0, s.x[j]);
  for (int j = 0; j < nc; ++j)
    out.z.w[cells[j].first * g.n2 + cells[j].second] =
        std::max(0.0, s.x[j]) / total;
  return out;
}

double distance_to_hb(const Game& g, const ProductSet& B,
                      const JointDistribution& z) {
  check_product(g, B);
  std::vector<std::pair<int, int>> cells;
  for (int a : B.sets[0])
    for (int b : B.sets[1]) cells.push_back({a, b});
  const int nc = static_cast<int>(cells.size());
  LpProblem lp(nc + 1);  // candidate weights + distance
  const int dcol = nc;
  lp.c[dcol] = 1.0;
  {
    std::vector<double> row(nc + 1, 0.0);
    for (int j = 0; j < nc; ++j) row[j] = 1.0;
    lp.add_eq(std::move(row), 1.0);
  }
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < g.actions(i); ++k) {
      std::vector<double> row(nc + 1, 0.0);
      for (int j = 0; j < nc; ++j)
        row[j] = regret_coef(g, i, k, cells[j].first, cells[j].second);
      lp.add_ub(std::move(row), 0.0);
    }
  for (int j = 0; j < nc; ++j) {
    const double zj = z.at(cells[j].first, cells[j].second);
    std::vector<double> up(nc + 1, 0.0), down(nc + 1, 0.0);
    up[j] = 1.0;
    up[dcol] = -1.0;
    down[j] = -1.0;
    down[dcol] = -1.0;
    lp.add_ub(std::move(up), zj);
    lp.add_ub(std::move(down), -zj);
  }
  double floor = 0.0;  // cells outside B keep weight zero in the candidate
  for (int a = 0; a < g.n1; ++a)
    for (int b = 0; b < g.n2; ++b)
      if (!B.contains(a, b)) floor = std::max(floor, z.at(a, b));
  for (int j = 0; j < nc; ++j) lp.lo[j] = 0.0;
  lp.lo[dcol] = floor;
  LpSolution s = lp_solve(lp);
  if (s.status != LpStatus::Optimal)
    throw std::runtime_error("distance lp infeasible: the target set is empty");
  return s.objective;
}

double AttractionStats::quantile(double q) const {
  if (terminal_distances.empty())
    return std::numeric_limits<double>::quiet_NaN();
  if (q <= 0.0) return terminal_distances.front();
  if (q >= 1.0) return terminal_distances.back();
  const double pos = q * (terminal_distances.size() - 1);
  const size_t k = static_cast<size_t>(pos);
  const double frac = pos - k;
  if (k + 1 >= terminal_distances.size()) return terminal_distances.back();
  return terminal_distances[k] * (1.0 - frac) +
         terminal_distances[k + 1] * frac;
}

AttractionStats curb_attraction_experiment(
    const Game& g, const ProductSet& B,
    const std::array<PotentialSpec, 2>& specs, const AttractionConfig& cfg) {
  if (!is_curb(g, B)) throw std::invalid_argument("set is not curb");
  if (cfg.gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
  if (cfg.t0 < 1 || cfg.T <= cfg.t0 || cfg.runs < 1)
    throw std::invalid_argument("bad experiment horizon");

  // gamma must stay below the attraction radius with the combined rho.
  {
    const double delta = delta_B(g, B);
    if (std::isfinite(delta)) {
      const double ubar = g.payoff_bound;
      const int dim = std::max(g.n1, g.n2);
      auto f = [&](double x) {
        const double rho = std::max(rho_of_gamma(specs[0], x, dim, ubar),
                                    rho_of_gamma(specs[1], x, dim, ubar));
        return (2.0 * ubar + delta) * x + rho - delta;
      };
      double lo = 0.0, hi = delta;
      for (int k = 0; k < 60 && f(hi) < 0.0; ++k) hi *= 2.0;
      for (int k = 0; k < 200 && hi - lo > 1e-12; ++k) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
      }
      if (cfg.gamma >= 0.5 * (lo + hi))
        throw std::invalid_argument("gamma is not below the attraction radius");
    }
  }

  HbPoint interior = hb_point(g, B);
  if (interior.slack < 0.0)
    throw std::runtime_error("no distribution on the set has all regrets <= 0");

  std::array<Strategy, 2> strat;
  for (int i = 0; i < 2; ++i) {
    strat[i].kind = Strategy::Kind::Potential;
    strat[i].potential = specs[i];
    strat[i].fallback = FallbackPolicy::best_reply();
    strat[i].descriptor = "attraction-experiment";
  }

  AttractionStats stats;
  stats.runs = cfg.runs;
  for (int r = 0; r < cfg.runs; ++r) {
    RngStream hist_rng(cfg.seed, 2 * static_cast<std::uint64_t>(r));
    std::vector<long> counts(g.n1 * g.n2, 0);
    for (long n = 0; n < cfg.t0; ++n)
      counts[hist_rng.categorical(interior.z.w)]++;
    JointDistribution z0{g.n1, g.n2, std::vector<double>(g.n1 * g.n2, 0.0)};
    for (size_t c = 0; c < counts.size(); ++c)
      z0.w[c] = static_cast<double>(counts[c]) / static_cast<double>(cfg.t0);
    if (!in_U_gamma(g, B, specs, z0, cfg.gamma)) {
      stats.construction_failures++;
      continue;
    }

    RunConfig rc;
    rc.strategy = strat;
    rc.kind = DynamicsKind::Stochastic;
    rc.T = cfg.T;
    rc.seed = cfg.seed;
    rc.stream = 2 * static_cast<std::uint64_t>(r) + 1;
    rc.t0 = cfg.t0;
    rc.initial_z = z0;
    rc.record_periods = true;
    rc.check_identities = false;
    Trajectory traj = run(g, rc);

    bool stayed = true;
    for (const auto& ab : traj.actions)
      if (!B.contains(ab[0], ab[1])) {
        stayed = false;
        break;
      }
    if (stayed) stats.stayed++;
    stats.terminal_distances.push_back(
        distance_to_hb(g, B, traj.final_state().z));
  }
  std::sort(stats.terminal_distances.begin(), stats.terminal_distances.end());

  const int n = cfg.runs - stats.construction_failures;
  if (n > 0) {
    const double p = static_cast<double>(stats.stayed) / n;
    stats.stay_frequency = p;
    const double zc = 1.959963984540054;  // 95% normal quantile
    const double z2 = zc * zc;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half =
        zc * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // The interval contains p in exact arithmetic; clamp so rounding can
    // never push an endpoint past the sample frequency.
    stats.ci_low = std::min(p, std::max(0.0, center - half));
    stats.ci_high = std::max(p, std::min(1.0, center + half));
  }
  return stats;
}

}  // namespace regretlab
