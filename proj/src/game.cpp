#include "regretlab/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace regretlab {

Game make_game(int n1, int n2, std::vector<double> u1, std::vector<double> u2,
               std::vector<std::string> labels1,
               std::vector<std::string> labels2) {
  if (n1 < 1 || n2 < 1)
    throw std::invalid_argument("game needs at least one action per player");
  const size_t cells = static_cast<size_t>(n1) * n2;
  if (u1.size() != cells || u2.size() != cells)
    throw std::invalid_argument("payoff table size mismatch");
  for (double x : u1)
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite payoff");
  for (double x : u2)
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite payoff");

  Game g;
  g.n1 = n1;
  g.n2 = n2;
  g.u1 = std::move(u1);
  g.u2 = std::move(u2);
  if (labels1.empty()) {
    for (int a = 0; a < n1; ++a) g.labels1.push_back(std::to_string(a));
  } else {
    if (static_cast<int>(labels1.size()) != n1)
      throw std::invalid_argument("label count mismatch");
    g.labels1 = std::move(labels1);
  }
  if (labels2.empty()) {
    for (int b = 0; b < n2; ++b) g.labels2.push_back(std::to_string(b));
  } else {
    if (static_cast<int>(labels2.size()) != n2)
      throw std::invalid_argument("label count mismatch");
    g.labels2 = std::move(labels2);
  }
  double bound = 0.0;
  for (double x : g.u1) bound = std::max(bound, std::abs(x));
  for (double x : g.u2) bound = std::max(bound, std::abs(x));
  g.payoff_bound = bound;
  return g;
}

void validate_mixed(const MixedAction& x, double tol) {
  if (x.w.empty()) throw std::invalid_argument("empty mixed action");
  double sum = 0.0;
  for (double p : x.w) {
    if (!(p >= -tol && p <= 1.0 + tol))
      throw std::invalid_argument("mixed action weight out of [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol)
    throw std::invalid_argument("mixed action weights do not sum to 1");
}

void validate_joint(const JointDistribution& z, double tol) {
  if (z.n1 < 1 || z.n2 < 1 ||
      z.w.size() != static_cast<size_t>(z.n1) * z.n2)
    throw std::invalid_argument("joint distribution shape mismatch");
  double sum = 0.0;
  for (double p : z.w) {
    if (!(p >= -tol && p <= 1.0 + tol))
      throw std::invalid_argument("joint weight out of [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol)
    throw std::invalid_argument("joint weights do not sum to 1");
}

MixedAction uniform_mixed(int n) {
  return MixedAction{std::vector<double>(n, 1.0 / n)};
}

MixedAction pure_mixed(int n, int k) {
  MixedAction x{std::vector<double>(n, 0.0)};
  x.w[k] = 1.0;
  return x;
}

JointDistribution pure_joint(int n1, int n2, int a, int b) {
  JointDistribution z{n1, n2, std::vector<double>(static_cast<size_t>(n1) * n2, 0.0)};
  z.at(a, b) = 1.0;
  return z;
}

double RegretVector::max() const {
  return *std::max_element(v.begin(), v.end());
}

double expected_payoff(const Game& g, int player, const JointDistribution& z) {
  const std::vector<double>& u = player == 0 ? g.u1 : g.u2;
  double s = 0.0;
  for (size_t i = 0; i < u.size(); ++i) s += u[i] * z.w[i];
  return s;
}

double expected_payoff(const Game& g, int player, const MixedProfile& p) {
  double s = 0.0;
  for (int a = 0; a < g.n1; ++a) {
    if (p.x1[a] == 0.0) continue;
    double row = 0.0;
    for (int b = 0; b < g.n2; ++b) row += g.pay(player, a, b) * p.x2[b];
    s += p.x1[a] * row;
  }
  return s;
}

double action_payoff(const Game& g, int player, int k, const MixedAction& opp) {
  double s = 0.0;
  if (player == 0) {
    for (int b = 0; b < g.n2; ++b) s += g.pay1(k, b) * opp[b];
  } else {
    for (int a = 0; a < g.n1; ++a) s += g.pay2(a, k) * opp[a];
  }
  return s;
}

MixedProfile marginals(const JointDistribution& z) {
  MixedProfile p;
  p.x1.w.assign(z.n1, 0.0);
  p.x2.w.assign(z.n2, 0.0);
  for (int a = 0; a < z.n1; ++a)
    for (int b = 0; b < z.n2; ++b) {
      p.x1.w[a] += z.at(a, b);
      p.x2.w[b] += z.at(a, b);
    }
  return p;
}

JointDistribution product_distribution(const MixedProfile& p) {
  JointDistribution z;
  z.n1 = p.x1.size();
  z.n2 = p.x2.size();
  z.w.resize(static_cast<size_t>(z.n1) * z.n2);
  for (int a = 0; a < z.n1; ++a)
    for (int b = 0; b < z.n2; ++b) z.at(a, b) = p.x1[a] * p.x2[b];
  return z;
}

RegretVector regret_vector(const Game& g, int player, const JointDistribution& z) {
  RegretVector r;
  r.player = player;
  const double actual = expected_payoff(g, player, z);
  const int n = g.actions(player);
  r.v.resize(n);
  // u_i(k, z_{-i}) marginalizes the opponent side of z.
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    if (player == 0) {
      for (int a = 0; a < g.n1; ++a)
        for (int b = 0; b < g.n2; ++b) s += g.pay1(k, b) * z.at(a, b);
    } else {
      for (int a = 0; a < g.n1; ++a)
        for (int b = 0; b < g.n2; ++b) s += g.pay2(a, k) * z.at(a, b);
    }
    r.v[k] = s - actual;
  }
  return r;
}

BestReplySet best_replies(const Game& g, int player, const MixedAction& opp,
                          double eps) {
  if (eps < 0.0) throw std::invalid_argument("eps must be >= 0");
  const int n = g.actions(player);
  std::vector<double> pay(n);
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    pay[k] = action_payoff(g, player, k, opp);
    best = std::max(best, pay[k]);
  }
  BestReplySet out;
  out.max_payoff = best;
  for (int k = 0; k < n; ++k)
    if (pay[k] >= best - eps) {
      out.actions.push_back(k);
      out.payoffs.push_back(pay[k]);
    }
  return out;
}

HannanStatus hannan_status(const Game& g, const JointDistribution& z,
                           double tol) {
  double margin = -std::numeric_limits<double>::infinity();
  double min_player_max = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2; ++i) {
    double m = regret_vector(g, i, z).max();
    margin = std::max(margin, m);
    min_player_max = std::min(min_player_max, m);
  }
  HannanStatus s;
  s.margin = margin;
  if (margin > tol)
    s.cls = HannanClass::Outside;
  else if (min_player_max >= -tol)
    s.cls = HannanClass::ReducedHR;
  else
    s.cls = HannanClass::InteriorH;
  return s;
}

namespace {

void average_step(std::vector<double>& z, const std::vector<double>& inc, long t) {
  if (t < 2) throw std::invalid_argument("update_average needs t >= 2");
  const double w = 1.0 / static_cast<double>(t);
  double mass = 0.0;
  for (size_t i = 0; i < z.size(); ++i) {
    z[i] += w * (inc[i] - z[i]);
    mass += z[i];
  }
  if (std::abs(mass - 1.0) > 1e-14)
    for (double& p : z) p /= mass;
}

}  // namespace

void update_average(JointDistribution& z, const JointDistribution& increment,
                    long t) {
  if (z.n1 != increment.n1 || z.n2 != increment.n2)
    throw std::invalid_argument("update_average shape mismatch");
  average_step(z.w, increment.w, t);
}

void update_average(MixedAction& x, const MixedAction& increment, long t) {
  if (x.size() != increment.size())
    throw std::invalid_argument("update_average shape mismatch");
  average_step(x.w, increment.w, t);
}

double sup_distance(const MixedAction& a, const MixedAction& b) {
  double d = 0.0;
  for (int k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

double sup_distance(const JointDistribution& a, const JointDistribution& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.w.size(); ++i)
    d = std::max(d, std::abs(a.w[i] - b.w[i]));
  return d;
}

double sup_distance(const MixedProfile& a, const MixedProfile& b) {
  return std::max(sup_distance(a.x1, b.x1), sup_distance(a.x2, b.x2));
}

}  // namespace regretlab
