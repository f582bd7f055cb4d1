#include "regretlab/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "regretlab/equilibrium.hpp"

namespace regretlab {

namespace {

// Consecutive zero-or-negligible-length pieces tolerated before giving up.
constexpr int kMaxTinyPieces = 100;
// Consecutive >=10x piece shrinks that trigger the accumulation-point jump.
constexpr int kZenoShrinks = 50;
constexpr long kPieceBudget = 200000;

double mixed_payoff(const Game& g, int player, const MixedAction& own,
                    const MixedAction& opp) {
  double v = 0.0;
  for (int k = 0; k < own.size(); ++k) {
    if (own[k] != 0.0) v += own[k] * action_payoff(g, player, k, opp);
  }
  return v;
}

// Dominant support action of a mixed play, used as the payoff reference when
// scanning for overtaking actions.
int heaviest_action(const MixedAction& q) {
  int best = 0;
  for (int k = 1; k < q.size(); ++k) {
    if (q[k] > q[best]) best = k;
  }
  return best;
}

MixedAction lift_action(const MixedAction& sub, const std::vector<int>& kept,
                        int n) {
  MixedAction full;
  full.w.assign(n, 0.0);
  double sum = 0.0;
  for (std::size_t j = 0; j < kept.size(); ++j) {
    double v = std::max(0.0, sub[static_cast<int>(j)]);
    full.w[kept[j]] = v;
    sum += v;
  }
  for (double& v : full.w) v /= sum;
  return full;
}

// Play for the piece starting at beliefs x. Singleton best replies need no
// policy; on ties, RestrictedEquilibrium solves the game restricted to the
// tied actions and plays its first equilibrium, LowestIndex takes the
// smallest tied action.
MixedProfile select_play(const Game& g, const MixedProfile& x, TiePolicy tie,
                         double tie_eps) {
  BestReplySet br1 = best_replies(g, 0, x.x2, tie_eps);
  BestReplySet br2 = best_replies(g, 1, x.x1, tie_eps);
  if (tie == TiePolicy::LowestIndex ||
      (br1.actions.size() == 1 && br2.actions.size() == 1)) {
    return {pure_mixed(g.n1, br1.actions.front()),
            pure_mixed(g.n2, br2.actions.front())};
  }
  int m1 = static_cast<int>(br1.actions.size());
  int m2 = static_cast<int>(br2.actions.size());
  std::vector<double> u1(m1 * m2), u2(m1 * m2);
  for (int a = 0; a < m1; ++a) {
    for (int b = 0; b < m2; ++b) {
      u1[a * m2 + b] = g.pay1(br1.actions[a], br2.actions[b]);
      u2[a * m2 + b] = g.pay2(br1.actions[a], br2.actions[b]);
    }
  }
  Game reduced = make_game(m1, m2, std::move(u1), std::move(u2));
  std::vector<MixedProfile> ne = nash_support_enumeration(reduced);
  if (ne.empty()) {
    return {pure_mixed(g.n1, br1.actions.front()),
            pure_mixed(g.n2, br2.actions.front())};
  }
  return {lift_action(ne.front().x1, br1.actions, g.n1),
          lift_action(ne.front().x2, br2.actions, g.n2)};
}

// Earliest time in (s, T] at which some action of `player` overtakes the
// current play. Along a piece the opponent belief is affine in w = s/t, so
// each payoff difference is d_q + w (d_s - d_q): it can cross zero at most
// once, and only when it is negative now and positive at the target belief.
// The crossing is located by bisection to root_tol; +inf if nothing crosses.
double switch_time(const Game& g, int player, const MixedAction& own_q,
                   const MixedAction& opp_belief, const MixedAction& opp_q,
                   double s, double T, double root_tol, double tie_eps) {
  int ref = heaviest_action(own_q);
  double ref_s = action_payoff(g, player, ref, opp_belief);
  double ref_q = action_payoff(g, player, ref, opp_q);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < own_q.size(); ++k) {
    if (own_q[k] > 1e-12 || k == ref) continue;
    double d_q = action_payoff(g, player, k, opp_q) - ref_q;
    if (d_q <= tie_eps) continue;
    double d_s = action_payoff(g, player, k, opp_belief) - ref_s;
    if (d_s >= -tie_eps) {
      // Already tied (or ahead) and strictly better at the target: the piece
      // ends where it starts.
      return s;
    }
    // f(t) = d_q + (s/t)(d_s - d_q), increasing in t, negative at s.
    double f_T = d_q + (s / T) * (d_s - d_q);
    if (f_T <= 0.0) continue;
    double lo = s, hi = T;
    while (hi - lo > root_tol * std::max(1.0, hi)) {
      double mid = 0.5 * (lo + hi);
      double f = d_q + (s / mid) * (d_s - d_q);
      (f < 0.0 ? lo : hi) = mid;
    }
    best = std::min(best, 0.5 * (lo + hi));
  }
  return best;
}

struct PieceWatch {
  double prev_len = -1.0;
  int shrinks = 0;
  int tiny = 0;
  long pieces = 0;

  // Returns the accumulation-point jump target, or 0 when none is due.
  double observe(double s, double len) {
    ++pieces;
    if (pieces > kPieceBudget) {
      throw StalledIntegration("piece budget exhausted at t=" +
                               std::to_string(s));
    }
    if (len < 1e-14 * std::max(1.0, s)) {
      if (++tiny >= kMaxTinyPieces) {
        throw StalledIntegration("piece lengths collapsed at t=" +
                                 std::to_string(s));
      }
    } else {
      tiny = 0;
    }
    if (prev_len > 0.0 && len <= 0.1 * prev_len) {
      if (++shrinks >= kZenoShrinks) {
        double r = len / prev_len;
        shrinks = 0;
        prev_len = -1.0;
        return s + len * r / (1.0 - r);
      }
    } else {
      shrinks = 0;
    }
    prev_len = len;
    return 0.0;
  }

  void spin(double s) {
    if (++tiny >= kMaxTinyPieces) {
      throw StalledIntegration("repeated zero-length pieces at t=" +
                               std::to_string(s));
    }
  }
};

void check_start(const Game& g, const MixedProfile& x0,
                 const JointDistribution& z0, double T) {
  if (!(T > 1.0)) throw std::invalid_argument("horizon must exceed 1");
  validate_mixed(x0.x1);
  validate_mixed(x0.x2);
  validate_joint(z0);
  if (x0.x1.size() != g.n1 || x0.x2.size() != g.n2 || z0.n1 != g.n1 ||
      z0.n2 != g.n2) {
    throw std::invalid_argument("state dimensions do not match the game");
  }
  MixedProfile m = marginals(z0);
  if (sup_distance(m, x0) > 1e-9) {
    throw std::invalid_argument("x0 does not match the marginals of z0");
  }
}

struct Recorder {
  const Game& g;
  ContinuousTrajectory out;

  void push(double t, const MixedProfile& x, const JointDistribution& z) {
    out.times.push_back(t);
    out.x.push_back(x);
    out.z.push_back(z);
    out.rmax.push_back({regret_vector(g, 0, z).max(),
                        regret_vector(g, 1, z).max()});
  }
};

void advance(MixedProfile& x, JointDistribution& z, const MixedProfile& q,
             double s, double t) {
  double w = s / t;
  for (int i = 0; i < x.x1.size(); ++i) {
    x.x1.w[i] = q.x1[i] + w * (x.x1[i] - q.x1[i]);
  }
  for (int i = 0; i < x.x2.size(); ++i) {
    x.x2.w[i] = q.x2[i] + w * (x.x2[i] - q.x2[i]);
  }
  JointDistribution Q = product_distribution(q);
  for (std::size_t i = 0; i < z.w.size(); ++i) {
    z.w[i] = Q.w[i] + w * (z.w[i] - Q.w[i]);
  }
}

}  // namespace

ContinuousTrajectory cfp_integrate(const Game& g, const MixedProfile& x0,
                                   const JointDistribution& z0, double T,
                                   TiePolicy tie, double root_tol) {
  check_start(g, x0, z0, T);
  if (!(root_tol > 0.0)) throw std::invalid_argument("root_tol must be positive");
  double tie_eps = 100.0 * root_tol * std::max(1.0, 2.0 * g.payoff_bound);

  Recorder rec{g, {}};
  MixedProfile x = x0;
  JointDistribution z = z0;
  double s = 1.0;
  rec.push(s, x, z);
  PieceWatch watch;

  while (s < T * (1.0 - 1e-15)) {
    MixedProfile q = select_play(g, x, tie, tie_eps);
    double t1 = switch_time(g, 0, q.x1, x.x2, q.x2, s, T, root_tol, tie_eps);
    double t2 = switch_time(g, 1, q.x2, x.x1, q.x1, s, T, root_tol, tie_eps);
    double t_next = std::min({t1, t2, T});
    if (t_next <= s * (1.0 + 1e-16)) {
      watch.spin(s);
      continue;
    }
    advance(x, z, q, s, t_next);
    double len = t_next - s;
    s = t_next;
    rec.push(s, x, z);
    rec.out.piece_q.push_back(q);
    double jump = watch.observe(s, len);
    if (jump > s && jump < T) {
      // Piece lengths are collapsing geometrically: skip to the extrapolated
      // accumulation point and re-enter through the tie policy there.
      advance(x, z, q, s, jump);
      s = jump;
      rec.push(s, x, z);
      rec.out.piece_q.push_back(q);
    }
  }
  return std::move(rec.out);
}

ContinuousTrajectory cfp_integrate_scripted(const Game& g, const MixedProfile& x0,
                                            const JointDistribution& z0, double T,
                                            const std::vector<ScriptSegment>& script,
                                            double root_tol) {
  check_start(g, x0, z0, T);
  if (!(root_tol > 0.0)) throw std::invalid_argument("root_tol must be positive");
  if (script.empty()) throw std::invalid_argument("script must not be empty");
  for (std::size_t i = 0; i < script.size(); ++i) {
    validate_mixed(script[i].play);
    if (script[i].play.size() != g.n2) {
      throw std::invalid_argument("script play has wrong dimension");
    }
    if (i > 0 && !(script[i].t_end > script[i - 1].t_end)) {
      throw std::invalid_argument("script segment ends must increase");
    }
  }
  if (script.back().t_end < T) {
    throw std::invalid_argument("script must cover the horizon");
  }
  double tie_eps = 100.0 * root_tol * std::max(1.0, 2.0 * g.payoff_bound);

  Recorder rec{g, {}};
  MixedProfile x = x0;
  JointDistribution z = z0;
  double s = 1.0;
  rec.push(s, x, z);
  PieceWatch watch;
  std::size_t seg = 0;

  while (s < T * (1.0 - 1e-15)) {
    while (script[seg].t_end <= s && seg + 1 < script.size()) ++seg;
    const MixedAction& q2 = script[seg].play;
    // Best reply to the opponent's average; ties resolved toward the action
    // doing best against the play the belief is drifting to, so the chosen
    // action survives the tie instead of being abandoned immediately.
    BestReplySet br = best_replies(g, 0, x.x2, tie_eps);
    int pick = br.actions.front();
    double pick_target = action_payoff(g, 0, pick, q2);
    for (std::size_t j = 1; j < br.actions.size(); ++j) {
      double v = action_payoff(g, 0, br.actions[j], q2);
      if (v > pick_target + 1e-12) {
        pick = br.actions[j];
        pick_target = v;
      }
    }
    MixedProfile q{pure_mixed(g.n1, pick), q2};
    double t1 = switch_time(g, 0, q.x1, x.x2, q.x2, s, T, root_tol, tie_eps);
    double t_next = std::min({t1, std::max(script[seg].t_end, s), T});
    if (t_next <= s * (1.0 + 1e-16)) {
      watch.spin(s);
      continue;
    }
    advance(x, z, q, s, t_next);
    double len = t_next - s;
    s = t_next;
    rec.push(s, x, z);
    rec.out.piece_q.push_back(q);
    watch.observe(s, len);
  }
  return std::move(rec.out);
}

std::array<double, 2> regret_conservation_residual(const ContinuousTrajectory& traj) {
  if (traj.times.empty()) {
    throw std::invalid_argument("empty trajectory");
  }
  std::array<double, 2> res{0.0, 0.0};
  for (int i = 0; i < 2; ++i) {
    double ref = traj.times.front() * traj.rmax.front()[i];
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
      res[i] = std::max(res[i],
                        std::abs(traj.times[k] * traj.rmax[k][i] - ref));
    }
  }
  return res;
}

namespace {

std::vector<double> field_at(const Game& g,
                             const std::array<PotentialSpec, 2>& specs,
                             const std::vector<double>& y, double t) {
  JointDistribution z{g.n1, g.n2, y};
  RegretVector r1 = regret_vector(g, 0, z);
  RegretVector r2 = regret_vector(g, 1, z);
  if (r1.max() <= 0.0 || r2.max() <= 0.0) {
    throw PreconditionViolated("max regret not strictly positive");
  }
  MixedAction q1 = q1_action(specs[0], r1);
  MixedAction q2 = q1_action(specs[1], r2);
  std::vector<double> f(y.size());
  for (int a = 0; a < g.n1; ++a) {
    for (int b = 0; b < g.n2; ++b) {
      f[a * g.n2 + b] = (q1[a] * q2[b] - y[a * g.n2 + b]) / t;
    }
  }
  return f;
}

}  // namespace

std::vector<double> ode_field(const Game& g,
                              const std::array<PotentialSpec, 2>& specs,
                              const JointDistribution& z, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("time must be positive");
  validate_joint(z);
  if (z.n1 != g.n1 || z.n2 != g.n2) {
    throw std::invalid_argument("state dimensions do not match the game");
  }
  return field_at(g, specs, z.w, t);
}

OdeTrajectory cont_no_regret_integrate(const Game& g,
                                       const std::array<PotentialSpec, 2>& specs,
                                       const JointDistribution& z1, double T,
                                       const StepControl& ctrl) {
  if (!(T > 1.0)) throw std::invalid_argument("horizon must exceed 1");
  validate_joint(z1);
  if (z1.n1 != g.n1 || z1.n2 != g.n2) {
    throw std::invalid_argument("state dimensions do not match the game");
  }
  if (!(ctrl.rel_tol > 0.0) || !(ctrl.abs_tol > 0.0) ||
      !(ctrl.max_step_fraction > 0.0)) {
    throw std::invalid_argument("step control must be positive");
  }
  {
    RegretVector r1 = regret_vector(g, 0, z1);
    RegretVector r2 = regret_vector(g, 1, z1);
    if (r1.max() <= 0.0 || r2.max() <= 0.0) {
      throw PreconditionViolated(
          "initial max regret must be strictly positive for both players");
    }
  }

  // Dormand-Prince 5(4) coefficients; the last row of A is the fifth-order
  // solution weights (FSAL), e is the difference to the embedded fourth order.
  static const double A[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double C[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static const double E[7] = {71.0 / 57600,      0.0,        -71.0 / 16695,
                              71.0 / 1920,       -17253.0 / 339200,
                              22.0 / 525,        -1.0 / 40};

  const std::size_t n = z1.w.size();
  std::vector<double> y = z1.w;
  double t = 1.0;
  OdeTrajectory out;
  auto record = [&](double tt, const std::vector<double>& yy) {
    JointDistribution z{g.n1, g.n2, yy};
    double m1 = regret_vector(g, 0, z).max();
    double m2 = regret_vector(g, 1, z).max();
    if (m1 <= 0.0 || m2 <= 0.0) {
      throw StalledIntegration(
          "max regret lost positivity at t=" + std::to_string(tt) +
          "; tighten tolerances");
    }
    out.times.push_back(tt);
    out.z.push_back(std::move(z));
    out.rmax.push_back({m1, m2});
  };
  record(t, y);

  std::vector<double> k[7];
  k[0] = field_at(g, specs, y, t);
  double h = std::min(ctrl.max_step_fraction, T - 1.0);
  std::vector<double> ytmp(n), y5(n);
  int rejects = 0;

  while (t < T * (1.0 - 1e-15)) {
    h = std::min({h, ctrl.max_step_fraction * t, T - t});
    if (h < 1e-13 * std::max(1.0, t)) {
      throw StalledIntegration("step size collapsed at t=" + std::to_string(t));
    }
    bool stage_ok = true;
    try {
      for (int st = 1; st < 7; ++st) {
        for (std::size_t i = 0; i < n; ++i) {
          double acc = y[i];
          for (int j = 0; j < st; ++j) acc += h * A[st][j] * k[j][i];
          ytmp[i] = acc;
        }
        k[st] = field_at(g, specs, ytmp, t + C[st] * h);
        if (st == 6) y5 = ytmp;  // stage 7 is evaluated at the solution
      }
    } catch (const PreconditionViolated&) {
      stage_ok = false;
    } catch (const ZeroGradient&) {
      stage_ok = false;
    }
    if (!stage_ok) {
      h *= 0.5;
      if (++rejects > 200) {
        throw StalledIntegration("could not keep regrets positive at t=" +
                                 std::to_string(t));
      }
      continue;
    }
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = 0.0;
      for (int st = 0; st < 7; ++st) e += E[st] * k[st][i];
      e *= h;
      double sc = ctrl.abs_tol +
                  ctrl.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / static_cast<double>(n));
    if (err <= 1.0) {
      t += h;
      y = y5;
      k[0] = k[6];  // first-same-as-last
      record(t, y);
      rejects = 0;
      double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
      h *= std::clamp(grow, 0.2, 5.0);
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      if (++rejects > 200) {
        throw StalledIntegration("error control failed at t=" +
                                 std::to_string(t));
      }
    }
  }
  return out;
}

ContinuousTrajectory rescale_to_br_dynamics(const ContinuousTrajectory& traj) {
  ContinuousTrajectory out = traj;
  for (double& t : out.times) {
    if (!(t > 0.0)) throw std::invalid_argument("times must be positive");
    t = std::log(t);
  }
  return out;
}

ContinuousTrajectory rescale_to_cfp_time(const ContinuousTrajectory& traj) {
  ContinuousTrajectory out = traj;
  for (double& t : out.times) t = std::exp(t);
  return out;
}

}  // namespace regretlab
