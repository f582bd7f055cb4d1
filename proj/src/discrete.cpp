#include "regretlab/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace regretlab {

RegretVector SimState::regrets(int player) const {
  RegretVector r;
  r.player = player;
  r.v.resize(sums[player].size());
  for (size_t k = 0; k < r.v.size(); ++k)
    r.v[k] = sums[player][k].value() / static_cast<double>(t);
  return r;
}

double SimState::rmax(int player) const {
  double m = -std::numeric_limits<double>::infinity();
  for (const KahanSum& s : sums[player])
    m = std::max(m, s.value() / static_cast<double>(t));
  return m;
}

namespace {

void seed_sums(const Game& g, SimState& s) {
  for (int i = 0; i < 2; ++i) {
    RegretVector r = regret_vector(g, i, s.z);
    s.sums[i].assign(r.v.size(), KahanSum{});
    for (size_t k = 0; k < r.v.size(); ++k)
      s.sums[i][k].add(static_cast<double>(s.t) * r.v[k]);
  }
}

}  // namespace

SimState initial_state(const Game& g, RngStream& rng) {
  SimState s;
  s.t = 1;
  const int a = rng.uniform_int(g.n1);
  const int b = rng.uniform_int(g.n2);
  s.z = pure_joint(g.n1, g.n2, a, b);
  s.beliefs = marginals(s.z);
  s.last_realized = {a, b};
  s.last_mixed = MixedProfile{pure_mixed(g.n1, a), pure_mixed(g.n2, b)};
  seed_sums(g, s);
  return s;
}

SimState initial_state(const Game& g, long t0, const JointDistribution& z0) {
  if (t0 < 1) throw std::invalid_argument("initial state needs t0 >= 1");
  if (z0.n1 != g.n1 || z0.n2 != g.n2)
    throw std::invalid_argument("initial average has wrong shape");
  validate_joint(z0, 1e-9);
  SimState s;
  s.t = t0;
  s.z = z0;
  s.beliefs = marginals(s.z);
  s.last_mixed = s.beliefs;
  seed_sums(g, s);
  return s;
}

namespace {

// Persistent across the periods of one run; the step entry points use a
// throwaway instance, so cross-period sign tracking lives in run() only.
struct FallbackTracker {
  bool ever_positive[2] = {false, false};
  bool ref_set[2] = {false, false};
  double ref[2] = {0.0, 0.0};
};

// Mixed action chosen by the strategy for period t_next given the state after
// the previous period.
MixedAction choose(const Game& g, const SimState& s, const Strategy& strat,
                   int player, long t_next, TieRule tie, RngStream* rng) {
  const MixedAction& opp = player == 0 ? s.beliefs.x2 : s.beliefs.x1;
  switch (strat.kind) {
    case Strategy::Kind::Potential:
      return next_action(strat.potential, strat.fallback, s.regrets(player), g,
                         player, opp);
    case Strategy::Kind::ExpWeights:
      return exp_weights_action(
          g, player, opp, std::pow(static_cast<double>(t_next), strat.alpha));
    case Strategy::Kind::FictitiousPlay: {
      BestReplySet br = best_replies(g, player, opp);
      int pick = br.actions.front();
      if (br.actions.size() > 1) {
        if (tie == TieRule::Stay) {
          const int prev = s.last_realized[player];
          if (std::find(br.actions.begin(), br.actions.end(), prev) !=
              br.actions.end())
            pick = prev;
        } else if (tie == TieRule::Random) {
          if (!rng) throw std::invalid_argument("random tie rule needs an rng");
          pick = br.actions[rng->uniform_int(static_cast<int>(br.actions.size()))];
        }
      }
      return pure_mixed(g.actions(player), pick);
    }
  }
  throw std::logic_error("unreachable");
}

// sum_k q_k (u(k, opp) - u(q, opp)) should vanish for every pure opponent
// action; the residual measures rounding in q and the payoff evaluations.
double orthogonality_residual(const Game& g, int player, const MixedAction& q) {
  const int no = g.actions(1 - player);
  double worst = 0.0;
  for (int o = 0; o < no; ++o) {
    double uq = 0.0;
    for (int k = 0; k < q.size(); ++k)
      uq += q[k] * (player == 0 ? g.pay1(k, o) : g.pay2(o, k));
    double res = 0.0;
    for (int k = 0; k < q.size(); ++k)
      res += q[k] * ((player == 0 ? g.pay1(k, o) : g.pay2(o, k)) - uq);
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

void do_step(const Game& g, SimState& s, DynamicsKind kind,
             const std::array<Strategy, 2>* strat, TieRule tie, RngStream* rng,
             StepDiagnostics* diag, FallbackTracker& track) {
  static const Strategy fp_strategy = parse_strategy("fp");
  const long t = s.t + 1;
  std::array<MixedAction, 2> q;
  for (int i = 0; i < 2; ++i) {
    const Strategy& st = kind == DynamicsKind::Dfp ? fp_strategy : (*strat)[i];
    q[i] = choose(g, s, st, i, t, tie, rng);
  }
  if (diag)
    for (int i = 0; i < 2; ++i)
      diag->max_orthogonality =
          std::max(diag->max_orthogonality, orthogonality_residual(g, i, q[i]));

  const bool realized = kind != DynamicsKind::Expected;
  std::array<double, 2> actual;
  if (realized) {
    int a, b;
    if (kind == DynamicsKind::Stochastic) {
      a = rng->categorical(q[0].w);
      b = rng->categorical(q[1].w);
    } else {  // pure best replies
      a = b = 0;
      for (int k = 0; k < g.n1; ++k)
        if (q[0][k] == 1.0) a = k;
      for (int k = 0; k < g.n2; ++k)
        if (q[1][k] == 1.0) b = k;
    }
    s.t = t;
    s.last_realized = {a, b};
    s.last_mixed = MixedProfile{q[0], q[1]};
    update_average(s.z, pure_joint(g.n1, g.n2, a, b), t);
    actual = {g.pay1(a, b), g.pay2(a, b)};
  } else {
    s.t = t;
    s.last_realized = {-1, -1};
    s.last_mixed = MixedProfile{q[0], q[1]};
    update_average(s.z, product_distribution(s.last_mixed), t);
    actual = {expected_payoff(g, 0, s.last_mixed),
              expected_payoff(g, 1, s.last_mixed)};
  }
  s.beliefs = marginals(s.z);

  for (int i = 0; i < 2; ++i) {
    const int n = g.actions(i);
    for (int k = 0; k < n; ++k) {
      double dev;
      if (realized) {
        const int o = s.last_realized[1 - i];
        dev = i == 0 ? g.pay1(k, o) : g.pay2(o, k);
      } else {
        dev = action_payoff(g, i, k, q[1 - i]);
      }
      s.sums[i][k].add(dev - actual[i]);
    }
  }

  if (!diag) return;
  for (int i = 0; i < 2; ++i) {
    const double rm = s.rmax(i);
    if (track.ever_positive[i] && rm <= 0.0) ++diag->sign_violations;
    if (rm > 0.0) track.ever_positive[i] = true;
    if (strat && !track.ever_positive[i]) {
      const Strategy& st = (*strat)[i];
      if (st.kind == Strategy::Kind::Potential &&
          st.fallback.kind == FallbackPolicy::Kind::ConstantAction) {
        const double sc = s.sums[i][st.fallback.constant_action].value();
        if (!track.ref_set[i]) {
          track.ref_set[i] = true;
          track.ref[i] = sc;
        } else {
          diag->fallback_drift =
              std::max(diag->fallback_drift, std::abs(sc - track.ref[i]));
        }
      }
    }
  }
}

}  // namespace

void step_no_regret(const Game& g, SimState& s,
                    const std::array<Strategy, 2>& strat, RngStream& rng,
                    StepDiagnostics* diag) {
  FallbackTracker track;
  do_step(g, s, DynamicsKind::Stochastic, &strat, TieRule::Lowest, &rng, diag,
          track);
}

void step_expected(const Game& g, SimState& s,
                   const std::array<Strategy, 2>& strat,
                   StepDiagnostics* diag) {
  FallbackTracker track;
  do_step(g, s, DynamicsKind::Expected, &strat, TieRule::Lowest, nullptr, diag,
          track);
}

void step_dfp(const Game& g, SimState& s, TieRule tie, RngStream& rng,
              StepDiagnostics* diag) {
  FallbackTracker track;
  do_step(g, s, DynamicsKind::Dfp, nullptr, tie, &rng, diag, track);
}

std::vector<long> geometric_schedule(long t0, long T) {
  if (T < t0) throw std::invalid_argument("schedule needs T >= t0");
  std::vector<long> out;
  out.push_back(t0);
  double v = 1.0;
  while (true) {
    v *= 1.1;
    long p = static_cast<long>(std::ceil(v));
    if (p >= T) break;
    if (p > t0 && p != out.back()) out.push_back(p);
  }
  if (T > t0) out.push_back(T);
  return out;
}

Trajectory run(const Game& g, const RunConfig& cfg) {
  if (cfg.T < 1) throw std::invalid_argument("run needs T >= 1");
  RngStream rng(cfg.seed, cfg.stream);
  SimState s = cfg.initial_z ? initial_state(g, cfg.t0, *cfg.initial_z)
                             : initial_state(g, rng);
  if (cfg.T < s.t) throw std::invalid_argument("run needs T >= starting period");

  Trajectory traj;
  traj.t0 = s.t;
  traj.T = cfg.T;
  traj.seed = cfg.seed;
  traj.stream = cfg.stream;
  traj.kind = cfg.kind;
  const long steps = cfg.T - s.t;
  if (cfg.record_periods) {
    traj.actions.reserve(steps);
    traj.rmax.reserve(steps);
  }
  if (cfg.record_mixed) traj.mixed.reserve(steps);

  std::vector<long> schedule = geometric_schedule(s.t, cfg.T);
  size_t next_snap = 0;
  auto snapshot_if_due = [&]() {
    while (next_snap < schedule.size() && schedule[next_snap] <= s.t) {
      if (schedule[next_snap] == s.t) {
        traj.snapshots.push_back(s);
        traj.snapshot_periods.push_back(s.t);
      }
      ++next_snap;
    }
  };
  snapshot_if_due();

  FallbackTracker track;
  StepDiagnostics* diag = cfg.check_identities ? &traj.diag : nullptr;
  while (s.t < cfg.T) {
    do_step(g, s, cfg.kind,
            cfg.kind == DynamicsKind::Dfp ? nullptr : &cfg.strategy, cfg.tie,
            &rng, diag, track);
    if (cfg.record_periods) {
      traj.actions.push_back(s.last_realized);
      traj.rmax.push_back({s.rmax(0), s.rmax(1)});
    }
    if (cfg.record_mixed) traj.mixed.push_back(s.last_mixed);
    if (cfg.check_identities && cfg.scratch_check_every > 0 &&
        s.t % cfg.scratch_check_every == 0) {
      for (int i = 0; i < 2; ++i) {
        RegretVector fresh = regret_vector(g, i, s.z);
        RegretVector inc = s.regrets(i);
        for (size_t k = 0; k < fresh.v.size(); ++k)
          traj.diag.max_scratch_gap = std::max(
              traj.diag.max_scratch_gap, std::abs(fresh.v[k] - inc.v[k]));
      }
    }
    snapshot_if_due();
  }
  if (traj.snapshot_periods.empty() || traj.snapshot_periods.back() != s.t) {
    traj.snapshots.push_back(s);
    traj.snapshot_periods.push_back(s.t);
  }
  return traj;
}

}  // namespace regretlab
