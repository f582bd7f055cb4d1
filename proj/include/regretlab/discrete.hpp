#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "regretlab/game.hpp"
#include "regretlab/rng.hpp"
#include "regretlab/strategies.hpp"

namespace regretlab {

// Compensated accumulator for the running sums t * R_{i,k}(t).
struct KahanSum {
  double s = 0.0;
  double c = 0.0;

  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

// Full simulation state after period t. Regrets are maintained incrementally
// as compensated sums of per-period payoff differences; sums[i][k] holds
// t * R_{i,k}(t), which is exact for the pure-profile path.
struct SimState {
  long t = 0;
  JointDistribution z;
  MixedProfile beliefs;  // marginals of z
  std::array<int, 2> last_realized{-1, -1};  // -1 before any realized step
  MixedProfile last_mixed;
  std::array<std::vector<KahanSum>, 2> sums;

  RegretVector regrets(int player) const;
  double rmax(int player) const;
};

enum class DynamicsKind { Stochastic, Expected, Dfp };
enum class TieRule { Lowest, Stay, Random };

// Step-level identity tracking accumulated across a run.
struct StepDiagnostics {
  double max_orthogonality = 0.0;  // mixing identity residual, all opp actions
  int sign_violations = 0;         // max regret returned to <= 0 after > 0
  double fallback_drift = 0.0;     // movement of t*R_c while fallback active
  double max_scratch_gap = 0.0;    // incremental vs recomputed regrets
};

// State at t = 1 after one uniformly drawn pure profile.
SimState initial_state(const Game& g, RngStream& rng);
// State with a prescribed average at period t0 >= 1; regrets from scratch.
SimState initial_state(const Game& g, long t0, const JointDistribution& z0);

// One period of play. Each advances state.t by one; q is chosen from the
// state at the old t, realized (or averaged in expected play), and folded
// into z and the regret sums.
void step_no_regret(const Game& g, SimState& s,
                    const std::array<Strategy, 2>& strat, RngStream& rng,
                    StepDiagnostics* diag = nullptr);
void step_expected(const Game& g, SimState& s,
                   const std::array<Strategy, 2>& strat,
                   StepDiagnostics* diag = nullptr);
void step_dfp(const Game& g, SimState& s, TieRule tie, RngStream& rng,
              StepDiagnostics* diag = nullptr);

// Snapshot periods: t0, then powers of 1.1 rounded up (deduplicated), then T.
std::vector<long> geometric_schedule(long t0, long T);

struct RunConfig {
  std::array<Strategy, 2> strategy{parse_strategy("rm"), parse_strategy("rm")};
  DynamicsKind kind = DynamicsKind::Stochastic;
  TieRule tie = TieRule::Lowest;
  long T = 1000;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  // When set, start from this average at period t0 instead of a random draw.
  long t0 = 1;
  std::optional<JointDistribution> initial_z;
  bool record_periods = true;  // per-period actions and max regrets
  bool record_mixed = false;   // per-period mixed profiles (heavier)
  bool check_identities = true;
  long scratch_check_every = 1000;
};

struct Trajectory {
  long t0 = 1;
  long T = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  DynamicsKind kind = DynamicsKind::Stochastic;

  // Per period, for t = t0+1 .. T (index t - t0 - 1); actions are -1 for
  // expected play.
  std::vector<std::array<int, 2>> actions;
  std::vector<std::array<double, 2>> rmax;
  std::vector<MixedProfile> mixed;  // filled when record_mixed

  // Snapshots on the geometric schedule; front is the initial state.
  std::vector<SimState> snapshots;
  std::vector<long> snapshot_periods;

  StepDiagnostics diag;

  const SimState& final_state() const { return snapshots.back(); }
};

Trajectory run(const Game& g, const RunConfig& cfg);

}  // namespace regretlab
