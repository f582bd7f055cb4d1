#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "regretlab/game.hpp"
#include "regretlab/strategies.hpp"

namespace regretlab {

// Integration made no forward progress: piece lengths (or step sizes)
// collapsed below resolution without an accumulation point to jump over.
struct StalledIntegration : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The initial state does not satisfy what the dynamics assume
// (e.g. the smooth dynamics need strictly positive max regret).
struct PreconditionViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// How continuous fictitious play re-enters after a payoff tie. The default
// plays a Nash equilibrium of the game restricted to the tied best replies,
// which keeps the tied payoffs tied and yields a well-defined continuation.
// LowestIndex always picks the smallest tied action; it is cheaper but can
// stall on ties whose lowest action immediately leaves the best-reply set.
enum class TiePolicy { RestrictedEquilibrium, LowestIndex };

// Piecewise record of a continuous-time run. Entry k holds the state at
// breakpoint times[k]; piece_q[k] is the (constant) play on
// [times[k], times[k+1]), so piece_q has one entry fewer than times.
struct ContinuousTrajectory {
  std::vector<double> times;                // increasing, times.front() = start
  std::vector<MixedProfile> x;              // average play of each player
  std::vector<JointDistribution> z;         // joint average play
  std::vector<std::array<double, 2>> rmax;  // max regret per player
  std::vector<MixedProfile> piece_q;        // play during each piece

  const MixedProfile& final_x() const { return x.back(); }
  const JointDistribution& final_z() const { return z.back(); }
  double final_time() const { return times.back(); }
};

// Continuous fictitious play from time 1 to T: each player's current play is
// a best reply to the opponent's average, and averages evolve as
//   x_i(t) = q_i + (s/t) (x_i(s) - q_i)
// along a piece starting at s with constant play q. Switch times are located
// by bisection to root_tol. x0 must match the marginals of z0.
ContinuousTrajectory cfp_integrate(const Game& g, const MixedProfile& x0,
                                   const JointDistribution& z0, double T,
                                   TiePolicy tie = TiePolicy::RestrictedEquilibrium,
                                   double root_tol = 1e-10);

// Opponent script for one-sided runs: play `play` until time t_end.
struct ScriptSegment {
  double t_end = 0.0;
  MixedAction play;
};

// Continuous fictitious play for player 1 only; player 2 follows the script
// (segments in increasing t_end order, covering [1, T]). Ties for player 1
// are broken toward the action best against the script's current play.
ContinuousTrajectory cfp_integrate_scripted(const Game& g, const MixedProfile& x0,
                                            const JointDistribution& z0, double T,
                                            const std::vector<ScriptSegment>& script,
                                            double root_tol = 1e-10);

// Max over recorded breakpoints of |t * rmax_i(t) - t0 * rmax_i(t0)|, per
// player: along exact continuous fictitious play t * max-regret is constant,
// so this measures integration error.
std::array<double, 2> regret_conservation_residual(const ContinuousTrajectory& traj);

// Error control for the smooth dynamics integrator.
struct StepControl {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double max_step_fraction = 0.01;  // step <= fraction * current time
};

struct OdeTrajectory {
  std::vector<double> times;
  std::vector<JointDistribution> z;
  std::vector<std::array<double, 2>> rmax;

  const JointDistribution& final_z() const { return z.back(); }
};

// Right-hand side of the smooth regret dynamics at state z and time t:
//   dz/dt = (q1 x q2 - z) / t,
// where q_i is the gradient-direction play of player i at the regrets of z.
// Both players must have strictly positive max regret at z.
std::vector<double> ode_field(const Game& g,
                              const std::array<PotentialSpec, 2>& specs,
                              const JointDistribution& z, double t);

// Integrate the smooth regret dynamics from time 1 to T with an embedded
// Dormand-Prince 5(4) pair. Throws PreconditionViolated unless both players
// start with strictly positive max regret; positivity is rechecked at every
// accepted step (it is preserved by the exact flow).
OdeTrajectory cont_no_regret_integrate(const Game& g,
                                       const std::array<PotentialSpec, 2>& specs,
                                       const JointDistribution& z1, double T,
                                       const StepControl& ctrl = {});

// Change of clock tau = log t, mapping continuous fictitious play onto the
// best-reply dynamics dx_i/dtau = q_i - x_i. States are unchanged; only the
// time stamps move.
ContinuousTrajectory rescale_to_br_dynamics(const ContinuousTrajectory& traj);
ContinuousTrajectory rescale_to_cfp_time(const ContinuousTrajectory& traj);

}  // namespace regretlab
