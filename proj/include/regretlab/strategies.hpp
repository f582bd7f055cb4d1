#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "regretlab/game.hpp"

namespace regretlab {

// Thrown when a gradient-based rule is asked to act on a regret vector whose
// gradient normalizer underflows (no usable direction).
struct ZeroGradient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Potential function over regret space. The built-in family is the lp norm of
// the positive part, P(x) = (sum_k [x_k]+^p)^(1/p) with p > 1; p = 2 gives
// regret matching and large p approaches fictitious play. Custom potentials
// supply their own evaluators plus the growth constant rho2 with
// grad P(x).x <= rho2 * P(x); for the lp family rho2 = 1 exactly, since the
// positive part is homogeneous of degree one.
struct PotentialSpec {
  enum class Kind { LpNorm, Custom };

  Kind kind = Kind::LpNorm;
  double p = 2.0;
  std::function<double(const std::vector<double>&)> value;
  std::function<std::vector<double>(const std::vector<double>&)> gradient;
  double rho2 = 1.0;

  static PotentialSpec lp_norm(double p);
  static PotentialSpec custom(
      std::function<double(const std::vector<double>&)> value,
      std::function<std::vector<double>(const std::vector<double>&)> gradient,
      double rho2);
};

// What to play while no regret is positive: a fixed pure action, or an exact
// best reply to the opponent's empirical distribution (lowest index on ties).
struct FallbackPolicy {
  enum class Kind { ConstantAction, BestReply };

  Kind kind = Kind::ConstantAction;
  int constant_action = 0;

  static FallbackPolicy constant(int action) {
    return {Kind::ConstantAction, action};
  }
  static FallbackPolicy best_reply() { return {Kind::BestReply, 0}; }
};

double potential_value(const PotentialSpec& spec, const std::vector<double>& x);
std::vector<double> potential_gradient(const PotentialSpec& spec,
                                       const std::vector<double>& x);

// Mixed action proportional to grad P at the regret vector. Requires some
// positive regret; throws ZeroGradient when the normalizer underflows.
MixedAction q1_action(const PotentialSpec& spec, const RegretVector& r);

// The p = 2 rule: weights proportional to the positive parts of the regrets.
MixedAction regret_matching(const RegretVector& r);

// Softmax of the pure-action payoffs against the opponent belief at inverse
// temperature beta, computed with max subtraction.
MixedAction exp_weights_action(const Game& g, int player,
                               const MixedAction& opp_belief, double beta);

// Full period rule: gradient move while the max regret is positive, fallback
// policy otherwise.
MixedAction next_action(const PotentialSpec& spec, const FallbackPolicy& fallback,
                        const RegretVector& r, const Game& g, int player,
                        const MixedAction& opp_belief);

struct PotentialCheck {
  bool passed = true;
  std::string failed_condition;       // empty when passed
  std::vector<double> counterexample; // sample point that failed
};

// Monte Carlo check of the axioms on [-2U, 2U]^dims: nonnegativity and
// vanishing on the nonpositive orthant, monotone gradient with positive
// drift off the orthant, inactive coordinates have zero gradient, and the
// rho2 growth bound. Points within 1e-9 of a coordinate zero are skipped
// (the positive part is not differentiable there).
PotentialCheck validate_potential(const PotentialSpec& spec, int dims,
                                  double payoff_bound, int samples,
                                  std::uint64_t seed);

// Per-player rule selected by descriptor:
//   "lp:<p>"      gradient rule for the lp potential
//   "rm"          shorthand for lp:2
//   "expw:<a>"    exponential weights with beta_t = t^a, a in (0,1)
//   "fp"          exact best reply to the opponent's empirical distribution
struct Strategy {
  enum class Kind { Potential, ExpWeights, FictitiousPlay };

  Kind kind = Kind::Potential;
  PotentialSpec potential = PotentialSpec::lp_norm(2.0);
  FallbackPolicy fallback = FallbackPolicy::constant(0);
  double alpha = 0.5;
  std::string descriptor = "rm";
};

Strategy parse_strategy(const std::string& descriptor);

}  // namespace regretlab
