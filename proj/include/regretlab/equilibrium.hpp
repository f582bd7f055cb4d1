#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "regretlab/game.hpp"
#include "regretlab/strategies.hpp"

namespace regretlab {

// All Nash equilibria of small games by support enumeration: for each support
// pair, opponent mixtures making the support indifferent (and the rest weakly
// worse) are found by LP.  Guarded to <= 12 actions per player.
std::vector<MixedProfile> nash_support_enumeration(const Game& g,
                                                   double tol = 1e-9);

struct EliminationStep {
  int player;
  int action;  // original index
};

struct ReducedGame {
  Game game;
  std::array<std::vector<int>, 2> kept;  // surviving original indices
  std::vector<EliminationStep> order;
};

// Iterated elimination of strictly dominated pure actions.  With allow_mixed,
// dominance by mixtures over the surviving actions is detected by LP;
// otherwise only pure-vs-pure componentwise dominance is used.  reverse_scan
// flips the player/action scan order (the surviving set must not change).
ReducedGame strict_dominance_eliminate(const Game& g, bool allow_mixed = true,
                                       bool reverse_scan = false);

// Product of action subsets, sorted original indices.
struct ProductSet {
  std::array<std::vector<int>, 2> sets;
  bool operator==(const ProductSet&) const = default;
  bool contains(int a, int b) const;
  bool full(const Game& g) const;
};

ProductSet full_product(const Game& g);

// B is closed under rational behavior when no action outside B_i is ever a
// weak best reply to a belief supported on B_{-i}.
bool is_curb(const Game& g, const ProductSet& B, double tol = 1e-9);

// Every curb product set of the game; guarded to <= 8 actions per player.
std::vector<ProductSet> curb_enumerate(const Game& g, double tol = 1e-9);

// Worst-case payoff advantage of staying in B: the minimum over players and
// beliefs supported on B_{-i} of (best payoff) - (best outside payoff).
// Positive for curb sets; +infinity when neither player has outside actions.
double delta_B(const Game& g, const ProductSet& B);

// Smallest bound rho with P(r) <= gamma implying max r <= rho.  Exact (gamma)
// for lp-norm potentials; a grid upper bound for custom ones, searched over
// [-2u_bound, 2u_bound]^dim.
double rho_of_gamma(const PotentialSpec& spec, double gamma, int dim = 2,
                    double u_bound = 1.0);

// Root of (2U + delta_B) g + rho(g) - delta_B = 0, bisected to 1e-12.
double gamma_B(const Game& g, const ProductSet& B, const PotentialSpec& spec);

// z lies in U_gamma(H_B): outside-of-B mass below gamma and both players'
// potentials of their regret vectors below gamma.
bool in_U_gamma(const Game& g, const ProductSet& B,
                const std::array<PotentialSpec, 2>& specs,
                const JointDistribution& z, double gamma);

// A distribution supported on B with all regrets <= -eps for the largest
// feasible eps (the most interior point of H_B found by LP).
struct HbPoint {
  JointDistribution z;
  double slack;  // the optimal eps; >= 0 whenever B is curb
};
HbPoint hb_point(const Game& g, const ProductSet& B);

// Exact sup-norm distance from z to H_B = { y supported on B, all regrets
// <= 0 }, by LP.
double distance_to_hb(const Game& g, const ProductSet& B,
                      const JointDistribution& z);

struct AttractionConfig {
  long t0 = 1000;
  long T = 100000;
  int runs = 200;
  double gamma = 0.05;
  std::uint64_t seed = 1;
};

struct AttractionStats {
  int runs = 0;
  int construction_failures = 0;
  int stayed = 0;
  double stay_frequency = 0.0;
  double ci_low = 0.0, ci_high = 0.0;     // 95% Wilson interval
  std::vector<double> terminal_distances;  // sorted, successful runs only
  double quantile(double q) const;
};

// Monte Carlo check that H_B attracts potential-based play started inside
// U_gamma(H_B): each run seeds a synthetic length-t0 history drawn from an
// interior point of H_B, then follows the dynamics (best-reply fallback) to T
// and records whether realized play ever left B and the final distance to H_B.
AttractionStats curb_attraction_experiment(
    const Game& g, const ProductSet& B,
    const std::array<PotentialSpec, 2>& specs, const AttractionConfig& cfg);

}  // namespace regretlab
