#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace regretlab {

// Two-player finite game in normal form. Payoff tables are row-major:
// u1[a*n2+b] is player 1's payoff when 1 plays a and 2 plays b.
struct Game {
  int n1 = 0;
  int n2 = 0;
  std::vector<double> u1;
  std::vector<double> u2;
  std::vector<std::string> labels1;  // optional, reporting only
  std::vector<std::string> labels2;
  double payoff_bound = 0.0;  // max absolute payoff over both tables

  double pay1(int a, int b) const { return u1[a * n2 + b]; }
  double pay2(int a, int b) const { return u2[a * n2 + b]; }
  double pay(int player, int a, int b) const {
    return player == 0 ? pay1(a, b) : pay2(a, b);
  }
  int actions(int player) const { return player == 0 ? n1 : n2; }
  const std::string& label(int player, int k) const {
    return player == 0 ? labels1[k] : labels2[k];
  }
};

Game make_game(int n1, int n2, std::vector<double> u1, std::vector<double> u2,
               std::vector<std::string> labels1 = {},
               std::vector<std::string> labels2 = {});

// Probability vector over one player's actions.
struct MixedAction {
  std::vector<double> w;

  int size() const { return static_cast<int>(w.size()); }
  double operator[](int k) const { return w[k]; }
};

struct MixedProfile {
  MixedAction x1, x2;

  const MixedAction& of(int player) const { return player == 0 ? x1 : x2; }
};

// Distribution over joint action profiles, row-major like the payoff tables.
// Not necessarily a product: empirical averages of play are correlated.
struct JointDistribution {
  int n1 = 0;
  int n2 = 0;
  std::vector<double> w;

  double at(int a, int b) const { return w[a * n2 + b]; }
  double& at(int a, int b) { return w[a * n2 + b]; }
};

void validate_mixed(const MixedAction& x, double tol = 1e-12);
void validate_joint(const JointDistribution& z, double tol = 1e-12);

MixedAction uniform_mixed(int n);
MixedAction pure_mixed(int n, int k);
JointDistribution pure_joint(int n1, int n2, int a, int b);

// Regrets of one player at a joint distribution z:
//   v[k] = u_i(k, z_{-i}) - u_i(z),
// the payoff gain from having played k throughout instead of the actual play.
struct RegretVector {
  int player = 0;
  std::vector<double> v;

  double max() const;
};

enum class HannanClass { Outside, InteriorH, ReducedHR };

// Classification of z against the Hannan set (all regrets <= 0) and the
// reduced Hannan set (additionally each player's max regret is exactly 0).
struct HannanStatus {
  HannanClass cls;
  double margin;  // max over players of that player's max regret
};

struct BestReplySet {
  std::vector<int> actions;      // ascending
  std::vector<double> payoffs;   // payoff of each listed action vs the belief
  double max_payoff = 0.0;
};

double expected_payoff(const Game& g, int player, const JointDistribution& z);
double expected_payoff(const Game& g, int player, const MixedProfile& p);
// Payoff of pure action k against an opponent mixed action.
double action_payoff(const Game& g, int player, int k, const MixedAction& opp);

MixedProfile marginals(const JointDistribution& z);
JointDistribution product_distribution(const MixedProfile& p);

RegretVector regret_vector(const Game& g, int player, const JointDistribution& z);
BestReplySet best_replies(const Game& g, int player, const MixedAction& opp,
                          double eps = 0.0);
HannanStatus hannan_status(const Game& g, const JointDistribution& z,
                           double tol = 1e-9);

// One step of the running-average recursion z(t) = z(t-1) + (a(t)-z(t-1))/t,
// t >= 2. Renormalizes if accumulated mass drift exceeds 1e-14.
void update_average(JointDistribution& z, const JointDistribution& increment,
                    long t);
void update_average(MixedAction& x, const MixedAction& increment, long t);

double sup_distance(const MixedAction& a, const MixedAction& b);
double sup_distance(const JointDistribution& a, const JointDistribution& b);
double sup_distance(const MixedProfile& a, const MixedProfile& b);

}  // namespace regretlab
