#include "regretlab/catalog.hpp"

#include <cmath>
#include <stdexcept>

#include "regretlab/rng.hpp"

namespace regretlab {

namespace {

const double kSqrt2 = std::sqrt(2.0);

// u2[a][b] = u1[b][a]: both players see the same payoff structure with the
// roles swapped, the convention for one-matrix symmetric games.
Game symmetric_game(int n, const std::vector<double>& u1,
                    std::vector<std::string> labels) {
  std::vector<double> u2(u1.size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) u2[a * n + b] = u1[b * n + a];
  return make_game(n, n, u1, std::move(u2), labels, labels);
}

Game build_fig1() {
  return make_game(2, 2, {1, 0, 0, kSqrt2}, {kSqrt2, 0, 0, 1}, {"L", "R"},
                   {"L", "R"});
}

Game build_fig2() {
  const double eta = kSqrt2 / (1.0 + kSqrt2);
  return make_game(3, 2,
                   {1, 0,
                    0, kSqrt2,
                    eta, eta},
                   {0, kSqrt2,
                    1, 0,
                    0, 0},
                   {"L", "R", "C"}, {"L", "R"});
}

Game build_fig3i() {
  return symmetric_game(3,
                        {2, 1, -4,
                         1, 0, -1,
                         -4, -1, -2},
                        {"A", "B", "C"});
}

Game build_fig3ii(double eps) {
  if (eps < 0.0) throw std::invalid_argument("fig3ii needs eps >= 0");
  return symmetric_game(4,
                        {1, 1, 0, 0,
                         1 - eps, 1 - eps, -eps, -eps,
                         0, 0, 1, 1,
                         -eps, -eps, 1 - eps, 1 - eps},
                        {"A", "A-", "B", "B-"});
}

Game build_shapley() {
  return make_game(3, 3,
                   {0, 1, 0,
                    0, 0, 1,
                    1, 0, 0},
                   {0, 0, 1,
                    1, 0, 0,
                    0, 1, 0},
                   {"A", "B", "C"}, {"A", "B", "C"});
}

Game build_fig5(double eta) {
  if (!(eta > 0.0 && eta < 0.5))
    throw std::invalid_argument("fig5 needs eta in (0, 1/2)");
  const double h = 0.5 - eta;
  // Only player 1's payoffs matter here; player 2's are identically zero.
  return make_game(3, 2,
                   {1, 0,
                    0, 1,
                    h, h},
                   {0, 0, 0, 0, 0, 0},
                   {"T", "C", "B"}, {"L", "R"});
}

Game build_matching_pennies() {
  return make_game(2, 2, {1, -1, -1, 1}, {-1, 1, 1, -1}, {"H", "T"},
                   {"H", "T"});
}

Game build_a2ex1() {
  return symmetric_game(3,
                        {0, 0, 0,
                         0, 0, 0,
                         -1, 0, 0},
                        {"A", "B", "C"});
}

Game build_a2ex2() {
  return make_game(2, 2,
                   {0, 0,
                    0, -1},
                   {0, 0, 0, 0},
                   {"T", "B"}, {"L", "R"});
}

}  // namespace

Game catalog_build(const std::string& name) {
  std::string base = name;
  std::string param;
  if (auto colon = name.find(':'); colon != std::string::npos) {
    base = name.substr(0, colon);
    param = name.substr(colon + 1);
  }
  auto need_param = [&]() {
    if (param.empty())
      throw std::invalid_argument("game '" + base + "' needs a parameter, e.g. " +
                                  base + ":0.25");
    try {
      return std::stod(param);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad parameter '" + param + "' for game '" +
                                  base + "'");
    }
  };
  if (!param.empty() && base != "fig3ii" && base != "fig5")
    throw std::invalid_argument("game '" + base + "' takes no parameter");

  if (base == "fig1") return build_fig1();
  if (base == "fig2") return build_fig2();
  if (base == "fig3i") return build_fig3i();
  if (base == "fig3ii") return build_fig3ii(need_param());
  if (base == "shapley" || base == "fig4") return build_shapley();
  if (base == "fig5") return build_fig5(need_param());
  if (base == "matching_pennies") return build_matching_pennies();
  if (base == "a2ex1") return build_a2ex1();
  if (base == "a2ex2") return build_a2ex2();
  throw std::invalid_argument("unknown game '" + name + "'");
}

std::vector<std::string> catalog_names() {
  return {"fig1",   "fig2", "fig3i", "fig3ii:<eps>",     "shapley",
          "fig5:<eta>", "matching_pennies", "a2ex1", "a2ex2"};
}

Game catalog_generate(GeneratedClass cls, int n1, int n2, std::uint64_t seed) {
  if (n1 < 1 || n2 < 1 || n1 > 12 || n2 > 12)
    throw std::invalid_argument("generated games support 1..12 actions per player");
  RngStream rng(seed, 0);
  const size_t cells = static_cast<size_t>(n1) * n2;
  std::vector<double> u1(cells), u2(cells);
  switch (cls) {
    case GeneratedClass::ZeroSum:
      for (size_t i = 0; i < cells; ++i) {
        u1[i] = rng.uniform(-1.0, 1.0);
        u2[i] = -u1[i];
      }
      break;
    case GeneratedClass::IdenticalInterest:
      for (size_t i = 0; i < cells; ++i) {
        u1[i] = rng.uniform(-1.0, 1.0);
        u2[i] = u1[i];
      }
      break;
    case GeneratedClass::WeightedPotential: {
      // u_i = w_i * P + d_i(a_{-i}): a common potential plus payoff shifts
      // that depend only on the opponent's action.
      std::vector<double> pot(cells);
      for (double& p : pot) p = rng.uniform(-1.0, 1.0);
      const double w1 = rng.uniform(0.5, 2.0);
      const double w2 = rng.uniform(0.5, 2.0);
      std::vector<double> d1(n2), d2(n1);
      for (double& d : d1) d = rng.uniform(-1.0, 1.0);
      for (double& d : d2) d = rng.uniform(-1.0, 1.0);
      for (int a = 0; a < n1; ++a)
        for (int b = 0; b < n2; ++b) {
          u1[a * n2 + b] = w1 * pot[a * n2 + b] + d1[b];
          u2[a * n2 + b] = w2 * pot[a * n2 + b] + d2[a];
        }
      break;
    }
  }
  return make_game(n1, n2, std::move(u1), std::move(u2));
}

}  // namespace regretlab
