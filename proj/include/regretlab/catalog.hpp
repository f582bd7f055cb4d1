#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regretlab/game.hpp"

namespace regretlab {

// Named example games. Parameterized names carry the parameter after a colon:
//   fig3ii:<eps>   eps >= 0
//   fig5:<eta>     0 < eta < 1/2
// Plain names: fig1, fig2, fig3i, shapley, matching_pennies, a2ex1, a2ex2.
Game catalog_build(const std::string& name);
std::vector<std::string> catalog_names();

enum class GeneratedClass { ZeroSum, IdenticalInterest, WeightedPotential };

// Random game families for property tests; dims capped at 12 per player.
Game catalog_generate(GeneratedClass cls, int n1, int n2, std::uint64_t seed);

}  // namespace regretlab
