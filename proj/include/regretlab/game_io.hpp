#pragma once

#include <iosfwd>
#include <string>

#include "regretlab/game.hpp"

namespace regretlab {

// Text format: first line "R C", then R*C payoff entries for player 1 in
// row-major order, then R*C entries for player 2. Entries are whitespace
// separated and may be plain decimals or arithmetic expressions without
// spaces, e.g. sqrt(2) or 1/(1+sqrt(2)). Lines starting with '#' are skipped.
Game read_game(std::istream& in);
Game read_game_file(const std::string& path);
void write_game(std::ostream& out, const Game& g);

// Evaluates one entry expression: numbers, + - * /, parentheses, sqrt().
double eval_entry(const std::string& text);

}  // namespace regretlab
