#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "regretlab/game.hpp"

namespace regretlab {

// Batch experiment description parsed from a flat key=value file with
// [section] headers ('#' starts a comment). Sections and keys:
//
//   [experiment]  name, game, kind, T, runs, seed, t0, initial, outdir, workers
//   [strategy]    p1, p2        (descriptors as in parse_strategy)
//   [analysis]    run (repeatable), tail_fraction, cluster_radius
//
// `game` is a catalog name or a path to a game file. `kind` is one of
// stochastic, expected, dfp, cfp, cont_noregret. `initial` is `random`
// (default), `uniform`, or `pure:<a>:<b>`. Unknown sections or keys are
// errors so configs stay diffable and typo-free.
struct ExperimentConfig {
  std::string name = "experiment";
  std::string game;
  std::string kind = "stochastic";
  long T = 1000;
  int runs = 1;
  std::uint64_t seed = 1;
  long t0 = 1;
  std::string initial = "random";
  std::string outdir = "out";
  int workers = 0;  // 0: use available parallelism
  std::array<std::string, 2> strategy{"rm", "rm"};
  std::vector<std::string> analyses;  // subset of {hannan, perturbation, limit_set}
  double tail_fraction = 0.5;
  double cluster_radius = 0.02;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

// Resolves a game reference: catalog name first, else a file path.
Game resolve_game(const std::string& ref);

}  // namespace regretlab
