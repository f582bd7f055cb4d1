#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "regretlab/continuous.hpp"
#include "regretlab/discrete.hpp"
#include "regretlab/game.hpp"

namespace regretlab {

// 64-bit FNV-1a content hash, reported as 16 hex digits.
std::uint64_t fnv1a(std::string_view bytes);
std::string fnv1a_hex(std::string_view bytes);

// Discrete trajectory CSV. One metadata comment line
//   # game=<ref> kind=<kind> t0=<t0> seed=<seed> stream=<stream>
// then a header row, then one data row per snapshot period:
//   t, a1, a2, r1max, r2max, b1_<label>.., b2_<label>.., z_<row>_<col>..
// Actions are those realized at that period (-1 at t0 and for expected play).
// The body is deterministic for a given (game, config, seed).
void write_trajectory_csv(std::ostream& out, const Game& g, const std::string& game_ref,
                          const Trajectory& traj);

// Breakpoint CSV for piecewise continuous runs: metadata line, header, then
//   t, piece, r1max, r2max, b1_<label>.., b2_<label>.., z_<row>_<col>..
// with `piece` the index of the piece starting at that row (-1 on the final
// row, which only closes the last piece).
void write_breakpoint_csv(std::ostream& out, const Game& g, const std::string& game_ref,
                          const ContinuousTrajectory& traj);

// Accepted-step CSV for the smooth dynamics: metadata line, header, then
//   t, step, r1max, r2max, b1_<label>.., b2_<label>.., z_<row>_<col>..
// with beliefs taken as the marginals of the joint state.
void write_ode_csv(std::ostream& out, const Game& g, const std::string& game_ref,
                   const OdeTrajectory& traj);

// Parsed CSV produced by the writers above.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;  // key, value
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a header column; throws std::invalid_argument when missing.
  int column(const std::string& name) const;
  // All columns whose names start with the prefix, in file order.
  std::vector<int> columns_with_prefix(const std::string& prefix) const;
  const std::string* find_metadata(const std::string& key) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

// Shortest decimal round-trip formatting used in all emitted artifacts.
std::string format_double(double v);

}  // namespace regretlab
