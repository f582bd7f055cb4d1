#include "regretlab/export.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace regretlab {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fnv1a_hex(std::string_view bytes) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a(bytes);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

namespace {

void write_metadata(std::ostream& out, const std::string& game_ref,
                    const std::string& kind, long t0, std::uint64_t seed,
                    std::uint64_t stream) {
  out << "# game=" << game_ref << " kind=" << kind << " t0=" << t0
      << " seed=" << seed << " stream=" << stream << "\n";
}

void write_state_header(std::ostream& out, const Game& g) {
  for (int k = 0; k < g.n1; ++k) out << ",b1_" << g.labels1[k];
  for (int k = 0; k < g.n2; ++k) out << ",b2_" << g.labels2[k];
  for (int a = 0; a < g.n1; ++a)
    for (int b = 0; b < g.n2; ++b) out << ",z_" << g.labels1[a] << "_" << g.labels2[b];
  out << "\n";
}

void write_state_cells(std::ostream& out, const Game& g, const MixedProfile& beliefs,
                       const JointDistribution& z) {
  for (int k = 0; k < g.n1; ++k) out << "," << format_double(beliefs.x1.w[k]);
  for (int k = 0; k < g.n2; ++k) out << "," << format_double(beliefs.x2.w[k]);
  for (int a = 0; a < g.n1; ++a)
    for (int b = 0; b < g.n2; ++b) out << "," << format_double(z.at(a, b));
  out << "\n";
}

const char* kind_name(DynamicsKind kind) {
  switch (kind) {
    case DynamicsKind::Stochastic: return "stochastic";
    case DynamicsKind::Expected: return "expected";
    case DynamicsKind::Dfp: return "dfp";
  }
  return "?";
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Game& g, const std::string& game_ref,
                          const Trajectory& traj) {
  if (traj.snapshots.empty())
    throw std::invalid_argument("trajectory has no snapshots to export");
  write_metadata(out, game_ref, kind_name(traj.kind), traj.t0, traj.seed,
                 traj.stream);
  out << "t,a1,a2,r1max,r2max";
  write_state_header(out, g);

  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const SimState& s = traj.snapshots[i];
    long t = traj.snapshot_periods[i];
    int a1 = -1, a2 = -1;
    if (t > traj.t0 && !traj.actions.empty()) {
      const auto& ab = traj.actions[static_cast<std::size_t>(t - traj.t0 - 1)];
      a1 = ab[0];
      a2 = ab[1];
    }
    out << t << "," << a1 << "," << a2 << "," << format_double(s.rmax(0)) << ","
        << format_double(s.rmax(1));
    write_state_cells(out, g, s.beliefs, s.z);
  }
}

void write_breakpoint_csv(std::ostream& out, const Game& g, const std::string& game_ref,
                          const ContinuousTrajectory& traj) {
  if (traj.times.empty())
    throw std::invalid_argument("trajectory has no breakpoints to export");
  write_metadata(out, game_ref, "cfp", 1, 0, 0);
  out << "t,piece,r1max,r2max";
  write_state_header(out, g);

  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    long piece = i + 1 < traj.times.size() ? static_cast<long>(i) : -1;
    out << format_double(traj.times[i]) << "," << piece << ","
        << format_double(traj.rmax[i][0]) << "," << format_double(traj.rmax[i][1]);
    write_state_cells(out, g, traj.x[i], traj.z[i]);
  }
}

void write_ode_csv(std::ostream& out, const Game& g, const std::string& game_ref,
                   const OdeTrajectory& traj) {
  if (traj.times.empty())
    throw std::invalid_argument("trajectory has no steps to export");
  write_metadata(out, game_ref, "cont_noregret", 1, 0, 0);
  out << "t,step,r1max,r2max";
  write_state_header(out, g);

  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out << format_double(traj.times[i]) << "," << i << ","
        << format_double(traj.rmax[i][0]) << "," << format_double(traj.rmax[i][1]);
    write_state_cells(out, g, marginals(traj.z[i]), traj.z[i]);
  }
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  throw std::invalid_argument("csv column not found: " + name);
}

std::vector<int> CsvTable::columns_with_prefix(const std::string& prefix) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i].rfind(prefix, 0) == 0) out.push_back(static_cast<int>(i));
  return out;
}

const std::string* CsvTable::find_metadata(const std::string& key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return &v;
  return nullptr;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream meta(line.substr(1));
      std::string tok;
      while (meta >> tok)
        if (auto eq = tok.find('='); eq != std::string::npos)
          table.metadata.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (!have_header) {
      table.header = cells;
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size())
      throw std::invalid_argument("csv row has " + std::to_string(cells.size()) +
                                  " cells, header has " +
                                  std::to_string(table.header.size()));
    std::vector<double> values;
    values.reserve(cells.size());
    for (const std::string& c : cells) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw std::invalid_argument("csv cell is not a number: '" + c + "'");
      }
    }
    table.rows.push_back(std::move(values));
  }
  if (!have_header) throw std::invalid_argument("csv has no header row");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open csv file: " + path);
  return read_csv(in);
}

}  // namespace regretlab
