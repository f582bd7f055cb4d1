#include "regretlab/config.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "regretlab/catalog.hpp"
#include "regretlab/game_io.hpp"

namespace regretlab {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: " + key + " expects an integer, got '" +
                                value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: " + key + " expects a number, got '" +
                                value + "'");
  }
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string section = "experiment";
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "experiment" && section != "strategy" && section != "analysis")
        throw std::invalid_argument("config: unknown section [" + section + "]");
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key or value");

    if (section == "experiment") {
      if (key == "name") cfg.name = value;
      else if (key == "game") cfg.game = value;
      else if (key == "kind") cfg.kind = value;
      else if (key == "T") cfg.T = parse_long(key, value);
      else if (key == "runs") cfg.runs = static_cast<int>(parse_long(key, value));
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(key, value));
      else if (key == "t0") cfg.t0 = parse_long(key, value);
      else if (key == "initial") cfg.initial = value;
      else if (key == "outdir") cfg.outdir = value;
      else if (key == "workers") cfg.workers = static_cast<int>(parse_long(key, value));
      else throw std::invalid_argument("config: unknown key '" + key +
                                       "' in [experiment]");
    } else if (section == "strategy") {
      if (key == "p1") cfg.strategy[0] = value;
      else if (key == "p2") cfg.strategy[1] = value;
      else throw std::invalid_argument("config: unknown key '" + key +
                                       "' in [strategy]");
    } else {  // analysis
      if (key == "run") cfg.analyses.push_back(value);
      else if (key == "tail_fraction") cfg.tail_fraction = parse_double(key, value);
      else if (key == "cluster_radius") cfg.cluster_radius = parse_double(key, value);
      else throw std::invalid_argument("config: unknown key '" + key +
                                       "' in [analysis]");
    }
  }

  if (cfg.game.empty()) throw std::invalid_argument("config: game is required");
  if (cfg.T < 1) throw std::invalid_argument("config: T must be >= 1");
  if (cfg.runs < 1) throw std::invalid_argument("config: runs must be >= 1");
  if (cfg.t0 < 1) throw std::invalid_argument("config: t0 must be >= 1");
  if (cfg.workers < 0) throw std::invalid_argument("config: workers must be >= 0");
  static const char* kinds[] = {"stochastic", "expected", "dfp", "cfp",
                                "cont_noregret"};
  if (std::find(std::begin(kinds), std::end(kinds), cfg.kind) == std::end(kinds))
    throw std::invalid_argument("config: unknown kind '" + cfg.kind + "'");
  for (const std::string& a : cfg.analyses)
    if (a != "hannan" && a != "perturbation" && a != "limit_set")
      throw std::invalid_argument("config: unknown analysis '" + a + "'");
  if (!(cfg.tail_fraction > 0.0 && cfg.tail_fraction < 1.0))
    throw std::invalid_argument("config: tail_fraction must be in (0, 1)");
  if (cfg.cluster_radius <= 0.0)
    throw std::invalid_argument("config: cluster_radius must be positive");
  if (cfg.initial != "random" && cfg.initial != "uniform" &&
      cfg.initial.rfind("pure:", 0) != 0)
    throw std::invalid_argument("config: initial must be random, uniform, or pure:<a>:<b>");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  return parse_config(in);
}

namespace {

Game resolve_generated(const std::string& ref) {
  // generate:<class>:<n1>x<n2>:<seed>
  std::istringstream in(ref);
  std::string verb, cls, dims, seed;
  std::getline(in, verb, ':');
  std::getline(in, cls, ':');
  std::getline(in, dims, ':');
  std::getline(in, seed);
  GeneratedClass c;
  if (cls == "zero_sum") c = GeneratedClass::ZeroSum;
  else if (cls == "identical_interest") c = GeneratedClass::IdenticalInterest;
  else if (cls == "weighted_potential") c = GeneratedClass::WeightedPotential;
  else throw std::invalid_argument("unknown generated class '" + cls + "'");
  auto x = dims.find('x');
  if (x == std::string::npos || seed.empty())
    throw std::invalid_argument(
        "generated game reference needs generate:<class>:<n1>x<n2>:<seed>");
  int n1 = static_cast<int>(parse_long("n1", dims.substr(0, x)));
  int n2 = static_cast<int>(parse_long("n2", dims.substr(x + 1)));
  return catalog_generate(c, n1, n2,
                          static_cast<std::uint64_t>(parse_long("seed", seed)));
}

}  // namespace

Game resolve_game(const std::string& ref) {
  if (ref.rfind("generate:", 0) == 0) return resolve_generated(ref);
  try {
    return catalog_build(ref);
  } catch (const std::invalid_argument& e) {
    // Parameter errors for known catalog names should surface as-is; only an
    // unrecognized name falls through to file lookup.
    if (std::string(e.what()).rfind("unknown game", 0) != 0) throw;
    try {
      return read_game_file(ref);
    } catch (const std::runtime_error&) {
      throw std::invalid_argument("'" + ref +
                                  "' is neither a catalog game nor a readable game file");
    }
  }
}

}  // namespace regretlab
