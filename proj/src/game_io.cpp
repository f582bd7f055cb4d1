#include "regretlab/game_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace regretlab {

namespace {

// Recursive-descent evaluator for payoff entries.
struct EntryParser {
  const std::string& s;
  size_t pos = 0;

  explicit EntryParser(const std::string& text) : s(text) {}

  char peek() const { return pos < s.size() ? s[pos] : '\0'; }
  char take() { return s[pos++]; }

  double parse_expr() {
    double v = parse_term();
    while (peek() == '+' || peek() == '-') {
      char op = take();
      double rhs = parse_term();
      v = op == '+' ? v + rhs : v - rhs;
    }
    return v;
  }

  double parse_term() {
    double v = parse_factor();
    while (peek() == '*' || peek() == '/') {
      char op = take();
      double rhs = parse_factor();
      v = op == '*' ? v * rhs : v / rhs;
    }
    return v;
  }

  double parse_factor() {
    if (peek() == '-') {
      take();
      return -parse_factor();
    }
    if (peek() == '+') {
      take();
      return parse_factor();
    }
    if (peek() == '(') {
      take();
      double v = parse_expr();
      expect(')');
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(peek()))) {
      std::string name;
      while (std::isalpha(static_cast<unsigned char>(peek()))) name += take();
      if (name != "sqrt")
        throw std::invalid_argument("unknown function '" + name + "' in payoff entry");
      expect('(');
      double v = parse_expr();
      expect(')');
      return std::sqrt(v);
    }
    return parse_number();
  }

  double parse_number() {
    size_t start = pos;
    while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')
      ++pos;
    if (peek() == 'e' || peek() == 'E') {
      ++pos;
      if (peek() == '+' || peek() == '-') ++pos;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos;
    }
    if (pos == start)
      throw std::invalid_argument("bad payoff entry '" + s + "'");
    return std::stod(s.substr(start, pos - start));
  }

  void expect(char c) {
    if (peek() != c)
      throw std::invalid_argument("expected '" + std::string(1, c) +
                                  "' in payoff entry '" + s + "'");
    take();
  }
};

}  // namespace

double eval_entry(const std::string& text) {
  EntryParser p(text);
  double v = p.parse_expr();
  if (p.pos != text.size())
    throw std::invalid_argument("trailing characters in payoff entry '" + text + "'");
  if (!std::isfinite(v))
    throw std::invalid_argument("payoff entry '" + text + "' is not finite");
  return v;
}

Game read_game(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      if (tok[0] == '#') break;
      tokens.push_back(tok);
    }
  }
  if (tokens.size() < 2) throw std::invalid_argument("truncated game file");
  int n1 = 0, n2 = 0;
  try {
    n1 = std::stoi(tokens[0]);
    n2 = std::stoi(tokens[1]);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad game dimensions");
  }
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("bad game dimensions");
  const size_t cells = static_cast<size_t>(n1) * n2;
  if (tokens.size() != 2 + 2 * cells)
    throw std::invalid_argument("game file has " +
                                std::to_string(tokens.size() - 2) +
                                " entries, expected " + std::to_string(2 * cells));
  std::vector<double> u1(cells), u2(cells);
  for (size_t i = 0; i < cells; ++i) u1[i] = eval_entry(tokens[2 + i]);
  for (size_t i = 0; i < cells; ++i) u2[i] = eval_entry(tokens[2 + cells + i]);
  return make_game(n1, n2, std::move(u1), std::move(u2));
}

Game read_game_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open game file '" + path + "'");
  return read_game(in);
}

void write_game(std::ostream& out, const Game& g) {
  out << g.n1 << ' ' << g.n2 << '\n';
  out.precision(17);
  for (const std::vector<double>* u : {&g.u1, &g.u2}) {
    for (int a = 0; a < g.n1; ++a) {
      for (int b = 0; b < g.n2; ++b) {
        if (b) out << ' ';
        out << (*u)[a * g.n2 + b];
      }
      out << '\n';
    }
  }
}

}  // namespace regretlab
