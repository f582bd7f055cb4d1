#include "regretlab/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "regretlab/rng.hpp"

namespace regretlab {

namespace {

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// (sum_k [x_k]+^p)^(1/p), factored by the largest positive component so
// intermediate powers never overflow or flush to zero for large p.
double lp_value(double p, const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, v);
  if (m <= 0.0) return 0.0;
  double s = 0.0;
  for (double v : x)
    if (v > 0.0) s += std::pow(v / m, p);
  return m * std::pow(s, 1.0 / p);
}

// grad_k = ([x_k]+ / P)^(p-1); the ratio lies in [0,1].
std::vector<double> lp_gradient(double p, const std::vector<double>& x) {
  std::vector<double> g(x.size(), 0.0);
  const double P = lp_value(p, x);
  if (P <= 0.0) return g;
  for (size_t k = 0; k < x.size(); ++k)
    if (x[k] > 0.0) g[k] = std::pow(x[k] / P, p - 1.0);
  return g;
}

}  // namespace

PotentialSpec PotentialSpec::lp_norm(double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("lp potential needs p > 1");
  PotentialSpec s;
  s.kind = Kind::LpNorm;
  s.p = p;
  s.rho2 = 1.0;
  return s;
}

PotentialSpec PotentialSpec::custom(
    std::function<double(const std::vector<double>&)> value,
    std::function<std::vector<double>(const std::vector<double>&)> gradient,
    double rho2) {
  if (!value || !gradient)
    throw std::invalid_argument("custom potential needs both evaluators");
  if (!(rho2 > 0.0))
    throw std::invalid_argument("custom potential needs rho2 > 0");
  PotentialSpec s;
  s.kind = Kind::Custom;
  s.value = std::move(value);
  s.gradient = std::move(gradient);
  s.rho2 = rho2;
  return s;
}

double potential_value(const PotentialSpec& spec, const std::vector<double>& x) {
  return spec.kind == PotentialSpec::Kind::LpNorm ? lp_value(spec.p, x)
                                                  : spec.value(x);
}

std::vector<double> potential_gradient(const PotentialSpec& spec,
                                       const std::vector<double>& x) {
  return spec.kind == PotentialSpec::Kind::LpNorm ? lp_gradient(spec.p, x)
                                                  : spec.gradient(x);
}

MixedAction q1_action(const PotentialSpec& spec, const RegretVector& r) {
  std::vector<double> w;
  if (spec.kind == PotentialSpec::Kind::LpNorm) {
    // Proportional to [r_k]+^(p-1); normalize by the largest positive regret
    // so the weights survive p in the hundreds.
    double m = 0.0;
    for (double v : r.v) m = std::max(m, v);
    w.assign(r.v.size(), 0.0);
    if (m > 0.0)
      for (size_t k = 0; k < w.size(); ++k)
        if (r.v[k] > 0.0) w[k] = std::pow(r.v[k] / m, spec.p - 1.0);
  } else {
    w = spec.gradient(r.v);
  }
  double norm = 0.0;
  for (double v : w) norm += v;
  if (!(norm >= 1e-300))
    throw ZeroGradient("gradient rule has no direction: normalizer " +
                       std::to_string(norm));
  MixedAction q;
  q.w.resize(w.size());
  for (size_t k = 0; k < w.size(); ++k) q.w[k] = w[k] / norm;
  return q;
}

MixedAction regret_matching(const RegretVector& r) {
  static const PotentialSpec l2 = PotentialSpec::lp_norm(2.0);
  return q1_action(l2, r);
}

MixedAction exp_weights_action(const Game& g, int player,
                               const MixedAction& opp_belief, double beta) {
  if (!(beta >= 0.0))
    throw std::invalid_argument("exp weights needs beta >= 0");
  const int n = g.actions(player);
  std::vector<double> score(n);
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    score[k] = beta * action_payoff(g, player, k, opp_belief);
    best = std::max(best, score[k]);
  }
  MixedAction q;
  q.w.resize(n);
  double norm = 0.0;
  for (int k = 0; k < n; ++k) {
    q.w[k] = std::exp(score[k] - best);
    norm += q.w[k];
  }
  for (double& v : q.w) v /= norm;
  return q;
}

MixedAction next_action(const PotentialSpec& spec, const FallbackPolicy& fallback,
                        const RegretVector& r, const Game& g, int player,
                        const MixedAction& opp_belief) {
  if (r.max() > 0.0) return q1_action(spec, r);
  if (fallback.kind == FallbackPolicy::Kind::ConstantAction) {
    if (fallback.constant_action < 0 ||
        fallback.constant_action >= g.actions(player))
      throw std::invalid_argument("fallback action out of range");
    return pure_mixed(g.actions(player), fallback.constant_action);
  }
  BestReplySet br = best_replies(g, player, opp_belief);
  return pure_mixed(g.actions(player), br.actions.front());
}

PotentialCheck validate_potential(const PotentialSpec& spec, int dims,
                                  double payoff_bound, int samples,
                                  std::uint64_t seed) {
  if (dims < 1 || samples < 1 || !(payoff_bound > 0.0))
    throw std::invalid_argument("validate_potential: bad arguments");
  RngStream rng(seed, 0);
  const double range = 2.0 * payoff_bound;
  PotentialCheck out;
  auto fail = [&](const std::string& cond, const std::vector<double>& x) {
    out.passed = false;
    out.failed_condition = cond;
    out.counterexample = x;
  };

  for (int s = 0; s < samples && out.passed; ++s) {
    std::vector<double> x(dims);
    bool near_kink = false;
    for (double& v : x) {
      v = rng.uniform(-range, range);
      near_kink = near_kink || std::abs(v) <= 1e-9;
    }
    if (near_kink) continue;
    bool off_orthant = false;
    for (double v : x) off_orthant = off_orthant || v > 0.0;

    const double P = potential_value(spec, x);
    if (P < -1e-12 || !std::isfinite(P)) {
      fail("nonnegative value", x);
      break;
    }
    if (!off_orthant && P > 1e-12) {
      fail("zero on nonpositive orthant", x);
      break;
    }
    if (off_orthant && !(P > 1e-12)) {
      fail("positive off the orthant", x);
      break;
    }
    std::vector<double> grad = potential_gradient(spec, x);
    if (static_cast<int>(grad.size()) != dims) {
      fail("gradient dimension", x);
      break;
    }
    double dot = 0.0;
    for (int k = 0; k < dims; ++k) {
      if (grad[k] < -1e-12 || !std::isfinite(grad[k])) {
        fail("monotone gradient", x);
        break;
      }
      if (x[k] < 0.0 && std::abs(grad[k]) > 1e-12) {
        fail("inactive coordinates", x);
        break;
      }
      dot += grad[k] * x[k];
    }
    if (!out.passed) break;
    if (off_orthant && !(dot > 0.0)) {
      fail("positive drift off the orthant", x);
      break;
    }
    if (dot > spec.rho2 * P + 1e-9 * std::max(1.0, std::abs(P))) {
      fail("rho2 growth bound", x);
      break;
    }
  }
  return out;
}

Strategy parse_strategy(const std::string& descriptor) {
  Strategy s;
  s.descriptor = descriptor;
  auto param_after = [&](size_t prefix_len) {
    try {
      return std::stod(descriptor.substr(prefix_len));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad strategy descriptor '" + descriptor + "'");
    }
  };
  if (descriptor == "rm") {
    s.kind = Strategy::Kind::Potential;
    s.potential = PotentialSpec::lp_norm(2.0);
  } else if (descriptor.rfind("lp:", 0) == 0) {
    s.kind = Strategy::Kind::Potential;
    s.potential = PotentialSpec::lp_norm(param_after(3));
  } else if (descriptor.rfind("expw:", 0) == 0) {
    s.kind = Strategy::Kind::ExpWeights;
    s.alpha = param_after(5);
    if (!(s.alpha > 0.0 && s.alpha < 1.0))
      throw std::invalid_argument("expw needs alpha in (0,1)");
  } else if (descriptor == "fp") {
    s.kind = Strategy::Kind::FictitiousPlay;
  } else {
    throw std::invalid_argument("unknown strategy descriptor '" + descriptor + "'");
  }
  return s;
}

}  // namespace regretlab
