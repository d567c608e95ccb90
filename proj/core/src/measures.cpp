#include "taxarb/measures.hpp"

#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>

#include "taxarb/arbitrage.hpp"
#include "taxarb/gains.hpp"

namespace taxarb {

namespace {

// Total weight reaching each node, leaves upward.
std::vector<Rational> node_masses(const ScenarioTree& tree,
                                  const SeparatingMeasure& measure) {
  std::vector<Rational> mass(tree.size(), rat(0));
  for (int v = tree.size() - 1; v >= 0; --v) {
    const TreeNode& node = tree.node(v);
    if (node.children.empty()) {
      mass[v] = measure.weights.at(v);
      continue;
    }
    for (int c : node.children) mass[v] += mass[c];
  }
  return mass;
}

long long stopping_cap() {
  const char* raw = std::getenv("TAXARB_STOPPING_CAP");
  if (!raw) return 100000;
  char* end = nullptr;
  long long parsed = std::strtoll(raw, &end, 10);
  if (end == raw || *end != '\0' || parsed <= 0) return 100000;
  return parsed;
}

void require_measure(const TaxMarket& market, const SeparatingMeasure& measure) {
  require_valid(market);
  if (auto defect = measure_violation(market, measure)) {
    throw std::invalid_argument(*defect);
  }
}

}  // namespace

std::optional<std::string> measure_violation(const TaxMarket& market,
                                             const SeparatingMeasure& measure) {
  const auto& leaves = market.tree.leaves();
  if (measure.weights.size() != leaves.size()) {
    return "weights do not cover every leaf";
  }
  Rational total = 0;
  for (int leaf : leaves) {
    auto it = measure.weights.find(leaf);
    if (it == measure.weights.end()) {
      return "no weight for leaf " + std::to_string(market.tree.node(leaf).id);
    }
    if (it->second <= 0) {
      return "weight at leaf " + std::to_string(market.tree.node(leaf).id) +
             " must be positive";
    }
    total += it->second;
  }
  if (total != 1) return "weights must sum to one";
  return std::nullopt;
}

Rational measure_expectation(const SeparatingMeasure& measure,
                             const std::map<int, Rational>& leaf_values) {
  Rational total = 0;
  for (const auto& [leaf, weight] : measure.weights) {
    auto it = leaf_values.find(leaf);
    if (it != leaf_values.end()) total += weight * it->second;
  }
  return total;
}

std::optional<SeparatingMeasure> find_separating_measure(const TaxMarket& market) {
  ArbitrageVerdict verdict = check_na(market);
  if (verdict.status == ArbitrageStatus::arbitrage) return std::nullopt;
  SeparatingMeasure measure;
  Rational total = 0;
  for (int leaf : market.tree.leaves()) {
    Rational blended =
        path_probability(market.tree, leaf) + verdict.dual_weights.at(leaf);
    measure.weights[leaf] = blended;
    total += blended;
  }
  for (auto& [leaf, weight] : measure.weights) weight /= total;
  return measure;
}

StoppingCheck verify_stopping_constraints(const TaxMarket& market,
                                          const SeparatingMeasure& measure) {
  require_measure(market, measure);
  const ScenarioTree& tree = market.tree;
  GainMatrix gains = gain_matrix(market);
  std::vector<Rational> mass = node_masses(tree, measure);
  const mpz_class cap(static_cast<long>(stopping_cap()));

  // Number of stopping rules per subtree: stop here, or pick a rule in
  // every child subtree.
  std::vector<mpz_class> ways(tree.size());
  for (int v = tree.size() - 1; v >= 0; --v) {
    const TreeNode& node = tree.node(v);
    if (node.children.empty()) {
      ways[v] = 1;
      continue;
    }
    mpz_class product = 1;
    for (int c : node.children) product *= ways[c];
    ways[v] = 1 + product;
  }

  StoppingCheck result;
  for (int start = 0; start <= tree.horizon; ++start) {
    const std::vector<int>& roots = tree.at_time(start);
    mpz_class count = 1;
    for (int v : roots) count *= ways[v];
    if (count > cap) {
      throw std::runtime_error("tree too large for exhaustive verification");
    }

    std::map<int, bool> labels;
    Rational running = 0;
    bool found = false;

    std::function<void(int, const std::function<void()>&)> subtree =
        [&](int v, const std::function<void()>& next) {
          if (found) return;
          const TreeNode& node = tree.node(v);
          Rational gain = node.time == start ? rat(0) : gains.at(start, v);
          labels[v] = true;
          running += mass[v] * gain;
          next();
          if (found) return;
          running -= mass[v] * gain;
          if (!node.children.empty()) {
            labels[v] = false;
            std::function<void(size_t)> chain = [&](size_t idx) {
              if (found) return;
              if (idx == node.children.size()) {
                next();
                return;
              }
              subtree(node.children[idx], [&] { chain(idx + 1); });
            };
            chain(0);
            if (found) return;
          }
          labels.erase(v);
        };

    std::function<void(size_t)> per_root = [&](size_t idx) {
      if (found) return;
      if (idx == roots.size()) {
        if (running > 0) {
          found = true;
          result.ok = false;
          result.witness = StoppingTime{start, labels};
          result.expectation = running;
        }
        return;
      }
      subtree(roots[idx], [&] { per_root(idx + 1); });
    };
    per_root(0);
    if (found) return result;
  }
  return result;
}

SnellEnvelope snell_martingale_part(const TaxMarket& market,
                                    const SeparatingMeasure& measure, int start) {
  require_measure(market, measure);
  const ScenarioTree& tree = market.tree;
  if (start < 0 || start > tree.horizon) {
    throw std::domain_error("start outside 0..horizon");
  }
  GainMatrix gains = gain_matrix(market);
  std::vector<Rational> mass = node_masses(tree, measure);

  SnellEnvelope env;
  env.start = start;
  auto payoff = [&](int v) -> Rational {
    return tree.node(v).time == start ? rat(0) : gains.at(start, v);
  };
  auto conditional = [&](int v) -> Rational {
    Rational total = 0;
    for (int c : tree.node(v).children) total += mass[c] * env.envelope.at(c);
    return total / mass[v];
  };

  for (int t = tree.horizon; t >= start; --t) {
    for (int v : tree.at_time(t)) {
      if (t == tree.horizon) {
        env.envelope[v] = payoff(v);
        continue;
      }
      Rational cond = conditional(v);
      Rational gain = payoff(v);
      env.envelope[v] = gain > cond ? gain : cond;
    }
  }

  for (int v : tree.at_time(start)) env.martingale[v] = rat(0);
  for (int t = start; t < tree.horizon; ++t) {
    for (int v : tree.at_time(t)) {
      Rational cond = conditional(v);
      for (int c : tree.node(v).children) {
        env.martingale[c] = env.martingale.at(v) + env.envelope.at(c) - cond;
      }
    }
  }
  return env;
}

std::vector<std::string> snell_violations(const TaxMarket& market,
                                          const SeparatingMeasure& measure,
                                          const SnellEnvelope& env) {
  require_measure(market, measure);
  const ScenarioTree& tree = market.tree;
  std::vector<std::string> findings;
  if (env.start < 0 || env.start > tree.horizon) {
    findings.push_back("start outside 0..horizon");
    return findings;
  }
  GainMatrix gains = gain_matrix(market);
  std::vector<Rational> mass = node_masses(tree, measure);

  auto look = [](const std::map<int, Rational>& values, int v) -> const Rational* {
    auto it = values.find(v);
    return it == values.end() ? nullptr : &it->second;
  };
  auto name = [&](int v) { return std::to_string(tree.node(v).id); };
  auto payoff = [&](int v) -> Rational {
    return tree.node(v).time == env.start ? rat(0) : gains.at(env.start, v);
  };

  for (int t = env.start; t <= tree.horizon; ++t) {
    for (int v : tree.at_time(t)) {
      const Rational* upper = look(env.envelope, v);
      const Rational* part = look(env.martingale, v);
      if (!upper) findings.push_back("envelope misses node " + name(v));
      if (!part) findings.push_back("martingale part misses node " + name(v));
      if (!upper || !part) continue;

      if (t == tree.horizon) {
        if (*upper != payoff(v)) {
          findings.push_back("terminal value differs from the lot gain at node " +
                             name(v));
        }
      } else {
        Rational cond = 0;
        bool covered = true;
        for (int c : tree.node(v).children) {
          const Rational* child = look(env.envelope, c);
          if (!child) {
            covered = false;
            break;
          }
          cond += mass[c] * *child;
        }
        if (covered) {
          cond /= mass[v];
          Rational gain = payoff(v);
          Rational expected = gain > cond ? gain : cond;
          if (*upper != expected) {
            findings.push_back("recursion broken at node " + name(v));
          }
          Rational drift = 0;
          bool part_covered = true;
          for (int c : tree.node(v).children) {
            const Rational* child = look(env.martingale, c);
            if (!child) {
              part_covered = false;
              break;
            }
            drift += mass[c] * *child;
          }
          if (part_covered && drift / mass[v] != *part) {
            findings.push_back("martingale increments drift at node " + name(v));
          }
        }
      }

      if (t == env.start && *part != 0) {
        findings.push_back("martingale part not zero at its start node " + name(v));
      }
      if (t > env.start && *part < payoff(v)) {
        findings.push_back("martingale part below the payoff at node " + name(v));
      }
    }
  }
  return findings;
}

}  // namespace taxarb
