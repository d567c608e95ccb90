#include "taxarb/gains.hpp"

#include <stdexcept>

namespace taxarb {

namespace {

// S_t / S_{t-1} across the splice period, with 0/0 read as 0.
Rational price_ratio(const TaxMarket& market, int node) {
  const TreeNode& n = market.tree.node(node);
  const Rational& prev = market.price[n.parent];
  const Rational& cur = market.price[node];
  if (prev == 0) {
    if (cur == 0) return rat(0);
    throw std::domain_error("absorbing-zero violated");
  }
  return cur / prev;
}

}  // namespace

Rational lot_gain(const TaxMarket& market, int s, int node) {
  const int u = market.tree.node(node).time;
  if (s < 0 || s >= u) {
    throw std::invalid_argument("lot gain needs purchase strictly before sale");
  }
  const Rational g = after_tax_growth(market);
  const Rational& su = market.price[node];
  const Rational& ss = market.price[market.tree.ancestor_at(node, s)];
  const int horizon = market.tree.horizon;
  return (su - market.tax * (su - ss)) * rational_pow(g, horizon - u) -
         ss * rational_pow(g, horizon - s);
}

GainMatrix gain_matrix(const TaxMarket& market) {
  GainMatrix out;
  out.rows.resize(market.tree.size());
  for (int node = 0; node < market.tree.size(); ++node) {
    const int u = market.tree.node(node).time;
    out.rows[node].reserve(u);
    for (int s = 0; s < u; ++s) {
      out.rows[node].push_back(lot_gain(market, s, node));
    }
  }
  return out;
}

std::optional<std::string> strategy_violation(const TaxMarket& market,
                                              const Strategy& strategy) {
  const ScenarioTree& tree = market.tree;
  const int horizon = tree.horizon;

  for (const auto& [node, amount] : strategy.buys) {
    if (node < 0 || node >= tree.size()) {
      return "purchase at a nonexistent node";
    }
    if (amount < 0) {
      return "negative purchase at node " + std::to_string(tree.node(node).id);
    }
    if (tree.node(node).time >= horizon) {
      return "purchase at the horizon at node " +
             std::to_string(tree.node(node).id);
    }
  }
  for (const auto& [key, amount] : strategy.sells) {
    const auto& [s, node] = key;
    if (node < 0 || node >= tree.size()) {
      return "sale at a nonexistent node";
    }
    if (amount < 0) {
      return "negative sale at node " + std::to_string(tree.node(node).id);
    }
    if (s < 0 || s >= tree.node(node).time) {
      return "sale of the date-" + std::to_string(s) + " lot at node " +
             std::to_string(tree.node(node).id) +
             " dated at or before its purchase";
    }
  }

  for (int leaf : tree.leaves()) {
    for (int s = 0; s < horizon; ++s) {
      Rational bought = 0;
      if (auto it = strategy.buys.find(tree.ancestor_at(leaf, s));
          it != strategy.buys.end()) {
        bought = it->second;
      }
      Rational sold = 0;
      for (int u = s + 1; u <= horizon; ++u) {
        if (auto it = strategy.sells.find({s, tree.ancestor_at(leaf, u)});
            it != strategy.sells.end()) {
          sold += it->second;
        }
      }
      if (bought != sold) {
        return "date-" + std::to_string(s) +
               " lot is not exactly liquidated on the path to leaf " +
               std::to_string(tree.node(leaf).id) + " (bought " +
               format_rational(bought) + ", sold " + format_rational(sold) +
               ")";
      }
    }
  }
  return std::nullopt;
}

std::map<int, Rational> liquidation_value(const TaxMarket& market,
                                          const Strategy& strategy) {
  const ScenarioTree& tree = market.tree;
  std::map<int, Rational> value;
  for (int leaf : tree.leaves()) value[leaf] = 0;
  for (const auto& [key, amount] : strategy.sells) {
    if (amount == 0) continue;
    const auto& [s, node] = key;
    const Rational gain = lot_gain(market, s, node);
    for (int leaf : descendant_leaves(tree, node)) {
      value[leaf] += amount * gain;
    }
  }
  return value;
}

std::map<int, Rational> wealth_recursion(const TaxMarket& market,
                                         const Strategy& strategy) {
  const ScenarioTree& tree = market.tree;
  const Rational g = after_tax_growth(market);
  std::map<int, Rational> eta;

  auto buy_amount = [&](int node) -> Rational {
    auto it = strategy.buys.find(node);
    return it == strategy.buys.end() ? rat(0) : it->second;
  };

  for (int node = 0; node < tree.size(); ++node) {
    const TreeNode& n = tree.node(node);
    Rational wealth = n.parent < 0 ? rat(0) : g * eta[n.parent];
    wealth -= buy_amount(node) * market.price[node];
    for (int s = 0; s < n.time; ++s) {
      auto it = strategy.sells.find({s, node});
      if (it == strategy.sells.end() || it->second == 0) continue;
      const Rational& su = market.price[node];
      const Rational& ss = market.price[tree.ancestor_at(node, s)];
      wealth += it->second * (su - market.tax * (su - ss));
    }
    eta[node] = wealth;
  }
  return eta;
}

std::optional<std::string> reduced_market_violation(const ReducedMarket& reduced) {
  const TaxMarket& base = reduced.base;
  const int t = reduced.eliminated;
  if (t < 1 || t > base.tree.horizon) {
    return "eliminated period outside 1..horizon";
  }
  if (base.price.size() != base.tree.nodes.size()) {
    return "price map does not cover every node";
  }
  if (base.rate <= 0) return "interest rate must be positive";
  if (base.tax < 0 || base.tax >= 1) return "tax rate out of range";

  for (int node = 0; node < base.tree.size(); ++node) {
    if (base.tree.node(node).time == t) continue;
    if (base.price[node] < 0) {
      return "negative price at node " +
             std::to_string(base.tree.node(node).id);
    }
  }
  // Zero prices must stay absorbed along the reduced time domain, where
  // the step before the gap jumps two periods.
  for (int node = 0; node < base.tree.size(); ++node) {
    const TreeNode& n = base.tree.node(node);
    if (n.parent < 0 || n.time == t) continue;
    const int prev =
        n.time == t + 1 ? base.tree.node(n.parent).parent : n.parent;
    if (base.price[prev] == 0 && base.price[node] > 0) {
      return "zero price followed by positive price at node " +
             std::to_string(n.id);
    }
  }
  return std::nullopt;
}

Rational reduced_lot_gain(const ReducedMarket& reduced, int s, int node) {
  const TaxMarket& base = reduced.base;
  const int t = reduced.eliminated;
  const int u = base.tree.node(node).time;
  if (u == t || s == t) {
    throw std::invalid_argument("lot gain dated at the eliminated period");
  }
  if (s < 0 || s >= u) {
    throw std::invalid_argument("lot gain needs purchase strictly before sale");
  }
  const Rational g = after_tax_growth(base);
  const int horizon = base.tree.horizon;
  auto exponent = [&](int v) { return horizon - v - (v <= t - 1 ? 1 : 0); };
  const Rational& su = base.price[node];
  const Rational& ss = base.price[base.tree.ancestor_at(node, s)];
  return (su - base.tax * (su - ss)) * rational_pow(g, exponent(u)) -
         ss * rational_pow(g, exponent(s));
}

namespace {

// Decodes a reduced sell key to the lot's actual sale date, validating
// the attachment rule. Returns nullopt and fills `problem` on violation.
std::optional<int> reduced_sale_date(const ReducedMarket& reduced, int s,
                                     int node, std::string* problem) {
  const ScenarioTree& tree = reduced.base.tree;
  const int t = reduced.eliminated;
  const int horizon = tree.horizon;
  const int attach = tree.node(node).time;
  const std::string where = " at node " + std::to_string(tree.node(node).id);

  if (s == t) {
    *problem = "sale of a lot dated at the eliminated period" + where;
    return std::nullopt;
  }
  if (t == horizon) {
    if (attach >= horizon) {
      *problem = "sale dated at the eliminated horizon" + where;
      return std::nullopt;
    }
    if (s >= attach) {
      *problem = "sale dated at or before its purchase" + where;
      return std::nullopt;
    }
    return attach;
  }
  if (attach == t) {
    // Date-(t-1) sale decided with time-t information.
    if (s > t - 2) {
      *problem = "pre-gap sale of a lot not bought before the gap" + where;
      return std::nullopt;
    }
    return t - 1;
  }
  if (attach == t + 1) {
    // Amount carried across the gap and sold on the far side.
    if (s > t - 1) {
      *problem = "gap sale of a lot not bought before the gap" + where;
      return std::nullopt;
    }
    return t + 1;
  }
  if (attach == t - 1) {
    *problem = "pre-gap sale must attach to nodes at the eliminated time" + where;
    return std::nullopt;
  }
  if (s >= attach) {
    *problem = "sale dated at or before its purchase" + where;
    return std::nullopt;
  }
  return attach;
}

}  // namespace

std::optional<std::string> reduced_strategy_violation(
    const ReducedMarket& reduced, const ReducedStrategy& strategy) {
  const ScenarioTree& tree = reduced.base.tree;
  const int t = reduced.eliminated;
  const int horizon = tree.horizon;

  for (const auto& [node, amount] : strategy.buys) {
    if (node < 0 || node >= tree.size()) {
      return "purchase at a nonexistent node";
    }
    const int at = tree.node(node).time;
    const std::string where = " at node " + std::to_string(tree.node(node).id);
    if (amount < 0) return "negative purchase" + where;
    if (t == horizon) {
      if (at >= horizon - 1) {
        return "purchase too late to liquidate before the eliminated horizon" +
               where;
      }
      continue;
    }
    if (at == t - 1) {
      return "pre-gap purchase must attach to nodes at the eliminated time" +
             where;
    }
    if (at == horizon) return "purchase at the horizon" + where;
  }

  for (const auto& [key, amount] : strategy.sells) {
    const auto& [s, node] = key;
    if (node < 0 || node >= tree.size()) return "sale at a nonexistent node";
    if (amount < 0) {
      return "negative sale at node " + std::to_string(tree.node(node).id);
    }
    std::string problem;
    if (!reduced_sale_date(reduced, s, node, &problem)) return problem;
  }

  // Trading dates on the reduced domain, with the date just before the gap
  // attached to eliminated-time nodes.
  auto buy_node_for = [&](int s, int leaf) {
    if (t < horizon && s == t - 1) return tree.ancestor_at(leaf, t);
    return tree.ancestor_at(leaf, s);
  };

  const int last_buy = t == horizon ? horizon - 2 : horizon - 1;
  for (int leaf : tree.leaves()) {
    for (int s = 0; s <= last_buy; ++s) {
      if (s == t) continue;
      Rational bought = 0;
      if (auto it = strategy.buys.find(buy_node_for(s, leaf));
          it != strategy.buys.end()) {
        bought = it->second;
      }
      Rational sold = 0;
      for (int attach = s + 1; attach <= horizon; ++attach) {
        auto it = strategy.sells.find({s, tree.ancestor_at(leaf, attach)});
        if (it != strategy.sells.end()) sold += it->second;
      }
      if (bought != sold) {
        return "date-" + std::to_string(s) +
               " lot is not exactly liquidated on the path to leaf " +
               std::to_string(tree.node(leaf).id) + " (bought " +
               format_rational(bought) + ", sold " + format_rational(sold) +
               ")";
      }
    }
  }
  return std::nullopt;
}

std::map<int, Rational> reduced_liquidation_value(
    const ReducedMarket& reduced, const ReducedStrategy& strategy) {
  const ScenarioTree& tree = reduced.base.tree;
  const int t = reduced.eliminated;
  std::map<int, Rational> value;
  for (int leaf : tree.leaves()) value[leaf] = 0;

  for (const auto& [key, amount] : strategy.sells) {
    if (amount == 0) continue;
    const auto& [s, node] = key;
    std::string problem;
    auto date = reduced_sale_date(reduced, s, node, &problem);
    if (!date) throw std::invalid_argument(problem);
    // A pre-gap sale attached to a time-t node is priced one period
    // earlier, at the time-(t-1) ancestor.
    const int priced_at =
        tree.node(node).time == *date ? node : tree.ancestor_at(node, *date);
    const Rational gain = reduced_lot_gain(reduced, s, priced_at);
    for (int leaf : descendant_leaves(tree, node)) {
      value[leaf] += amount * gain;
    }
  }
  return value;
}

TaxMarket paste_process(const TaxMarket& hat, const TaxMarket& base, int t) {
  if (hat.tree.size() != base.tree.size() ||
      hat.tree.horizon != base.tree.horizon) {
    throw std::invalid_argument("paste requires matching trees");
  }
  for (int i = 0; i < hat.tree.size(); ++i) {
    if (hat.tree.node(i).time != base.tree.node(i).time ||
        hat.tree.node(i).parent != base.tree.node(i).parent) {
      throw std::invalid_argument("paste requires matching trees");
    }
  }
  if (t < 1 || t > base.tree.horizon) {
    throw std::invalid_argument("splice period outside 1..horizon");
  }
  if (hat.rate != base.rate || hat.tax != base.tax) {
    throw std::invalid_argument("paste requires matching rate and tax");
  }

  TaxMarket out;
  out.tree = base.tree;
  out.rate = base.rate;
  out.tax = base.tax;
  out.price.resize(base.tree.size());
  for (int node = 0; node < base.tree.size(); ++node) {
    const int u = base.tree.node(node).time;
    if (u < t) {
      out.price[node] = hat.price[node];
    } else if (u == t) {
      out.price[node] =
          hat.price[base.tree.node(node).parent] * price_ratio(base, node);
    } else {
      out.price[node] =
          hat.price[node] * price_ratio(base, base.tree.ancestor_at(node, t));
    }
  }
  return out;
}

}  // namespace taxarb
