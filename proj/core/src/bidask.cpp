#include "taxarb/bidask.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "taxarb/lp.hpp"

namespace taxarb {

namespace {

std::string quote_key(const std::pair<int, int>& key) {
  return "asset " + std::to_string(key.first) + " at node " +
         std::to_string(key.second);
}

std::string quote_name(const ScenarioTree& tree, const std::pair<int, int>& key) {
  return "asset " + std::to_string(key.first) + " at node " +
         std::to_string(tree.node(key.second).id);
}

// growth[t] compounds one unit of cash from time t to the horizon.
std::vector<Rational> cash_growth(const BidAskMarket& market) {
  const int horizon = market.tree.horizon;
  std::vector<Rational> growth(horizon + 1);
  growth[horizon] = 1;
  const Rational factor = 1 + market.interest;
  for (int t = horizon - 1; t >= 0; --t) growth[t] = growth[t + 1] * factor;
  return growth;
}

// Variables of the arbitrage program: one buy per ask quote, one sell
// per bid quote, each with its terminal cash contribution precomputed.
struct Columns {
  std::vector<std::pair<int, int>> buy_keys;
  std::vector<std::pair<int, int>> sell_keys;
  std::vector<Rational> cash;  // per variable, buys then sells

  int buy_count() const { return static_cast<int>(buy_keys.size()); }
  int total() const { return static_cast<int>(cash.size()); }
};

Columns collect_columns(const BidAskMarket& market) {
  const std::vector<Rational> growth = cash_growth(market);
  Columns cols;
  for (const auto& [key, price] : market.ask) {
    cols.buy_keys.push_back(key);
    cols.cash.push_back(-price * growth[market.tree.node(key.second).time]);
  }
  for (const auto& [key, price] : market.bid) {
    cols.sell_keys.push_back(key);
    cols.cash.push_back(price * growth[market.tree.node(key.second).time]);
  }
  return cols;
}

std::vector<char> path_mask(const ScenarioTree& tree, int node) {
  std::vector<char> mask(tree.size(), 0);
  for (int v = node; v != -1; v = tree.node(v).parent) mask[v] = 1;
  return mask;
}

// Rows shared by both probes: one equality per asset and leaf closing
// the position, then one inequality per leaf keeping terminal cash
// nonnegative. a_base indexes the first cash row, one per leaf in tree
// order.
struct Assembled {
  LinearProgram lp;
  int a_base = 0;
};

Assembled assemble(const BidAskMarket& market, const Columns& cols) {
  const ScenarioTree& tree = market.tree;
  const int B = cols.buy_count();
  const int n = cols.total();
  Assembled out;
  out.lp.objective.assign(n, rat(0));

  for (int leaf : tree.leaves()) {
    const std::vector<char> mask = path_mask(tree, leaf);
    for (int asset = 0; asset < market.num_assets; ++asset) {
      std::vector<Rational> row(n, rat(0));
      bool any = false;
      for (int j = 0; j < B; ++j) {
        if (cols.buy_keys[j].first == asset && mask[cols.buy_keys[j].second]) {
          row[j] = rat(1);
          any = true;
        }
      }
      for (int j = B; j < n; ++j) {
        if (cols.sell_keys[j - B].first == asset && mask[cols.sell_keys[j - B].second]) {
          row[j] = rat(-1);
          any = true;
        }
      }
      if (any) out.lp.add_row(std::move(row), RowSense::Equal, rat(0));
    }
  }

  out.a_base = static_cast<int>(out.lp.rows.size());
  for (int leaf : tree.leaves()) {
    const std::vector<char> mask = path_mask(tree, leaf);
    std::vector<Rational> row(n, rat(0));
    for (int j = 0; j < B; ++j) {
      if (mask[cols.buy_keys[j].second]) row[j] = cols.cash[j];
    }
    for (int j = B; j < n; ++j) {
      if (mask[cols.sell_keys[j - B].second]) row[j] = cols.cash[j];
    }
    out.lp.add_row(std::move(row), RowSense::GreaterEq, rat(0));
  }
  return out;
}

BidAskStrategy strategy_from_primal(const Columns& cols,
                                    const std::vector<Rational>& primal) {
  BidAskStrategy strategy;
  const int B = cols.buy_count();
  for (int j = 0; j < B; ++j) {
    if (primal[j] != 0) strategy.buys[cols.buy_keys[j]] = primal[j];
  }
  for (int j = B; j < cols.total(); ++j) {
    if (primal[j] != 0) strategy.sells[cols.sell_keys[j - B]] = primal[j];
  }
  return strategy;
}

Rational expected_value(const ScenarioTree& tree,
                        const std::map<int, Rational>& value) {
  Rational total = 0;
  for (const auto& [leaf, cash] : value) {
    total += path_probability(tree, leaf) * cash;
  }
  return total;
}

// Maximizes the expected terminal cash with total purchases capped at
// one; the optimum is positive exactly when an arbitrage exists.
BidAskVerdict probe_normalized(const BidAskMarket& market, const Columns& cols) {
  BidAskVerdict verdict;
  Assembled assembled = assemble(market, cols);
  const int n = cols.total();
  const int B = cols.buy_count();
  for (int i = 0; i < static_cast<int>(market.tree.leaves().size()); ++i) {
    const std::vector<Rational>& row = assembled.lp.rows[assembled.a_base + i].coeff;
    const Rational weight = path_probability(market.tree, market.tree.leaves()[i]);
    for (int j = 0; j < n; ++j) assembled.lp.objective[j] += weight * row[j];
  }
  std::vector<Rational> cap(n, rat(0));
  for (int j = 0; j < B; ++j) cap[j] = rat(1);
  assembled.lp.add_row(std::move(cap), RowSense::LessEq, rat(1));

  LpSolution sol = solve_lp(assembled.lp);
  if (sol.status != LpStatus::Optimal) {
    throw std::logic_error("normalized arbitrage program did not optimize");
  }
  if (sol.value == 0) return verdict;
  verdict.status = ArbitrageStatus::arbitrage;
  verdict.value = sol.value;
  verdict.certificate = strategy_from_primal(cols, sol.primal);
  verdict.certificate_value = bidask_liquidation_value(market, verdict.certificate);
  return verdict;
}

// Asks for one full unit of profit at some leaf while every post trade
// position stays within the bound; feasibility at any leaf is an
// arbitrage at that scale.
BidAskVerdict probe_bounded(const BidAskMarket& market, const Columns& cols,
                            const Rational& bound) {
  BidAskVerdict verdict;
  const ScenarioTree& tree = market.tree;
  Assembled base = assemble(market, cols);
  const int n = cols.total();
  const int B = cols.buy_count();

  for (int v = 0; v < tree.size(); ++v) {
    const std::vector<char> mask = path_mask(tree, v);
    for (int asset = 0; asset < market.num_assets; ++asset) {
      std::vector<Rational> position(n, rat(0));
      bool any = false;
      for (int j = 0; j < B; ++j) {
        if (cols.buy_keys[j].first == asset && mask[cols.buy_keys[j].second]) {
          position[j] = rat(1);
          any = true;
        }
      }
      for (int j = B; j < n; ++j) {
        if (cols.sell_keys[j - B].first == asset && mask[cols.sell_keys[j - B].second]) {
          position[j] = rat(-1);
          any = true;
        }
      }
      if (!any) continue;
      std::vector<Rational> mirror = position;
      base.lp.add_row(std::move(position), RowSense::LessEq, bound);
      base.lp.add_row(std::move(mirror), RowSense::GreaterEq, -bound);
    }
  }

  const auto& leaves = tree.leaves();
  for (int i = 0; i < static_cast<int>(leaves.size()); ++i) {
    LinearProgram lp = base.lp;
    std::vector<Rational> profit = lp.rows[base.a_base + i].coeff;
    lp.add_row(std::move(profit), RowSense::GreaterEq, rat(1));
    LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::Infeasible) continue;
    verdict.status = ArbitrageStatus::arbitrage;
    verdict.certificate = strategy_from_primal(cols, sol.primal);
    verdict.certificate_value = bidask_liquidation_value(market, verdict.certificate);
    verdict.value = expected_value(tree, verdict.certificate_value);
    return verdict;
  }
  return verdict;
}

}  // namespace

std::optional<std::string> bidask_violation(const BidAskMarket& market) {
  const ScenarioTree& tree = market.tree;
  if (market.interest < 0) return "negative interest rate";
  if (market.num_assets < 0) return "negative asset count";

  auto scan = [&](const std::map<std::pair<int, int>, Rational>& quotes,
                  const char* side) -> std::optional<std::string> {
    for (const auto& [key, price] : quotes) {
      if (key.first < 0 || key.first >= market.num_assets) {
        return "quote for unknown " + quote_key(key);
      }
      if (key.second < 0 || key.second >= tree.size()) {
        return "quote at unknown node " + std::to_string(key.second);
      }
      if (price < 0) {
        return "negative " + std::string(side) + " price for " +
               quote_name(tree, key);
      }
    }
    return std::nullopt;
  };
  if (auto problem = scan(market.ask, "ask")) return problem;
  if (auto problem = scan(market.bid, "bid")) return problem;

  for (const auto& [key, bid] : market.bid) {
    auto it = market.ask.find(key);
    if (it != market.ask.end() && bid > it->second) {
      return "bid above ask for " + quote_name(tree, key);
    }
  }
  return std::nullopt;
}

void bidask_require(const BidAskMarket& market) {
  if (auto problem = bidask_violation(market)) {
    throw std::invalid_argument("invalid market: " + *problem);
  }
}

std::optional<std::string> bidask_strategy_violation(const BidAskMarket& market,
                                                     const BidAskStrategy& strategy) {
  const ScenarioTree& tree = market.tree;
  for (const auto& [key, amount] : strategy.buys) {
    if (market.ask.find(key) == market.ask.end()) {
      return "no ask for " + quote_key(key);
    }
    if (amount < 0) return "negative purchase of " + quote_name(tree, key);
  }
  for (const auto& [key, amount] : strategy.sells) {
    if (market.bid.find(key) == market.bid.end()) {
      return "no bid for " + quote_key(key);
    }
    if (amount < 0) return "negative sale of " + quote_name(tree, key);
  }
  for (int leaf : tree.leaves()) {
    std::map<int, Rational> net;
    for (const auto& [key, amount] : strategy.buys) {
      if (tree.on_path(key.second, leaf)) net[key.first] += amount;
    }
    for (const auto& [key, amount] : strategy.sells) {
      if (tree.on_path(key.second, leaf)) net[key.first] -= amount;
    }
    for (const auto& [asset, remainder] : net) {
      if (remainder != 0) {
        return "position in asset " + std::to_string(asset) +
               " not liquidated at leaf " + std::to_string(tree.node(leaf).id);
      }
    }
  }
  return std::nullopt;
}

std::map<int, Rational> bidask_liquidation_value(const BidAskMarket& market,
                                                 const BidAskStrategy& strategy) {
  const ScenarioTree& tree = market.tree;
  const std::vector<Rational> growth = cash_growth(market);
  std::map<int, Rational> value;
  for (int leaf : tree.leaves()) value[leaf] = 0;

  auto apply = [&](const std::map<std::pair<int, int>, Rational>& trades,
                   const std::map<std::pair<int, int>, Rational>& quotes, int sign,
                   const char* side) {
    for (const auto& [key, amount] : trades) {
      if (amount == 0) continue;
      auto it = quotes.find(key);
      if (it == quotes.end()) {
        throw std::invalid_argument("no " + std::string(side) + " for " +
                                    quote_key(key));
      }
      const Rational cash =
          sign * amount * it->second * growth[tree.node(key.second).time];
      for (int leaf : descendant_leaves(tree, key.second)) value[leaf] += cash;
    }
  };
  apply(strategy.buys, market.ask, -1, "ask");
  apply(strategy.sells, market.bid, +1, "bid");
  return value;
}

BidAskVerdict bidask_check_na(const BidAskMarket& market,
                              const std::optional<Rational>& bound) {
  bidask_require(market);
  if (bound && *bound <= 0) {
    throw std::domain_error("position bound must be positive");
  }
  Columns cols = collect_columns(market);
  if (cols.total() == 0) return BidAskVerdict{};
  if (bound) return probe_bounded(market, cols, *bound);
  return probe_normalized(market, cols);
}

BidAskMarket embed_tax_market(const TaxMarket& market) {
  require_valid(market);
  const ScenarioTree& tree = market.tree;
  BidAskMarket out;
  out.tree = tree;
  out.num_assets = tree.horizon;
  out.interest = (1 - market.tax) * market.rate;
  for (int v = 0; v < tree.size(); ++v) {
    const int t = tree.node(v).time;
    if (t < tree.horizon) out.ask[{t, v}] = market.price[v];
    for (int i = 0; i < t; ++i) {
      const int anchor = tree.ancestor_at(v, i);
      out.bid[{i, v}] =
          market.price[v] - market.tax * (market.price[v] - market.price[anchor]);
    }
  }
  return out;
}

BidAskStrategy embed_strategy(const TaxMarket& market, const Strategy& strategy) {
  const ScenarioTree& tree = market.tree;
  BidAskStrategy out;
  for (const auto& [node, amount] : strategy.buys) {
    out.buys[{tree.node(node).time, node}] = amount;
  }
  for (const auto& [key, amount] : strategy.sells) {
    out.sells[key] = amount;
  }
  return out;
}

PerturbedPrices perturb_robust(const TaxMarket& market) {
  require_valid(market);
  if (market.tax == 0) throw std::domain_error("tax rate must be positive");
  const ScenarioTree& tree = market.tree;
  const Rational g = after_tax_growth(market);
  const Rational wedge = market.tax * (1 - market.tax) * market.rate / 3;
  PerturbedPrices out;
  for (int v = 0; v < tree.size(); ++v) {
    const int t = tree.node(v).time;
    if (t < tree.horizon) {
      out.ask_c[{t, v}] =
          market.price[v] * (1 - wedge / rational_pow(g, tree.horizon - t));
    }
    for (int i = 0; i < t; ++i) {
      const int anchor = tree.ancestor_at(v, i);
      out.bid_c[{i, v}] = market.price[v] -
                          market.tax * (market.price[v] - market.price[anchor]) +
                          wedge * market.price[anchor];
    }
  }
  return out;
}

BidAskMarket perturbed_market(const TaxMarket& market) {
  BidAskMarket out = embed_tax_market(market);
  PerturbedPrices prices = perturb_robust(market);
  out.ask = std::move(prices.ask_c);
  out.bid = std::move(prices.bid_c);
  return out;
}

}  // namespace taxarb
