#include "taxarb/arbitrage.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <utility>

#include "taxarb/lp.hpp"

namespace taxarb {

namespace {

void require_period(int t, int horizon) {
  if (t < 1 || t > horizon) {
    throw std::domain_error("period outside 1..horizon");
  }
}

// Variables of the arbitrage program: one purchase per attachment node,
// one sale per (lot date, attachment node) pair, gains precomputed per
// sale column. buy_dates carries the trading date each purchase column
// settles at, which differs from the attachment time for purchases
// attached at an eliminated period.
struct Columns {
  std::vector<int> buy_nodes;
  std::vector<int> buy_dates;
  std::vector<std::pair<int, int>> sell_keys;
  std::vector<Rational> sell_gain;
  std::vector<int> lot_dates;  // dates carrying a liquidation row

  int buy_count() const { return static_cast<int>(buy_nodes.size()); }
  int sell_count() const { return static_cast<int>(sell_keys.size()); }
  int total() const { return buy_count() + sell_count(); }
};

Columns full_columns(const TaxMarket& market) {
  const ScenarioTree& tree = market.tree;
  GainMatrix gains = gain_matrix(market);
  Columns cols;
  for (int v = 0; v < tree.size(); ++v) {
    int time = tree.node(v).time;
    if (time < tree.horizon) {
      cols.buy_nodes.push_back(v);
      cols.buy_dates.push_back(time);
    }
    for (int s = 0; s < time; ++s) {
      cols.sell_keys.emplace_back(s, v);
      cols.sell_gain.push_back(gains.at(s, v));
    }
  }
  for (int s = 0; s < tree.horizon; ++s) cols.lot_dates.push_back(s);
  return cols;
}

Columns reduced_columns(const ReducedMarket& reduced) {
  const ScenarioTree& tree = reduced.base.tree;
  const int t = reduced.eliminated;
  const int T = tree.horizon;
  Columns cols;

  auto sell = [&](int s, int node, int priced_at) {
    cols.sell_keys.emplace_back(s, node);
    cols.sell_gain.push_back(reduced_lot_gain(reduced, s, priced_at));
  };

  if (t == T) {
    for (int v = 0; v < tree.size(); ++v) {
      int time = tree.node(v).time;
      if (time <= T - 2) {
        cols.buy_nodes.push_back(v);
        cols.buy_dates.push_back(time);
      }
      if (time >= 1 && time <= T - 1) {
        for (int s = 0; s < time; ++s) sell(s, v, v);
      }
    }
    for (int s = 0; s <= T - 2; ++s) cols.lot_dates.push_back(s);
    return cols;
  }

  for (int v = 0; v < tree.size(); ++v) {
    int time = tree.node(v).time;
    if (time <= T - 1 && time != t - 1) {
      cols.buy_nodes.push_back(v);
      cols.buy_dates.push_back(time == t ? t - 1 : time);
    }
    if (time < 1 || time == t - 1) continue;
    if (time == t) {
      int priced = tree.ancestor_at(v, t - 1);
      for (int s = 0; s <= t - 2; ++s) sell(s, v, priced);
    } else if (time == t + 1) {
      for (int s = 0; s <= t - 1; ++s) sell(s, v, v);
    } else {
      for (int s = 0; s < time; ++s) {
        if (s != t) sell(s, v, v);
      }
    }
  }
  for (int s = 0; s <= T - 1; ++s) {
    if (s != t) cols.lot_dates.push_back(s);
  }
  return cols;
}

// Rows shared by every variant of the program: one equality per leaf and
// lot date forcing the lot bought on that path to be sold exactly, then
// one inequality per leaf keeping its liquidation value nonnegative.
// The objective weights each sale by its gain times the probability mass
// reaching the attachment node, so it equals the expected liquidation
// value. Any cap rows are the caller's business.
struct Assembled {
  LinearProgram lp;
  int a_base = 0;  // index of the first leaf value row
};

Assembled assemble(const ScenarioTree& tree, const Columns& cols, int extra_vars) {
  const int B = cols.buy_count();
  const int S = cols.sell_count();
  const int n = B + S + extra_vars;
  Assembled out;
  out.lp.objective.assign(n, rat(0));
  for (int j = 0; j < S; ++j) {
    out.lp.objective[B + j] =
        cols.sell_gain[j] * path_probability(tree, cols.sell_keys[j].second);
  }

  std::map<std::pair<int, int>, int> lot_row;
  for (int leaf : tree.leaves()) {
    for (int s : cols.lot_dates) {
      int next = static_cast<int>(lot_row.size());
      lot_row.emplace(std::make_pair(leaf, s), next);
    }
  }
  std::vector<std::vector<Rational>> balance(lot_row.size(),
                                             std::vector<Rational>(n, rat(0)));
  for (int j = 0; j < B; ++j) {
    for (int leaf : descendant_leaves(tree, cols.buy_nodes[j])) {
      balance[lot_row.at({leaf, cols.buy_dates[j]})][j] -= 1;
    }
  }
  for (int j = 0; j < S; ++j) {
    for (int leaf : descendant_leaves(tree, cols.sell_keys[j].second)) {
      balance[lot_row.at({leaf, cols.sell_keys[j].first})][B + j] += 1;
    }
  }
  for (auto& row : balance) {
    out.lp.add_row(std::move(row), RowSense::Equal, rat(0));
  }

  out.a_base = static_cast<int>(out.lp.rows.size());
  const auto& leaves = tree.leaves();
  std::map<int, int> leaf_pos;
  for (int i = 0; i < static_cast<int>(leaves.size()); ++i) leaf_pos[leaves[i]] = i;
  std::vector<std::vector<Rational>> value(leaves.size(),
                                           std::vector<Rational>(n, rat(0)));
  for (int j = 0; j < S; ++j) {
    for (int leaf : descendant_leaves(tree, cols.sell_keys[j].second)) {
      value[leaf_pos.at(leaf)][B + j] += cols.sell_gain[j];
    }
  }
  for (auto& row : value) {
    out.lp.add_row(std::move(row), RowSense::GreaterEq, rat(0));
  }
  return out;
}

template <typename StrategyT>
StrategyT strategy_from_primal(const Columns& cols, const std::vector<Rational>& primal) {
  StrategyT strategy;
  const int B = cols.buy_count();
  for (int j = 0; j < B; ++j) {
    if (primal[j] != 0) strategy.buys[cols.buy_nodes[j]] = primal[j];
  }
  for (int j = 0; j < cols.sell_count(); ++j) {
    if (primal[B + j] != 0) strategy.sells[cols.sell_keys[j]] = primal[B + j];
  }
  return strategy;
}

LpSolution solve_normalized(const ScenarioTree& tree, const Columns& cols,
                            int* a_base) {
  Assembled assembled = assemble(tree, cols, 0);
  std::vector<Rational> cap(cols.total(), rat(0));
  for (int j = 0; j < cols.buy_count(); ++j) cap[j] = rat(1);
  assembled.lp.add_row(std::move(cap), RowSense::LessEq, rat(1));
  LpSolution sol = solve_lp(assembled.lp);
  if (sol.status != LpStatus::Optimal) {
    throw std::logic_error("normalized arbitrage program did not optimize");
  }
  *a_base = assembled.a_base;
  return sol;
}

LocalConditionReport scan_atoms(const TaxMarket& market, int t, const Rational& low,
                                bool strict_low, const std::optional<Rational>& cap) {
  LocalConditionReport report;
  report.period = t;
  report.overall = true;
  for (int v : market.tree.at_time(t - 1)) {
    AtomVerdict atom;
    atom.node = v;
    bool under_cap = cap.has_value();
    for (int child : market.tree.node(v).children) {
      Rational ret = node_return(market, child);
      if (strict_low ? ret < low : ret <= low) atom.undershoot = true;
      if (cap && ret > *cap) under_cap = false;
    }
    atom.capped = under_cap;
    atom.holds = atom.undershoot || atom.capped;
    report.overall = report.overall && atom.holds;
    report.atoms.push_back(atom);
  }
  return report;
}

}  // namespace

const char* to_string(ArbitrageStatus status) {
  return status == ArbitrageStatus::arbitrage ? "arbitrage" : "no_arbitrage";
}

ArbitrageVerdict check_na(const TaxMarket& market) {
  require_valid(market);
  ArbitrageVerdict verdict;
  Columns cols = full_columns(market);
  if (cols.total() == 0) {
    for (int leaf : market.tree.leaves()) verdict.dual_weights[leaf] = rat(0);
    return verdict;
  }
  int a_base = 0;
  LpSolution sol = solve_normalized(market.tree, cols, &a_base);
  if (sol.value == 0) {
    const auto& leaves = market.tree.leaves();
    for (int i = 0; i < static_cast<int>(leaves.size()); ++i) {
      verdict.dual_weights[leaves[i]] = -sol.dual[a_base + i];
    }
    return verdict;
  }
  verdict.status = ArbitrageStatus::arbitrage;
  verdict.value = sol.value;
  verdict.certificate = strategy_from_primal<Strategy>(cols, sol.primal);
  verdict.certificate_value = liquidation_value(market, verdict.certificate);
  return verdict;
}

LocalConditionReport check_one_period(const TaxMarket& market, int t) {
  require_valid(market);
  require_period(t, market.tree.horizon);
  return scan_atoms(market, t, market.rate, true, market.rate);
}

Rational kappa(int t, int horizon, const Rational& tax, const Rational& rate) {
  require_period(t, horizon);
  if (tax < 0 || tax >= 1) throw std::domain_error("tax rate out of range");
  if (rate <= 0) throw std::domain_error("interest rate must be positive");
  Rational g = 1 + (1 - tax) * rate;
  Rational shrunk = rational_pow(g, horizon - t);
  return ((-tax + (1 - tax) * (1 - tax) * rate) * shrunk + tax) / (shrunk - tax);
}

LocalConditionReport check_rlna_sufficient(const TaxMarket& market, int t) {
  require_valid(market);
  require_period(t, market.tree.horizon);
  Rational threshold = kappa(t, market.tree.horizon, market.tax, market.rate);
  Rational cap = (1 - market.tax) * market.rate;
  return scan_atoms(market, t, threshold, true, cap);
}

NeverSureReport check_never_sure(const TaxMarket& market) {
  require_valid(market);
  if (market.tax == 0) throw std::domain_error("tax rate must be positive");
  Rational cap = (1 - market.tax) * market.rate;
  NeverSureReport report;
  report.overall = true;
  for (int t = 1; t <= market.tree.horizon; ++t) {
    report.periods.push_back(scan_atoms(market, t, cap, false, std::nullopt));
    report.overall = report.overall && report.periods.back().overall;
  }
  return report;
}

ReducedArbitrageVerdict check_na_reduced(const ReducedMarket& reduced) {
  if (auto violation = reduced_market_violation(reduced)) {
    throw std::invalid_argument(*violation);
  }
  ReducedArbitrageVerdict verdict;
  Columns cols = reduced_columns(reduced);
  if (cols.total() == 0) {
    for (int leaf : reduced.base.tree.leaves()) verdict.dual_weights[leaf] = rat(0);
    return verdict;
  }
  int a_base = 0;
  LpSolution sol = solve_normalized(reduced.base.tree, cols, &a_base);
  if (sol.value == 0) {
    const auto& leaves = reduced.base.tree.leaves();
    for (int i = 0; i < static_cast<int>(leaves.size()); ++i) {
      verdict.dual_weights[leaves[i]] = -sol.dual[a_base + i];
    }
    return verdict;
  }
  verdict.status = ArbitrageStatus::arbitrage;
  verdict.value = sol.value;
  verdict.certificate = strategy_from_primal<ReducedStrategy>(cols, sol.primal);
  verdict.certificate_value = reduced_liquidation_value(reduced, verdict.certificate);
  return verdict;
}

ScaleProbe arbitrage_scale(const TaxMarket& market, const Rational& bound) {
  require_valid(market);
  ScaleProbe probe;
  Columns cols = full_columns(market);
  if (cols.total() == 0) return probe;

  const int B = cols.buy_count();
  const int n = cols.total() + 1;  // the trailing variable is the position cap
  Assembled base = assemble(market.tree, cols, 1);
  base.lp.objective.assign(n, rat(0));
  base.lp.objective[n - 1] = rat(-1);

  const auto& leaves = market.tree.leaves();
  std::optional<Rational> best;
  std::vector<Rational> best_primal;
  for (int i = 0; i < static_cast<int>(leaves.size()); ++i) {
    LinearProgram lp = base.lp;
    std::vector<Rational> profit = lp.rows[base.a_base + i].coeff;
    lp.add_row(std::move(profit), RowSense::GreaterEq, rat(1));
    for (int j = 0; j < B; ++j) {
      std::vector<Rational> cap(n, rat(0));
      cap[j] = rat(1);
      cap[n - 1] = rat(-1);
      lp.add_row(std::move(cap), RowSense::LessEq, rat(0));
    }
    LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::Infeasible) continue;
    if (sol.status != LpStatus::Optimal) {
      throw std::logic_error("scale program did not optimize");
    }
    Rational needed = -sol.value;
    if (!best || needed < *best) {
      best = needed;
      best_primal = sol.primal;
      probe.profit_leaf = leaves[i];
    }
  }

  if (!best) return probe;
  probe.threshold_low = *best;
  probe.threshold_high = *best;
  probe.certificate = strategy_from_primal<Strategy>(cols, best_primal);
  probe.arbitrage = bound >= *best;
  return probe;
}

}  // namespace taxarb
