#pragma once

#include "taxarb/market.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>

namespace taxarb {

// Trading plan indexed by purchase date. buys[node] is the amount bought
// at that node's time s at price S_s; sells[(s, node)] is the amount of
// the date-s lot sold at that node. Every lot is fully liquidated by the
// horizon along every path.
struct Strategy {
  std::map<int, Rational> buys;
  std::map<std::pair<int, int>, Rational> sells;
};

// After tax proceeds of one share bought at time s and sold at `node`,
// with both legs compounded to the horizon at the after tax rate:
//   (S_u - tax * (S_u - S_s)) * g^(T-u) - S_s * g^(T-s)
// where u is the node's time and g the after tax growth factor.
Rational lot_gain(const TaxMarket& market, int s, int node);

// Dense table of lot gains: entry(s, node) for every s < time(node).
struct GainMatrix {
  std::vector<std::vector<Rational>> rows;  // rows[node][s]
  const Rational& at(int s, int node) const { return rows[node][s]; }
};
GainMatrix gain_matrix(const TaxMarket& market);

// First problem found, or nullopt: negative amounts, a buy at the horizon,
// a sell dated at or before its purchase, or a lot not exactly liquidated
// along some path.
std::optional<std::string> strategy_violation(const TaxMarket& market,
                                              const Strategy& strategy);

// Sum of sold amounts times lot gains, per leaf.
std::map<int, Rational> liquidation_value(const TaxMarket& market,
                                          const Strategy& strategy);

// Forward wealth per node: eta at a node equals the previous wealth grown
// at the after tax rate, minus the new purchase, plus after tax sale
// proceeds realized at the node. At every leaf this equals the
// liquidation value.
std::map<int, Rational> wealth_recursion(const TaxMarket& market,
                                         const Strategy& strategy);

// Market with one trading date removed. Prices at eliminated-time nodes
// are ignored; decisions dated just before the gap may use the
// information revealed at the eliminated time.
struct ReducedMarket {
  TaxMarket base;
  int eliminated = 0;  // in 1..horizon
};

std::optional<std::string> reduced_market_violation(const ReducedMarket& reduced);

// Lot gain on the reduced time domain. The compounding exponents drop by
// one for dates before the gap; node must not sit at the eliminated time.
Rational reduced_lot_gain(const ReducedMarket& reduced, int s, int node);

// Reduced trading plan. Attachment encodes the relaxed information rule:
//   buys[node] with time(node) = s != eliminated      : a date-s purchase
//   buys[node] with time(node) = eliminated           : the date-(t-1)
//       purchase, which may depend on time-t information
//   sells[(s, node)] with time(node) = eliminated     : the date-(t-1)
//       sale of lot s, likewise allowed to use time-t information
//   sells[(s, node)] with time(node) = eliminated + 1 : the amount of lot
//       s carried over the gap and sold on the far side
//   all other sells                                   : as in Strategy
// When the horizon itself is eliminated every lot must be liquidated one
// period early and no relaxation applies.
struct ReducedStrategy {
  std::map<int, Rational> buys;
  std::map<std::pair<int, int>, Rational> sells;
};

std::optional<std::string> reduced_strategy_violation(const ReducedMarket& reduced,
                                                      const ReducedStrategy& strategy);

std::map<int, Rational> reduced_liquidation_value(const ReducedMarket& reduced,
                                                  const ReducedStrategy& strategy);

// Splices the one period returns of `base` across period t into the
// reduced price process `hat` (same tree): before t prices copy hat; at t
// the time-(t-1) hat price grows by the base return S_t / S_{t-1} of the
// splice period; after t the same-time hat prices are scaled by that path
// growth, with 0/0 read as 0.
TaxMarket paste_process(const TaxMarket& hat, const TaxMarket& base, int t);

}  // namespace taxarb
