#pragma once

#include "taxarb/market.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace taxarb {

// Strictly positive leaf weights summing to one. A measure separates a
// market when every date-i lot liquidated by any stopping rule has
// nonpositive expected gain; such a measure exists exactly when the
// market is free of arbitrage.
struct SeparatingMeasure {
  std::map<int, Rational> weights;
};

// First defect, or nullopt: weights must cover exactly the leaves, be
// strictly positive and sum to one.
std::optional<std::string> measure_violation(const TaxMarket& market,
                                             const SeparatingMeasure& measure);

// Expectation of a leaf indexed quantity; absent leaves count as zero.
Rational measure_expectation(const SeparatingMeasure& measure,
                             const std::map<int, Rational>& leaf_values);

// Builds the measure from the dual side of the arbitrage program: each
// leaf weight blends the leaf's path probability with the dual
// multiplier of its nonnegativity row, normalized to sum one. Returns
// nullopt when the market carries an arbitrage and no measure exists.
std::optional<SeparatingMeasure> find_separating_measure(const TaxMarket& market);

// Rule for liquidating one lot: starting at `start`, each reached node
// is labeled stop or continue; every path must reach a stop label by
// the horizon. Nodes below a stop label carry no label.
struct StoppingTime {
  int start = 0;
  std::map<int, bool> stop;
};

struct StoppingCheck {
  bool ok = true;
  std::optional<StoppingTime> witness;  // first rule with positive expected gain
  Rational expectation;                 // its expected gain
};

// Exhaustively enumerates every stopping rule for every start date and
// checks that the expected liquidation gain stays nonpositive. The
// enumeration count per start date is capped (TAXARB_STOPPING_CAP,
// default 100000); larger trees are refused.
StoppingCheck verify_stopping_constraints(const TaxMarket& market,
                                          const SeparatingMeasure& measure);

// Value process of optimally delaying the sale of the date-`start` lot,
// with the gain at the start date read as zero, together with the
// martingale part of its Doob decomposition under the measure.
struct SnellEnvelope {
  int start = 0;
  std::map<int, Rational> envelope;    // per node from the start date on
  std::map<int, Rational> martingale;  // zero at the start date
};

SnellEnvelope snell_martingale_part(const TaxMarket& market,
                                    const SeparatingMeasure& measure, int start);

// Recomputes every envelope invariant and reports failures: terminal
// value, the backward recursion, the zero start and exact martingale
// property of the martingale part, and its dominance over the lot gains
// after the start date. Dominance genuinely fails when the measure does
// not separate the market, so findings are returned, not thrown.
std::vector<std::string> snell_violations(const TaxMarket& market,
                                          const SeparatingMeasure& measure,
                                          const SnellEnvelope& envelope);

}  // namespace taxarb
