#pragma once

#include "taxarb/bidask.hpp"
#include "taxarb/gains.hpp"
#include "taxarb/market.hpp"
#include "taxarb/measures.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace taxarb {

// One certified inequality behind a constructed instance. The residual is
// the exact slack; `verified` records that it has the advertised sign
// (positive for a strict inequality, zero for an identity).
struct Certification {
  std::string id;
  Rational residual;
  bool verified = false;
};

// Return r_bar at which selling a lot with book profit ratio R and banking
// the after tax proceeds ties exactly with holding it one more period.
struct BreakEven {
  Rational R;
  Rational r_bar;
  std::vector<Certification> certified;
};

// With `sharper` set, additionally certifies that a lot with the larger
// book profit ratio strictly prefers holding at the same r_bar.
BreakEven break_even(const Rational& ratio, const Rational& tax, const Rational& rate,
                     const std::optional<Rational>& sharper = std::nullopt);

// Book profit ratio R of a lot that has grown like the bank for the given
// number of periods, and a stock return r_bar under which holding one more
// period loses to selling while holding two more periods wins.
struct CompoundBreakEven {
  Rational R;
  Rational r_bar;
  std::vector<Certification> certified;
};

CompoundBreakEven compound_break_even(int periods, const Rational& tax,
                                      const Rational& rate);

// Whether beating the bank after m1 periods forces beating it after
// m2 >= m1 periods under the same stock return.
struct OutperformanceCheck {
  bool premise = false;
  bool conclusion = false;
  bool implication_holds = false;
};

OutperformanceCheck outperformance_persists(const Rational& r1, int m1, int m2,
                                            const Rational& tax, const Rational& rate);

// A constructed market with the strategies, named parameters, and certified
// inequalities that exhibit its advertised behavior.
struct ExampleInstance {
  TaxMarket market;
  std::optional<ReducedMarket> reduced;
  std::vector<Strategy> strategies;
  std::map<std::string, Rational> parameters;
  std::vector<Certification> certified;
};

// Largest drop size at period t below which no-arbitrage of the model with
// period t removed already decides the full model. Requires 2 <= t < horizon.
Rational kappa_maximality_threshold(int t, int horizon, const Rational& tax,
                                    const Rational& rate);

// Market whose reduced model without period t is arbitrage free although the
// full model has an arbitrage fed by a one period drop of size below
// `kappa_bound`. Requires kappa_bound above the maximality threshold.
ExampleInstance gen_kappa_maximality(int t, int horizon, const Rational& tax,
                                     const Rational& rate, const Rational& kappa_bound);

// Arbitrage free market in which a later long lot exactly offsets an earlier
// long lot, so a nonvanishing strategy liquidates to zero on every path.
ExampleInstance gen_hedge_pair(const Rational& tax, const Rational& rate);

// Truncations of a fixed infinite market in which ever larger positions keep
// a strictly positive payoff on every crash path. `ratios` holds the scale
// at which each branch's payoff settles, `limit_payoff` the settled values,
// and `uniform_floor` a depth independent strict lower bound.
struct ScaleDivergence {
  ExampleInstance instance;
  std::vector<Rational> ratios;
  std::map<int, Rational> limit_payoff;
  Rational uniform_floor;
  std::vector<int> recovery_leaves;
  std::vector<int> crash_leaves;
};

ScaleDivergence gen_scale_divergence(const Rational& tax, const Rational& rate,
                                     int depth);

// Expectations of the scaled strategies and of their limit payoff under one
// candidate measure (uniform on leaves when absent). A positive limit
// expectation rules the candidate out as a separating measure.
struct SeparatingBoundReport {
  std::vector<Rational> strategy_expectations;
  Rational best;
  Rational limit_expectation;
  bool limit_positive = false;
};

SeparatingBoundReport separating_bound_probe(
    const ScaleDivergence& family,
    const std::optional<SeparatingMeasure>& candidate = std::nullopt);

// Two asset bid ask market in the spirit of Grigoriev's two asset theorem:
// every truncation admits arbitrage only at scale past its depth, while the
// scaled strategies converge to a nonnegative, nonvanishing limit payoff.
struct ThreeAssetExample {
  BidAskMarket market;
  std::vector<BidAskStrategy> strategies;
  std::map<int, Rational> limit_payoff;
  std::vector<int> up_leaves;
  std::vector<int> down_leaves;
  std::map<std::string, Rational> parameters;
  std::vector<Certification> certified;
};

ThreeAssetExample gen_three_asset(int depth);

}  // namespace taxarb
