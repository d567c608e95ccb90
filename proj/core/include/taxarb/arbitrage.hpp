#pragma once

#include "taxarb/gains.hpp"
#include "taxarb/market.hpp"

#include <map>
#include <optional>
#include <vector>

namespace taxarb {

enum class ArbitrageStatus { no_arbitrage, arbitrage };

const char* to_string(ArbitrageStatus status);

// Outcome of the exact search for a riskless profit. On arbitrage the
// certificate is a strategy with nonnegative liquidation value at every
// leaf and positive value somewhere; its per leaf values are recorded.
// On no_arbitrage the dual weights form a nonnegative vector over the
// leaves witnessing that no such strategy exists.
struct ArbitrageVerdict {
  ArbitrageStatus status = ArbitrageStatus::no_arbitrage;
  Rational value;
  Strategy certificate;
  std::map<int, Rational> certificate_value;
  std::map<int, Rational> dual_weights;
};

// Decides arbitrage by maximizing the probability weighted liquidation
// value over self financing plans with total purchases capped at one.
// The cap only normalizes scale, so the optimum is zero exactly when no
// riskless profit exists.
ArbitrageVerdict check_na(const TaxMarket& market);

// Per atom outcome of a local condition at one period. `undershoot` is
// the branch where some one period return drops below the reference
// rate, `capped` the branch where every return stays under the ceiling;
// the atom holds when either branch does.
struct AtomVerdict {
  int node = -1;
  bool undershoot = false;
  bool capped = false;
  bool holds = false;
};

struct LocalConditionReport {
  int period = 0;
  std::vector<AtomVerdict> atoms;
  bool overall = false;
};

// One period test at period t: each time-(t-1) atom must see some
// return strictly below the interest rate, unless every return stays at
// or below it. Necessary for the absence of arbitrage.
LocalConditionReport check_one_period(const TaxMarket& market, int t);

// Return threshold under which a period-t loss can be rolled forward as
// a tax shelter through the horizon:
//   kappa = ((-tax + (1-tax)^2 r) g^(T-t) + tax) / (g^(T-t) - tax)
// with g the after tax growth factor. Decreases in the remaining time
// and equals (1-tax) r at t = T; without taxes it collapses to r.
Rational kappa(int t, int horizon, const Rational& tax, const Rational& rate);

// Sufficient condition at period t: each time-(t-1) atom needs some
// return strictly below kappa(t), unless every return stays at or below
// the after tax rate. Holding at every period rules out arbitrage.
LocalConditionReport check_rlna_sufficient(const TaxMarket& market, int t);

// Scan over all periods of the weak undershoot test: each atom must see
// some return at or below the after tax rate. Rules out portfolios that
// surely beat the bank, which is what makes deferring gains costly.
// Only meaningful under a positive tax rate.
struct NeverSureReport {
  std::vector<LocalConditionReport> periods;
  bool overall = false;
};

NeverSureReport check_never_sure(const TaxMarket& market);

struct ReducedArbitrageVerdict {
  ArbitrageStatus status = ArbitrageStatus::no_arbitrage;
  Rational value;
  ReducedStrategy certificate;
  std::map<int, Rational> certificate_value;
  std::map<int, Rational> dual_weights;
};

// check_na on the reduced time domain, with purchase and sale decisions
// dated just before the gap allowed to use the information revealed at
// the eliminated time.
ReducedArbitrageVerdict check_na_reduced(const ReducedMarket& reduced);

// Smallest total position size at which one unit of sure profit becomes
// attainable. The threshold is exact, so the open and closed readings of
// the cap coincide and both endpoints agree; absent on clean markets.
// `arbitrage` reports whether the probe's bound admits the unit profit.
struct ScaleProbe {
  bool arbitrage = false;
  std::optional<Rational> threshold_low;
  std::optional<Rational> threshold_high;
  int profit_leaf = -1;
  Strategy certificate;
};

ScaleProbe arbitrage_scale(const TaxMarket& market, const Rational& bound);

}  // namespace taxarb
