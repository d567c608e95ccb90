#pragma once

#include "taxarb/arbitrage.hpp"
#include "taxarb/gains.hpp"
#include "taxarb/market.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>

namespace taxarb {

// Multi asset market with proportional transaction costs: buying at the
// ask and selling at the bid, per asset and node. A missing quote means
// the trade is forbidden there; cash grows at `interest` per period.
struct BidAskMarket {
  ScenarioTree tree;
  int num_assets = 0;
  Rational interest;  // >= 0, zero allowed
  std::map<std::pair<int, int>, Rational> ask;  // (asset, node) -> price
  std::map<std::pair<int, int>, Rational> bid;
};

// First problem found, or nullopt: negative interest, quotes outside the
// asset or node range, negative prices, or a bid above the ask at the
// same asset and node.
std::optional<std::string> bidask_violation(const BidAskMarket& market);

// Throws std::invalid_argument with the first violation, if any.
void bidask_require(const BidAskMarket& market);

// Trade amounts per (asset, node), buys at the ask and sells at the bid.
// Every position must be closed by the horizon along every path; interim
// short positions are allowed wherever the quotes permit the round trip.
struct BidAskStrategy {
  std::map<std::pair<int, int>, Rational> buys;
  std::map<std::pair<int, int>, Rational> sells;
};

// First problem found, or nullopt: negative amounts, trades without a
// quote, or a position not liquidated at some leaf.
std::optional<std::string> bidask_strategy_violation(const BidAskMarket& market,
                                                     const BidAskStrategy& strategy);

// Terminal cash per leaf: every cash leg on the path to the leaf,
// compounded to the horizon at the interest rate. Throws when a trade
// references a missing quote.
std::map<int, Rational> bidask_liquidation_value(const BidAskMarket& market,
                                                 const BidAskStrategy& strategy);

struct BidAskVerdict {
  ArbitrageStatus status = ArbitrageStatus::no_arbitrage;
  Rational value;
  BidAskStrategy certificate;
  std::map<int, Rational> certificate_value;
};

// Exact arbitrage search over trade plans from zero capital. Without a
// bound the test is scale free: total purchases are capped at one and the
// verdict is arbitrage exactly when some plan has nonnegative terminal
// cash at every leaf and positive expectation; `value` is the capped
// optimum. With a bound the probe instead asks for a full unit of profit:
// arbitrage exactly when some plan reaches terminal cash of at least one
// at some leaf, nonnegative elsewhere, with every post trade position
// within [-bound, bound].
BidAskVerdict bidask_check_na(const BidAskMarket& market,
                              const std::optional<Rational>& bound = std::nullopt);

// Tax market rewritten with one fictitious asset per purchase date: asset
// i has ask S_i at time-i nodes only and bid equal to the after tax
// proceeds S_t - tax * (S_t - S_i) strictly after; cash grows at the
// after tax rate. Lot for lot, strategies and liquidation values carry
// over exactly.
BidAskMarket embed_tax_market(const TaxMarket& market);

BidAskStrategy embed_strategy(const TaxMarket& market, const Strategy& strategy);

// Embedded quotes moved strictly inside the spread wherever the lot's
// purchase price is positive: the date-i ask shrinks by the factor
// 1 - (1/3) tax (1-tax) rate / g^(T-i), every later bid on the lot gains
// the flat amount (1/3) tax (1-tax) rate S_i.
struct PerturbedPrices {
  std::map<std::pair<int, int>, Rational> ask_c;
  std::map<std::pair<int, int>, Rational> bid_c;
};

// Requires a positive tax rate, otherwise the shift degenerates to zero.
// The shifted quotes favor the trader on any valid market; keeping them
// arbitrage-free additionally needs every atom to allow a return at or
// below the after tax rate.
PerturbedPrices perturb_robust(const TaxMarket& market);

// Embedding with the perturbed quotes in place of the originals.
BidAskMarket perturbed_market(const TaxMarket& market);

}  // namespace taxarb
