#include "doctest.h"

#include <map>
#include <stdexcept>
#include <utility>

#include "support/builders.hpp"
#include "support/generators.hpp"
#include "taxarb/arbitrage.hpp"
#include "taxarb/bidask.hpp"
#include "taxarb/gains.hpp"

using namespace taxarb;
using namespace taxarb::testsupport;

namespace {

// One asset quoted at `price` on every node, matching the cash growth so
// that holding it never beats or loses to the bank.
BidAskMarket single_asset_market(const ScenarioTree& tree,
                                 const std::vector<Rational>& price,
                                 const Rational& interest) {
  BidAskMarket market;
  market.tree = tree;
  market.num_assets = 1;
  market.interest = interest;
  for (int node = 0; node < tree.size(); ++node) {
    market.ask[{0, node}] = price[node];
    market.bid[{0, node}] = price[node];
  }
  return market;
}

}  // namespace

TEST_CASE("embedding a two state market prices each purchase date") {
  TaxMarket market = make_one_period(rat(1), {rat(3, 2), rat(3, 4)}, rat(1, 10), rat(1, 4));
  BidAskMarket embedded = embed_tax_market(market);
  CHECK(embedded.num_assets == 1);
  CHECK(embedded.interest == rat(3, 40));
  CHECK(embedded.ask.at({0, 0}) == 1);
  CHECK(embedded.ask.count({0, 1}) == 0);
  CHECK(embedded.ask.count({0, 2}) == 0);
  CHECK(embedded.bid.count({0, 0}) == 0);
  CHECK(embedded.bid.at({0, 1}) == rat(11, 8));
  CHECK(embedded.bid.at({0, 2}) == rat(13, 16));
  CHECK(!bidask_violation(embedded));
}

TEST_CASE("the untaxed embedding collapses to frictionless copies") {
  TaxMarket market = make_chain({rat(1), rat(21, 20), rat(441, 400)}, rat(1, 10), rat(0));
  BidAskMarket embedded = embed_tax_market(market);
  CHECK(embedded.num_assets == 2);
  CHECK(embedded.interest == rat(1, 10));
  CHECK(embedded.ask.at({0, 0}) == rat(1));
  CHECK(embedded.ask.at({1, 1}) == rat(21, 20));
  CHECK(embedded.bid.at({0, 1}) == rat(21, 20));
  CHECK(embedded.bid.at({0, 2}) == rat(441, 400));
  CHECK(embedded.bid.at({1, 2}) == rat(441, 400));
  CHECK(embedded.bid.count({1, 0}) == 0);
  CHECK(embedded.ask.count({0, 1}) == 0);
}

TEST_CASE("embedded strategies earn the tax liquidation value") {
  TaxMarket market = make_one_period(rat(1), {rat(3, 2), rat(3, 4)}, rat(1, 10), rat(1, 4));
  Strategy plan;
  plan.buys[0] = rat(1);
  plan.sells[{0, 1}] = rat(1);
  plan.sells[{0, 2}] = rat(1);
  BidAskStrategy mapped = embed_strategy(market, plan);
  CHECK(mapped.buys.at({0, 0}) == 1);
  CHECK(mapped.sells.at({0, 1}) == 1);
  CHECK(mapped.sells.at({0, 2}) == 1);
  auto value = bidask_liquidation_value(embed_tax_market(market), mapped);
  CHECK(value.at(1) == rat(3, 10));
  CHECK(value.at(2) == rat(-21, 80));
  auto tax_value = liquidation_value(market, plan);
  CHECK(value == tax_value);
}

TEST_CASE("lot by lot embedding matches on random markets") {
  Rng rng(420810);
  for (int trial = 0; trial < 60; ++trial) {
    TaxMarket market = random_market(rng, pick_int(rng, 1, 3), 3);
    Strategy plan = random_strategy(rng, market);
    BidAskMarket embedded = embed_tax_market(market);
    BidAskStrategy mapped = embed_strategy(market, plan);
    REQUIRE(!bidask_strategy_violation(embedded, mapped));
    CHECK(bidask_liquidation_value(embedded, mapped) == liquidation_value(market, plan));
  }
}

TEST_CASE("embedded verdicts match the tax verdicts") {
  Rng rng(111390);
  int arbitrages = 0;
  for (int trial = 0; trial < 40; ++trial) {
    TaxMarket market = random_market(rng, pick_int(rng, 1, 2), 3);
    BidAskVerdict verdict = bidask_check_na(embed_tax_market(market));
    CHECK(verdict.status == check_na(market).status);
    if (verdict.status == ArbitrageStatus::arbitrage) {
      ++arbitrages;
      auto value = bidask_liquidation_value(embed_tax_market(market), verdict.certificate);
      bool positive = false;
      for (const auto& [leaf, wealth] : value) {
        CHECK(wealth >= 0);
        if (wealth > 0) positive = true;
      }
      CHECK(positive);
      CHECK(value == verdict.certificate_value);
    }
  }
  CHECK(arbitrages > 5);
}

TEST_CASE("a bank tracking asset is clean") {
  TaxMarket shape = make_chain({rat(1), rat(11, 10), rat(121, 100)}, rat(1, 10), rat(0));
  BidAskMarket market = single_asset_market(
      shape.tree, {rat(1), rat(11, 10), rat(121, 100)}, rat(1, 10));
  BidAskVerdict verdict = bidask_check_na(market);
  CHECK(verdict.status == ArbitrageStatus::no_arbitrage);
  CHECK(verdict.value == 0);
}

TEST_CASE("sure profit over the spread is arbitrage") {
  TaxMarket shape = make_chain({rat(1), rat(1)}, rat(1, 10), rat(0));
  BidAskMarket market;
  market.tree = shape.tree;
  market.num_assets = 1;
  market.interest = rat(0);
  market.ask[{0, 0}] = rat(1);
  market.bid[{0, 1}] = rat(2);
  BidAskVerdict verdict = bidask_check_na(market);
  CHECK(verdict.status == ArbitrageStatus::arbitrage);
  CHECK(verdict.value == 1);
  CHECK(verdict.certificate.buys.at({0, 0}) == 1);
  CHECK(verdict.certificate_value.at(1) == 1);
}

TEST_CASE("position caps below the profitable scale kill the arbitrage") {
  TaxMarket shape = make_chain({rat(1), rat(1)}, rat(1, 10), rat(0));
  BidAskMarket market;
  market.tree = shape.tree;
  market.num_assets = 1;
  market.interest = rat(0);
  market.ask[{0, 0}] = rat(1);
  market.bid[{0, 1}] = rat(2);
  CHECK(bidask_check_na(market, rat(2)).status == ArbitrageStatus::arbitrage);
  CHECK(bidask_check_na(market, rat(1, 2)).status == ArbitrageStatus::no_arbitrage);
}

TEST_CASE("market defects are reported") {
  TaxMarket shape = make_chain({rat(1), rat(1)}, rat(1, 10), rat(0));
  BidAskMarket market = single_asset_market(shape.tree, {rat(1), rat(1)}, rat(0));
  CHECK(!bidask_violation(market));

  BidAskMarket crossed = market;
  crossed.bid[{0, 0}] = rat(2);
  auto defect = bidask_violation(crossed);
  REQUIRE(defect);
  CHECK(defect->find("bid above ask") != std::string::npos);

  BidAskMarket negative = market;
  negative.bid[{0, 1}] = rat(-1);
  REQUIRE(bidask_violation(negative));

  BidAskMarket stray = market;
  stray.ask[{3, 0}] = rat(1);
  REQUIRE(bidask_violation(stray));

  BidAskMarket discount = market;
  discount.interest = rat(-1, 10);
  REQUIRE(bidask_violation(discount));
}

TEST_CASE("strategy defects are reported") {
  TaxMarket shape = make_chain({rat(1), rat(1)}, rat(1, 10), rat(0));
  BidAskMarket market;
  market.tree = shape.tree;
  market.num_assets = 1;
  market.interest = rat(0);
  market.ask[{0, 0}] = rat(1);
  market.bid[{0, 1}] = rat(2);

  BidAskStrategy plan;
  plan.buys[{0, 0}] = rat(1);
  plan.sells[{0, 1}] = rat(1);
  CHECK(!bidask_strategy_violation(market, plan));

  BidAskStrategy unquoted = plan;
  unquoted.sells[{0, 0}] = rat(1);
  auto defect = bidask_strategy_violation(market, unquoted);
  REQUIRE(defect);
  CHECK(defect->find("no bid") != std::string::npos);

  BidAskStrategy negative = plan;
  negative.buys[{0, 0}] = rat(-1);
  REQUIRE(bidask_strategy_violation(market, negative));

  BidAskStrategy open_position = plan;
  open_position.sells.clear();
  defect = bidask_strategy_violation(market, open_position);
  REQUIRE(defect);
  CHECK(defect->find("not liquidated") != std::string::npos);
}

TEST_CASE("the perturbation stays strictly inside the spread") {
  TaxMarket market = make_one_period(rat(1), {rat(3, 2), rat(3, 4)}, rat(1, 10), rat(1, 4));
  PerturbedPrices prices = perturb_robust(market);
  CHECK(prices.ask_c.at({0, 0}) == rat(171, 172));
  CHECK(prices.bid_c.at({0, 1}) == rat(221, 160));
  CHECK(prices.bid_c.at({0, 2}) == rat(131, 160));

  BidAskMarket embedded = embed_tax_market(market);
  for (const auto& [key, price] : prices.ask_c) CHECK(price < embedded.ask.at(key));
  for (const auto& [key, price] : prices.bid_c) CHECK(price > embedded.bid.at(key));
}

TEST_CASE("perturbing an untaxed market is refused") {
  TaxMarket market = make_chain({rat(1), rat(1)}, rat(1, 10), rat(0));
  CHECK_THROWS_WITH_AS(perturb_robust(market), "tax rate must be positive",
                       std::domain_error);
}

TEST_CASE("perturbed prices strictly favor the trader on random markets") {
  Rng rng(741852);
  int measured = 0;
  for (int trial = 0; trial < 40; ++trial) {
    TaxMarket market = random_market(rng, pick_int(rng, 1, 3), 3);
    if (market.tax == 0) continue;
    ++measured;
    BidAskMarket embedded = embed_tax_market(market);
    PerturbedPrices prices = perturb_robust(market);
    CHECK(prices.ask_c.size() == embedded.ask.size());
    CHECK(prices.bid_c.size() == embedded.bid.size());
    for (const auto& [key, price] : prices.ask_c) {
      const Rational& original = embedded.ask.at(key);
      if (original > 0) {
        CHECK(price < original);
      } else {
        CHECK(price == 0);
      }
    }
    for (const auto& [key, price] : prices.bid_c) {
      const Rational& basis =
          market.price[market.tree.ancestor_at(key.second, key.first)];
      if (basis > 0) {
        CHECK(price > embedded.bid.at(key));
      } else {
        CHECK(price == embedded.bid.at(key));
      }
    }
  }
  CHECK(measured > 20);
}

TEST_CASE("never sure markets stay clean after the perturbation") {
  Rng rng(530021);
  int measured = 0;
  for (int trial = 0; trial < 25; ++trial) {
    TaxMarket market = random_never_sure_market(rng, pick_int(rng, 1, 2), 3);
    if (!check_never_sure(market).overall) continue;
    ++measured;
    REQUIRE(check_na(market).status == ArbitrageStatus::no_arbitrage);
    BidAskMarket perturbed = perturbed_market(market);
    CHECK(!bidask_violation(perturbed));
    CHECK(bidask_check_na(perturbed).status == ArbitrageStatus::no_arbitrage);
  }
  CHECK(measured > 10);
}
