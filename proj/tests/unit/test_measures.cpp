#include "taxarb/measures.hpp"

#include "doctest.h"

#include <cstdlib>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "support/builders.hpp"
#include "support/generators.hpp"
#include "taxarb/arbitrage.hpp"
#include "taxarb/gains.hpp"

using namespace taxarb;
using namespace taxarb::testsupport;

namespace {

SeparatingMeasure uniform_measure(const TaxMarket& market) {
  SeparatingMeasure q;
  int n = static_cast<int>(market.tree.leaves().size());
  for (int leaf : market.tree.leaves()) q.weights[leaf] = rat(1, n);
  return q;
}

std::map<int, Rational> date_zero_gains(const TaxMarket& market) {
  std::map<int, Rational> gains;
  for (int leaf : market.tree.leaves()) gains[leaf] = lot_gain(market, 0, leaf);
  return gains;
}

// Re-evaluates a stopping rule from scratch: walk every path from the
// start date to its first stop label and accumulate the weighted gain.
std::optional<Rational> stopping_value(const TaxMarket& market,
                                       const SeparatingMeasure& q,
                                       const StoppingTime& tau) {
  Rational total = 0;
  for (int leaf : market.tree.leaves()) {
    bool stopped = false;
    for (int t = tau.start; t <= market.tree.horizon && !stopped; ++t) {
      int node = market.tree.ancestor_at(leaf, t);
      auto it = tau.stop.find(node);
      if (it == tau.stop.end()) return std::nullopt;
      if (it->second) {
        stopped = true;
        if (t > tau.start) total += q.weights.at(leaf) * lot_gain(market, tau.start, node);
      }
    }
    if (!stopped) return std::nullopt;
  }
  return total;
}

Rational weight_sum(const SeparatingMeasure& q) {
  Rational total = 0;
  for (const auto& [leaf, w] : q.weights) total += w;
  return total;
}

}  // namespace

TEST_CASE("a two state market yields a positive normalized measure") {
  TaxMarket market = make_one_period(rat(1), {rat(3, 2), rat(3, 4)}, rat(1, 10), rat(0));
  auto q = find_separating_measure(market);
  REQUIRE(q);
  CHECK(weight_sum(*q) == 1);
  for (const auto& [leaf, w] : q->weights) CHECK(w > 0);
  CHECK(measure_expectation(*q, date_zero_gains(market)) <= 0);
  CHECK(verify_stopping_constraints(market, *q).ok);

  // The weights that price the asset at the bank's growth rate solve
  // q_up * (2/5) = q_down * (7/20) under the two one period gains.
  SeparatingMeasure balanced;
  balanced.weights[1] = rat(7, 15);
  balanced.weights[2] = rat(8, 15);
  CHECK(measure_expectation(balanced, date_zero_gains(market)) == 0);
  CHECK(verify_stopping_constraints(market, balanced).ok);
}

TEST_CASE("an arbitrage market admits no separating measure") {
  TaxMarket market =
      make_chain({rat(1), rat(11, 10), rat(121, 100)}, rat(1, 10), rat(1, 4));
  CHECK(!find_separating_measure(market));
}

TEST_CASE("the returned weights blend path probabilities with the program duals") {
  Rng rng(922001);
  int measured = 0;
  for (int trial = 0; trial < 40; ++trial) {
    TaxMarket market = random_market(rng, pick_int(rng, 1, 3), 3);
    ArbitrageVerdict verdict = check_na(market);
    auto q = find_separating_measure(market);
    if (verdict.status == ArbitrageStatus::arbitrage) {
      CHECK(!q);
      continue;
    }
    REQUIRE(q);
    ++measured;
    Rational scale = 1;
    for (const auto& [leaf, lambda] : verdict.dual_weights) scale += lambda;
    for (int leaf : market.tree.leaves()) {
      Rational blended = path_probability(market.tree, leaf) + verdict.dual_weights.at(leaf);
      CHECK(q->weights.at(leaf) * scale == blended);
    }
  }
  CHECK(measured > 5);
}

TEST_CASE("stopping rules on a surely profitable market expose a violation") {
  TaxMarket market = make_one_period(rat(1), {rat(3, 2), rat(5, 4)}, rat(1, 10), rat(1, 4));
  StoppingCheck check = verify_stopping_constraints(market, uniform_measure(market));
  CHECK(!check.ok);
  REQUIRE(check.witness);
  CHECK(check.witness->start == 0);
  CHECK(check.expectation == rat(33, 160));
  CHECK(!check.witness->stop.at(0));
  CHECK(check.witness->stop.at(1));
  CHECK(check.witness->stop.at(2));
  auto replayed = stopping_value(market, uniform_measure(market), *check.witness);
  REQUIRE(replayed);
  CHECK(*replayed == check.expectation);
}

TEST_CASE("a market losing to the bank passes every stopping rule") {
  TaxMarket market = make_chain({rat(1), rat(21, 20), rat(441, 400)}, rat(1, 10), rat(1, 2));
  SeparatingMeasure q;
  q.weights[2] = rat(1);
  CHECK(verify_stopping_constraints(market, q).ok);
}

TEST_CASE("the enumeration cap cuts off oversized scans") {
  TaxMarket market = make_one_period(rat(1), {rat(3, 2), rat(3, 4)}, rat(1, 10), rat(0));
  SeparatingMeasure balanced;
  balanced.weights[1] = rat(7, 15);
  balanced.weights[2] = rat(8, 15);
  setenv("TAXARB_STOPPING_CAP", "1", 1);
  CHECK_THROWS_WITH_AS(verify_stopping_constraints(market, balanced),
                       "tree too large for exhaustive verification", std::runtime_error);
  unsetenv("TAXARB_STOPPING_CAP");
  CHECK(verify_stopping_constraints(market, balanced).ok);
}

TEST_CASE("separating measures exist exactly on clean markets") {
  Rng rng(922002);
  for (int trial = 0; trial < 40; ++trial) {
    TaxMarket market = random_market(rng, pick_int(rng, 1, 3), 3);
    bool clean = check_na(market).status == ArbitrageStatus::no_arbitrage;
    auto q = find_separating_measure(market);
    if (clean) {
      REQUIRE(q);
      CHECK(weight_sum(*q) == 1);
      for (const auto& [leaf, w] : q->weights) CHECK(w > 0);
      CHECK(verify_stopping_constraints(market, *q).ok);
    } else {
      CHECK(!q);
      StoppingCheck check = verify_stopping_constraints(market, uniform_measure(market));
      CHECK(!check.ok);
      REQUIRE(check.witness);
      auto replayed = stopping_value(market, uniform_measure(market), *check.witness);
      REQUIRE(replayed);
      CHECK(*replayed == check.expectation);
      CHECK(check.expectation > 0);
    }
  }
}

TEST_CASE("repeated extraction returns identical weights") {
  TaxMarket market = make_one_period(rat(1), {rat(3, 2), rat(1, 2)}, rat(1, 10), rat(1, 4));
  auto first = find_separating_measure(market);
  auto second = find_separating_measure(market);
  REQUIRE(first);
  REQUIRE(second);
  CHECK(first->weights == second->weights);
}

TEST_CASE("one atom may promise a gain while no stopping rule collects") {
  TaxMarket market = make_one_period(rat(1), {rat(3, 2), rat(1, 2)}, rat(1, 10), rat(1, 4));
  auto q = find_separating_measure(market);
  REQUIRE(q);
  CHECK(q->weights.at(1) * lot_gain(market, 0, 1) > 0);
  CHECK(verify_stopping_constraints(market, *q).ok);
}

TEST_CASE("every start date has a flat envelope under the dual measure") {
  Rng rng(922003);
  int measured = 0;
  for (int trial = 0; trial < 25 && measured < 12; ++trial) {
    TaxMarket market = random_market(rng, pick_int(rng, 1, 3), 3);
    auto q = find_separating_measure(market);
    if (!q) continue;
    ++measured;
    for (int i = 0; i <= market.tree.horizon; ++i) {
      SnellEnvelope env = snell_martingale_part(market, *q, i);
      for (int node : market.tree.at_time(i)) {
        CHECK(env.envelope.at(node) == 0);
      }
    }
  }
  CHECK(measured >= 8);
}

TEST_CASE("a creeping loss keeps the envelope at zero and the martingale flat") {
  TaxMarket market = make_chain({rat(1), rat(21, 20), rat(441, 400)}, rat(1, 10), rat(1, 2));
  SeparatingMeasure q;
  q.weights[2] = rat(1);
  SnellEnvelope env = snell_martingale_part(market, q, 0);
  CHECK(env.envelope.at(2) == rat(-41, 800));
  CHECK(env.envelope.at(1) == rat(-21, 800));
  CHECK(env.envelope.at(0) == 0);
  CHECK(env.martingale.at(0) == 0);
  CHECK(env.martingale.at(1) == 0);
  CHECK(env.martingale.at(2) == 0);
  CHECK(snell_violations(market, q, env).empty());
}

TEST_CASE("a sure jump breaks the martingale dominance") {
  TaxMarket market = make_chain({rat(1), rat(6, 5)}, rat(1, 10), rat(1, 4));
  SeparatingMeasure q;
  q.weights[1] = rat(1);
  SnellEnvelope env = snell_martingale_part(market, q, 0);
  CHECK(env.envelope.at(1) == rat(3, 40));
  CHECK(env.envelope.at(0) == rat(3, 40));
  CHECK(env.martingale.at(0) == 0);
  CHECK(env.martingale.at(1) == 0);
  auto findings = snell_violations(market, q, env);
  REQUIRE(!findings.empty());
  bool dominance = false;
  for (const auto& finding : findings) {
    if (finding.find("below the payoff") != std::string::npos) dominance = true;
  }
  CHECK(dominance);
}

TEST_CASE("the dual measure certifies every envelope invariant") {
  Rng rng(922004);
  int measured = 0;
  for (int trial = 0; trial < 25 && measured < 10; ++trial) {
    TaxMarket market = random_market(rng, pick_int(rng, 1, 3), 3);
    auto q = find_separating_measure(market);
    if (!q) continue;
    ++measured;
    for (int i = 0; i <= market.tree.horizon; ++i) {
      SnellEnvelope env = snell_martingale_part(market, *q, i);
      CHECK(snell_violations(market, *q, env).empty());
    }
  }
  CHECK(measured >= 6);
}

TEST_CASE("expected terminal wealth under the dual measure never beats the bank") {
  Rng rng(922005);
  int measured = 0;
  for (int trial = 0; trial < 30 && measured < 15; ++trial) {
    TaxMarket market = random_market(rng, pick_int(rng, 1, 3), 3);
    auto q = find_separating_measure(market);
    if (!q) continue;
    ++measured;
    for (int round = 0; round < 3; ++round) {
      Strategy strategy = random_strategy(rng, market);
      auto value = liquidation_value(market, strategy);
      CHECK(measure_expectation(*q, value) <= 0);
    }
  }
  CHECK(measured >= 8);
}

TEST_CASE("measure defects are reported") {
  TaxMarket market = make_one_period(rat(1), {rat(3, 2), rat(3, 4)}, rat(1, 10), rat(0));

  SeparatingMeasure lopsided;
  lopsided.weights[1] = rat(1, 2);
  lopsided.weights[2] = rat(1, 3);
  auto finding = measure_violation(market, lopsided);
  REQUIRE(finding);
  CHECK(finding->find("sum") != std::string::npos);

  SeparatingMeasure negative;
  negative.weights[1] = rat(3, 2);
  negative.weights[2] = rat(-1, 2);
  finding = measure_violation(market, negative);
  REQUIRE(finding);
  CHECK(finding->find("positive") != std::string::npos);

  SeparatingMeasure off_leaf;
  off_leaf.weights[0] = rat(1, 2);
  off_leaf.weights[1] = rat(1, 2);
  finding = measure_violation(market, off_leaf);
  CHECK(finding);

  SeparatingMeasure missing;
  missing.weights[1] = rat(1);
  finding = measure_violation(market, missing);
  CHECK(finding);

  CHECK(!measure_violation(market, uniform_measure(market)));

  CHECK_THROWS_AS(verify_stopping_constraints(market, lopsided), std::invalid_argument);
  CHECK_THROWS_AS(snell_martingale_part(market, lopsided, 0), std::invalid_argument);
  CHECK_THROWS_AS(snell_martingale_part(market, uniform_measure(market), 3),
                  std::domain_error);
  CHECK_THROWS_AS(snell_martingale_part(market, uniform_measure(market), -1),
                  std::domain_error);
}
