#include "taxarb/market.hpp"

#include "doctest.h"

#include <stdexcept>
#include <string>

using namespace taxarb;

namespace {

TaxMarket chain_market(std::vector<Rational> prices, Rational rate, Rational tax) {
  TreeBuilder builder;
  int node = builder.add_root();
  for (size_t t = 1; t < prices.size(); ++t) node = builder.add_child(node, rat(1));
  TaxMarket market{builder.build(), std::move(prices), std::move(rate), std::move(tax)};
  return market;
}

bool mentions(const ValidationReport& report, const std::string& needle) {
  for (const std::string& violation : report.violations) {
    if (violation.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("well formed single node market validates") {
  TaxMarket market = chain_market({rat(1)}, rat(1, 25), rat(1, 4));
  CHECK(validate_market(market).ok());
  CHECK_NOTHROW(require_valid(market));
}

TEST_CASE("a zero price must stay zero") {
  TaxMarket market = chain_market({rat(0), rat(1)}, rat(1, 10), rat(1, 4));
  auto report = validate_market(market);
  CHECK(!report.ok());
  CHECK(mentions(report, "zero price followed by positive price"));
  CHECK_THROWS_AS(require_valid(market), std::invalid_argument);
}

TEST_CASE("rate and tax ranges are enforced") {
  CHECK(mentions(validate_market(chain_market({rat(1)}, rat(1, 10), rat(1))),
                 "tax rate out of range"));
  CHECK(mentions(validate_market(chain_market({rat(1)}, rat(1, 10), rat(-1, 4))),
                 "tax rate out of range"));
  CHECK(mentions(validate_market(chain_market({rat(1)}, rat(0), rat(1, 4))),
                 "interest rate"));
  CHECK(mentions(validate_market(chain_market({rat(1), rat(-1)}, rat(1, 10), rat(0))),
                 "negative price"));
}

TEST_CASE("returns follow the price ratio with zero over zero as zero") {
  TaxMarket market = chain_market({rat(1), rat(11, 10)}, rat(1, 10), rat(0));
  CHECK(node_return(market, 1) == rat(1, 10));

  TaxMarket falling = chain_market({rat(4), rat(3)}, rat(1, 10), rat(0));
  CHECK(node_return(falling, 1) == rat(-1, 4));

  TaxMarket absorbed = chain_market({rat(1), rat(0), rat(0)}, rat(1, 10), rat(0));
  CHECK(node_return(absorbed, 1) == rat(-1));
  CHECK(node_return(absorbed, 2) == rat(0));

  TaxMarket revived = chain_market({rat(0), rat(1)}, rat(1, 10), rat(0));
  CHECK_THROWS_WITH_AS(node_return(revived, 1),
                       doctest::Contains("absorbing-zero violated"),
                       std::domain_error);
}

TEST_CASE("after tax growth factor") {
  TaxMarket market = chain_market({rat(1)}, rat(1, 10), rat(1, 4));
  CHECK(after_tax_growth(market) == rat(43, 40));
  market.tax = 0;
  CHECK(after_tax_growth(market) == rat(11, 10));
}

TEST_CASE("returns are invariant under scaling a subtree") {
  TreeBuilder builder;
  int root = builder.add_root();
  int mid = builder.add_child(root, rat(1));
  builder.add_child(mid, rat(1, 2));
  builder.add_child(mid, rat(1, 2));
  TaxMarket market{builder.build(), {rat(1), rat(2), rat(3), rat(1)}, rat(1, 10), rat(0)};

  TaxMarket scaled = market;
  for (int v : {1, 2, 3}) scaled.price[static_cast<size_t>(v)] *= rat(7);
  CHECK(node_return(scaled, 2) == node_return(market, 2));
  CHECK(node_return(scaled, 3) == node_return(market, 3));
}
