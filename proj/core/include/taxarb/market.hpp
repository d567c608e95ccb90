#pragma once

#include "taxarb/rational.hpp"
#include "taxarb/tree.hpp"

#include <string>
#include <vector>

namespace taxarb {

// Single risky asset on an event tree, a riskless rate and a linear tax
// on realized capital gains.
struct TaxMarket {
  ScenarioTree tree;
  std::vector<Rational> price;  // by node index, >= 0
  Rational rate;                // r > 0, per period riskless interest
  Rational tax;                 // alpha in [0, 1)
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Reports every violated invariant: probability structure, price signs,
// rate and tax ranges, and zero prices followed by positive prices.
ValidationReport validate_market(const TaxMarket& market);

// Throws std::invalid_argument with the first violation, if any.
void require_valid(const TaxMarket& market);

// (S_u - S_{u-1}) / S_{u-1} at a non-root node, with 0/0 read as 0.
// A positive price after a zero price has no finite return and throws.
Rational node_return(const TaxMarket& market, int node);

// 1 + (1 - tax) * rate, the after tax growth factor of the riskless leg.
Rational after_tax_growth(const TaxMarket& market);

}  // namespace taxarb
