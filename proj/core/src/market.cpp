#include "taxarb/market.hpp"

#include <stdexcept>

namespace taxarb {

ValidationReport validate_market(const TaxMarket& market) {
  ValidationReport report;
  report.violations = tree_violations(market.tree);

  if (market.price.size() != market.tree.nodes.size()) {
    report.violations.push_back("price map does not cover every node");
    return report;
  }
  if (market.rate <= 0) {
    report.violations.push_back("interest rate must be positive");
  }
  if (market.tax < 0 || market.tax >= 1) {
    report.violations.push_back("tax rate out of range");
  }
  for (int i = 0; i < market.tree.size(); ++i) {
    if (market.price[i] < 0) {
      report.violations.push_back("negative price at node " +
                                  std::to_string(market.tree.node(i).id));
    }
  }
  for (int i = 0; i < market.tree.size(); ++i) {
    const TreeNode& node = market.tree.node(i);
    if (node.parent < 0) continue;
    if (market.price[node.parent] == 0 && market.price[i] > 0) {
      report.violations.push_back("zero price followed by positive price at node " +
                                  std::to_string(node.id));
    }
  }
  return report;
}

void require_valid(const TaxMarket& market) {
  ValidationReport report = validate_market(market);
  if (!report.ok()) {
    throw std::invalid_argument("invalid market: " + report.violations.front());
  }
}

Rational node_return(const TaxMarket& market, int node) {
  const TreeNode& n = market.tree.node(node);
  if (n.parent < 0) {
    throw std::invalid_argument("the root has no one period return");
  }
  const Rational& prev = market.price[n.parent];
  const Rational& cur = market.price[node];
  if (prev == 0) {
    if (cur == 0) return rat(0);
    throw std::domain_error("absorbing-zero violated");
  }
  return (cur - prev) / prev;
}

Rational after_tax_growth(const TaxMarket& market) {
  return 1 + (1 - market.tax) * market.rate;
}

}  // namespace taxarb
