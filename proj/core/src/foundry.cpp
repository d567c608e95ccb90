#include "taxarb/foundry.hpp"

#include "taxarb/arbitrage.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace taxarb {

namespace {

constexpr int kIterationCap = 4096;
constexpr long kSearchCap = 1 << 20;

void require_rates(const Rational& tax, const Rational& rate) {
  if (tax < 0 || tax >= 1) throw std::invalid_argument("tax rate out of range");
  if (rate <= 0) throw std::invalid_argument("interest rate must be positive");
}

void require_taxed(const Rational& tax, const Rational& rate) {
  require_rates(tax, rate);
  if (tax == 0) throw std::domain_error("tax rate must be positive");
}

Rational growth_of(const Rational& tax, const Rational& rate) {
  return 1 + (1 - tax) * rate;
}

[[noreturn]] void iteration_cap() {
  throw std::runtime_error("construction iteration cap exceeded");
}

Certification strict_cert(std::string id, Rational residual) {
  const bool ok = residual > 0;
  return Certification{std::move(id), std::move(residual), ok};
}

Certification exact_cert(std::string id, Rational residual) {
  const bool ok = residual == 0;
  return Certification{std::move(id), std::move(residual), ok};
}

}  // namespace

BreakEven break_even(const Rational& ratio, const Rational& tax, const Rational& rate,
                     const std::optional<Rational>& sharper) {
  require_rates(tax, rate);
  if (ratio < 0) {
    throw std::invalid_argument("book profit ratio must be nonnegative");
  }
  if (sharper && *sharper <= ratio) {
    throw std::invalid_argument("sharper ratio must exceed the base ratio");
  }
  const Rational g = growth_of(tax, rate);
  const Rational held = (1 + ratio) * (1 - tax);
  const Rational r_bar = ((held + tax) * g - tax) / held - 1;

  BreakEven out;
  out.R = ratio;
  out.r_bar = r_bar;
  if (tax == 0) {
    out.certified.push_back(exact_cert("untaxed-identity", r_bar - rate));
  } else {
    out.certified.push_back(strict_cert("after-tax-floor", r_bar - (1 - tax) * rate));
    Rational ceiling = rate - r_bar;
    const bool ok = ceiling >= 0;
    out.certified.push_back(Certification{"pretax-ceiling", std::move(ceiling), ok});
  }
  if (sharper) {
    const Rational lhs = (1 + *sharper) * (1 + r_bar) * (1 - tax) + tax;
    const Rational rhs = ((1 + *sharper) * (1 - tax) + tax) * g;
    if (tax == 0) {
      out.certified.push_back(exact_cert("sharper-ratio-ties", lhs - rhs));
    } else {
      out.certified.push_back(strict_cert("sharper-ratio-outperforms", lhs - rhs));
    }
  }
  return out;
}

CompoundBreakEven compound_break_even(int periods, const Rational& tax,
                                      const Rational& rate) {
  if (periods < 0) throw std::invalid_argument("negative holding period");
  require_taxed(tax, rate);
  const Rational g = growth_of(tax, rate);
  const Rational bank_n = rational_pow(g, periods);
  const Rational bank_once = bank_n * g;
  const Rational bank_twice = bank_once * g;
  const Rational held = bank_n - tax;
  const Rational root = (bank_once - tax) / held;

  Rational delta = (root - 1 - (1 - tax) * rate) / 2;
  Rational r_bar;
  bool found = false;
  for (int k = 0; k < kIterationCap; ++k) {
    const Rational candidate = root - 1 - delta;
    const Rational twice = held * (1 + candidate) * (1 + candidate) + tax;
    if (twice > bank_twice) {
      r_bar = candidate;
      found = true;
      break;
    }
    delta /= 2;
  }
  if (!found) iteration_cap();

  CompoundBreakEven out;
  out.R = held / (1 - tax) - 1;
  out.r_bar = r_bar;
  const Rational once = held * (1 + r_bar) + tax;
  const Rational twice = held * (1 + r_bar) * (1 + r_bar) + tax;
  out.certified.push_back(strict_cert("hold-once-below-bank", bank_once - once));
  out.certified.push_back(strict_cert("hold-twice-beats-bank", twice - bank_twice));
  return out;
}

OutperformanceCheck outperformance_persists(const Rational& r1, int m1, int m2,
                                            const Rational& tax, const Rational& rate) {
  if (m1 < 0 || m2 < 0) throw std::invalid_argument("negative holding period");
  if (m1 > m2) throw std::invalid_argument("holding periods out of order");
  require_rates(tax, rate);
  if (r1 <= -1) throw std::invalid_argument("stock return must exceed minus one");
  const Rational g = growth_of(tax, rate);
  const Rational up = 1 + r1;
  OutperformanceCheck out;
  out.premise = rational_pow(up, m1) * (1 - tax) + tax >= rational_pow(g, m1);
  out.conclusion = rational_pow(up, m2) * (1 - tax) + tax >= rational_pow(g, m2);
  out.implication_holds = !out.premise || out.conclusion;
  return out;
}

Rational kappa_maximality_threshold(int t, int horizon, const Rational& tax,
                                    const Rational& rate) {
  require_rates(tax, rate);
  if (t < 2 || t >= horizon) throw std::invalid_argument("gap period out of range");
  const Rational g = growth_of(tax, rate);
  const Rational pre = rational_pow(g, t - 1) - tax;
  const Rational post = rational_pow(g, horizon - t) - tax;
  const Rational full = rational_pow(g, horizon) - tax;
  return (1 - tax) * full / (pre * post) - 1;
}

ExampleInstance gen_kappa_maximality(int t, int horizon, const Rational& tax,
                                     const Rational& rate, const Rational& kappa_bound) {
  const Rational threshold = kappa_maximality_threshold(t, horizon, tax, rate);
  if (kappa_bound <= threshold) {
    throw std::invalid_argument("kappa not above maximality bound");
  }
  const Rational g = growth_of(tax, rate);
  const Rational drop = (threshold + kappa_bound) / 2;
  const int pre_span = t - 1;
  const int post_span = horizon - t;
  const Rational bank_pre = rational_pow(g, pre_span);
  const Rational bank_post = rational_pow(g, post_span);
  const Rational bank_full = rational_pow(g, horizon);

  // Growth factors are bisected toward the equality roots of the two
  // underperformance constraints until holding across the drop turns
  // profitable; the lower ends stay strictly feasible throughout.
  auto fits = [&](const Rational& factor, int span, const Rational& bank) -> bool {
    const Rational lhs = rational_pow(factor, span) * (1 - tax) + tax;
    return lhs < bank;
  };
  Rational lo_pre = 1;
  Rational hi_pre = (bank_pre - tax) / (1 - tax);
  Rational lo_post = 1;
  Rational hi_post = (bank_post - tax) / (1 - tax);
  auto step_pre = [&]() {
    const Rational mid = (lo_pre + hi_pre) / 2;
    if (fits(mid, pre_span, bank_pre)) lo_pre = mid; else hi_pre = mid;
  };
  auto step_post = [&]() {
    const Rational mid = (lo_post + hi_post) / 2;
    if (fits(mid, post_span, bank_post)) lo_post = mid; else hi_post = mid;
  };
  auto held_over = [&]() -> Rational {
    return rational_pow(lo_pre, pre_span) * (1 + drop) *
               rational_pow(lo_post, post_span) * (1 - tax) + tax;
  };
  bool certified = false;
  for (int k = 0; k < kIterationCap; ++k) {
    step_pre();
    step_post();
    if (held_over() > bank_full) {
      certified = true;
      break;
    }
  }
  if (!certified) iteration_cap();
  for (int k = 0; lo_pre == 1 && k < kIterationCap; ++k) step_pre();
  for (int k = 0; lo_post == 1 && k < kIterationCap; ++k) step_post();
  if (lo_pre == 1 || lo_post == 1) iteration_cap();

  Rational jump;
  {
    const Rational pre_growth = rational_pow(lo_pre, pre_span);
    const Rational bank_t = rational_pow(g, t);
    Rational step_size = rate;
    bool ok = false;
    for (int k = 0; k < kIterationCap; ++k) {
      const Rational candidate = drop + step_size;
      const Rational lhs = pre_growth * (1 + candidate) * (1 - tax) + tax;
      if (lhs > bank_t) {
        jump = candidate;
        ok = true;
        break;
      }
      step_size *= 2;
    }
    if (!ok) iteration_cap();
  }

  TreeBuilder builder;
  int node = builder.add_root();
  std::vector<int> trunk = {node};
  for (int u = 1; u <= t - 1; ++u) {
    node = builder.add_child(node, rat(1));
    trunk.push_back(node);
  }
  const int fork = node;
  std::vector<int> drop_path = {builder.add_child(fork, rat(1, 2))};
  for (int u = t + 1; u <= horizon; ++u) {
    drop_path.push_back(builder.add_child(drop_path.back(), rat(1)));
  }
  std::vector<int> jump_path = {builder.add_child(fork, rat(1, 2))};
  for (int u = t + 1; u <= horizon; ++u) {
    jump_path.push_back(builder.add_child(jump_path.back(), rat(1)));
  }
  ScenarioTree tree = builder.build();

  const Rational r1 = lo_pre - 1;
  const Rational r3 = lo_post - 1;
  const Rational pre_growth = rational_pow(lo_pre, pre_span);
  std::vector<Rational> tilde(tree.size());
  std::vector<Rational> hat(tree.size());
  for (int u = 0; u <= t - 1; ++u) {
    const Rational p = rational_pow(lo_pre, u);
    tilde[trunk[u]] = p;
    hat[trunk[u]] = p;
  }
  for (int i = 0; i < static_cast<int>(drop_path.size()); ++i) {
    const Rational tail = rational_pow(lo_post, i);
    hat[drop_path[i]] = pre_growth * tail;
    tilde[drop_path[i]] = pre_growth * (1 + drop) * tail;
  }
  for (int id : jump_path) {
    hat[id] = pre_growth;
    tilde[id] = pre_growth * (1 + jump);
  }
  const int drop_leaf = drop_path.back();
  const int jump_node = jump_path.front();

  TaxMarket market{tree, std::move(tilde), rate, tax};
  require_valid(market);
  TaxMarket hat_market{std::move(tree), std::move(hat), rate, tax};
  require_valid(hat_market);

  Strategy plan;
  plan.buys[0] = 1;
  plan.sells[{0, drop_leaf}] = 1;
  plan.sells[{0, jump_node}] = 1;

  ExampleInstance out;
  out.market = std::move(market);
  out.reduced = ReducedMarket{std::move(hat_market), t};
  out.strategies.push_back(std::move(plan));
  out.parameters = {{"r1", r1},          {"r2-low", drop},       {"r2-high", jump},
                    {"r3", r3},          {"threshold", threshold}, {"kappa", kappa_bound}};

  out.certified.push_back(strict_cert("drop-below-boundary", kappa_bound - drop));
  out.certified.push_back(strict_cert("drop-above-threshold", drop - threshold));
  const Rational pre_lhs = pre_growth * (1 - tax) + tax;
  out.certified.push_back(strict_cert("pre-gap-growth-below-bank", bank_pre - pre_lhs));
  const Rational post_lhs = rational_pow(lo_post, post_span) * (1 - tax) + tax;
  out.certified.push_back(strict_cert("post-gap-growth-below-bank", bank_post - post_lhs));
  out.certified.push_back(strict_cert("hold-through-gap-profit-on-drop",
                                      held_over() - bank_full));
  const Rational early = pre_growth * (1 + jump) * (1 - tax) + tax;
  out.certified.push_back(strict_cert("early-sale-profit-on-jump",
                                      early - rational_pow(g, t)));

  const ReducedArbitrageVerdict hat_verdict = check_na_reduced(*out.reduced);
  out.certified.push_back(Certification{
      "reduced-model-clean", hat_verdict.value,
      hat_verdict.status == ArbitrageStatus::no_arbitrage && hat_verdict.value == 0});

  const std::map<int, Rational> payoff =
      liquidation_value(out.market, out.strategies[0]);
  Rational worst = payoff.begin()->second;
  for (const auto& [leaf, value] : payoff) {
    if (value < worst) worst = value;
  }
  const bool playable = !strategy_violation(out.market, out.strategies[0]);
  out.certified.push_back(
      Certification{"pasted-model-arbitrage", worst, playable && worst > 0});
  return out;
}

ExampleInstance gen_hedge_pair(const Rational& tax, const Rational& rate) {
  require_taxed(tax, rate);
  CompoundBreakEven pair = compound_break_even(1, tax, rate);
  const Rational r_bar = pair.r_bar;
  const Rational g = growth_of(tax, rate);
  const Rational bank_three = rational_pow(g, 3);
  const Rational up = 1 + r_bar;
  const Rational unwind = (1 - tax) * g * up;
  const Rational early_sale = (up * (1 + rate) * (1 - tax) + tax) * g - bank_three;
  const Rational late_hold = up * up * (1 + rate) * (1 - tax) + tax - bank_three;
  const Rational hold_slope = up * up * (1 - tax);

  // eps2 is the exact root of the payoff balance at the chosen eps1, so the
  // two leaf values vanish identically rather than approximately.
  Rational eps1 = rate / 2;
  Rational eps2;
  bool found = false;
  for (int k = 0; k < kIterationCap; ++k) {
    const Rational denom = late_hold + eps1 * (unwind - hold_slope);
    if (denom > 0) {
      const Rational candidate = -eps1 * early_sale / denom;
      const Rational dip_hold = late_hold - hold_slope * eps1;
      const Rational jump_sale = early_sale + unwind * candidate;
      if (candidate > 0 && dip_hold > 0 && jump_sale < 0) {
        eps2 = candidate;
        found = true;
        break;
      }
    }
    eps1 /= 2;
  }
  if (!found) iteration_cap();
  const Rational dip_hold = late_hold - hold_slope * eps1;
  const Rational jump_sale = early_sale + unwind * eps2;
  const Rational ratio = dip_hold / (unwind * eps1);

  TreeBuilder builder;
  const int root = builder.add_root();
  const int mid = builder.add_child(root, rat(1));
  const int dip = builder.add_child(mid, rat(1, 2));
  const int dip_leaf = builder.add_child(dip, rat(1));
  const int jump = builder.add_child(mid, rat(1, 2));
  const int crash_leaf = builder.add_child(jump, rat(1));
  ScenarioTree tree = builder.build();

  std::vector<Rational> price(tree.size());
  price[root] = 1;
  price[mid] = up;
  price[dip] = up * (1 + rate - eps1);
  price[dip_leaf] = up * up * (1 + rate - eps1);
  price[jump] = up * (1 + rate + eps2);
  price[crash_leaf] = 0;
  TaxMarket market{std::move(tree), std::move(price), rate, tax};
  require_valid(market);

  Strategy plan;
  plan.buys[root] = 1;
  plan.buys[mid] = ratio;
  plan.sells[{0, dip_leaf}] = 1;
  plan.sells[{0, jump}] = 1;
  plan.sells[{1, dip}] = ratio;
  plan.sells[{1, jump}] = ratio;

  ExampleInstance out;
  out.market = std::move(market);
  out.strategies.push_back(std::move(plan));
  out.parameters = {{"r-bar", r_bar}, {"eps1", eps1}, {"eps2", eps2},
                    {"hedge-ratio", ratio}};
  for (Certification& cert : pair.certified) out.certified.push_back(std::move(cert));
  out.certified.push_back(strict_cert("long-profit-on-dip-branch", dip_hold));
  out.certified.push_back(strict_cert("long-loss-on-jump-branch", -jump_sale));
  out.certified.push_back(strict_cert("short-dip-loss", unwind * eps1));
  out.certified.push_back(strict_cert("short-jump-gain", unwind * eps2));

  Rational balance = eps1 * jump_sale + eps2 * dip_hold;
  bool level = balance == 0 && !strategy_violation(out.market, out.strategies[0]);
  for (const auto& [leaf, value] : liquidation_value(out.market, out.strategies[0])) {
    level = level && value == 0;
  }
  out.certified.push_back(Certification{"hedge-balance", std::move(balance), level});

  const ArbitrageVerdict verdict = check_na(out.market);
  out.certified.push_back(Certification{
      "model-clean", verdict.value,
      verdict.status == ArbitrageStatus::no_arbitrage && verdict.value == 0});
  return out;
}

ScaleDivergence gen_scale_divergence(const Rational& tax, const Rational& rate,
                                     int depth) {
  require_taxed(tax, rate);
  if (depth < 1) throw std::invalid_argument("truncation depth must be positive");
  const Rational g = growth_of(tax, rate);
  const Rational bank_two = g * g;
  const Rational bank_three = bank_two * g;
  const Rational bank_four = bank_three * g;
  CompoundBreakEven pair = compound_break_even(2, tax, rate);
  const Rational r1 = pair.r_bar;
  const Rational r2 = (bank_two - tax) / ((1 + rate) * (1 - tax)) - 1;
  const Rational u1 = 1 + r1;
  const Rational stack = u1 * (1 + rate);
  const Rational unwind = stack * (1 - tax) * g;

  Rational eps2 = rate / 2;
  {
    bool ok = false;
    for (int k = 0; k < kIterationCap; ++k) {
      const Rational lhs = stack * (1 + r2 + eps2) * (1 - tax) + tax;
      if (lhs < bank_three && r2 + eps2 < rate) {
        ok = true;
        break;
      }
      eps2 /= 2;
    }
    if (!ok) iteration_cap();
  }
  Rational eps1 = r2 / 2;
  {
    bool ok = false;
    for (int k = 0; k < kIterationCap; ++k) {
      const Rational lhs = u1 * stack * (1 + r2 - eps1) * (1 - tax) + tax;
      if (lhs > bank_four) {
        ok = true;
        break;
      }
      eps1 /= 2;
    }
    if (!ok) iteration_cap();
  }

  // Per branch, the crash side spread shrinks like 1/n while the recovery
  // side spread is the largest 1/k that keeps the settled crash payoff
  // strictly positive.
  mpz_class k_floor;
  mpz_fdiv_q(k_floor.get_mpz_t(), eps1.get_den().get_mpz_t(),
             eps1.get_num().get_mpz_t());
  const long k_start = k_floor.get_si() + 1;
  std::vector<Rational> eps_up(depth), eps_down(depth);
  for (int n = 1; n <= depth; ++n) {
    Rational down = rat(1, n);
    if (eps2 < down) down = eps2;
    eps_down[n - 1] = down;
    const Rational short_gain = unwind * down;
    const Rational crash_sale =
        g * (stack * (1 + r2 + down) * (1 - tax) + tax - bank_three);
    bool ok = false;
    for (long k = k_start; k < k_start + kSearchCap; ++k) {
      const Rational e1 = rat(1, k);
      const Rational hold_gain =
          u1 * stack * (1 + r2 - e1) * (1 - tax) + tax - bank_four;
      const Rational margin = short_gain * hold_gain + 2 * crash_sale * unwind * e1;
      if (margin > 0) {
        eps_up[n - 1] = e1;
        ok = true;
        break;
      }
    }
    if (!ok) iteration_cap();
  }

  TreeBuilder builder;
  const int root = builder.add_root();
  const int first = builder.add_child(root, rat(1));
  std::vector<int> fans(depth), ups(depth), downs(depth), recs(depth), crashes(depth);
  for (int n = 0; n < depth; ++n) {
    fans[n] = builder.add_child(first, rat(1, depth));
    ups[n] = builder.add_child(fans[n], rat(1, 2));
    downs[n] = builder.add_child(fans[n], rat(1, 2));
    recs[n] = builder.add_child(ups[n], rat(1));
    crashes[n] = builder.add_child(downs[n], rat(1));
  }
  ScenarioTree tree = builder.build();
  std::vector<Rational> price(tree.size());
  price[root] = 1;
  price[first] = u1;
  for (int n = 0; n < depth; ++n) {
    price[fans[n]] = stack;
    price[ups[n]] = stack * (1 + r2 - eps_up[n]);
    price[downs[n]] = stack * (1 + r2 + eps_down[n]);
    price[recs[n]] = price[ups[n]] * u1;
    price[crashes[n]] = 0;
  }

  ScaleDivergence family;
  family.instance.market = TaxMarket{std::move(tree), std::move(price), rate, tax};
  const TaxMarket& market = family.instance.market;
  require_valid(market);
  family.recovery_leaves = recs;
  family.crash_leaves = crashes;
  family.ratios.resize(depth);
  family.uniform_floor = g * (stack * (1 + r2) * (1 - tax) + tax - bank_three);

  Rational min_hold, min_unwound, min_short_gain, min_crash_sale, min_margin;
  for (int n = 0; n < depth; ++n) {
    const Rational hold_gain =
        u1 * stack * (1 + r2 - eps_up[n]) * (1 - tax) + tax - bank_four;
    const Rational unwound = unwind * eps_up[n];
    const Rational short_gain = unwind * eps_down[n];
    const Rational crash_sale =
        g * (stack * (1 + r2 + eps_down[n]) * (1 - tax) + tax - bank_three);
    const Rational margin =
        short_gain * hold_gain + 2 * crash_sale * unwind * eps_up[n];
    family.ratios[n] = hold_gain / unwound;
    family.limit_payoff[recs[n]] = 0;
    family.limit_payoff[crashes[n]] = crash_sale + family.ratios[n] * short_gain;
    if (n == 0 || hold_gain < min_hold) min_hold = hold_gain;
    if (n == 0 || unwound < min_unwound) min_unwound = unwound;
    if (n == 0 || short_gain < min_short_gain) min_short_gain = short_gain;
    if (n == 0 || -crash_sale < min_crash_sale) min_crash_sale = -crash_sale;
    if (n == 0 || margin < min_margin) min_margin = margin;
  }

  for (int m = 1; m <= depth; ++m) {
    Strategy plan;
    plan.buys[root] = 1;
    plan.buys[first] = rat(m);
    for (int n = 0; n < depth; ++n) {
      plan.sells[{0, recs[n]}] = 1;
      plan.sells[{0, downs[n]}] = 1;
      Rational kept = rat(m);
      if (family.ratios[n] < kept) kept = family.ratios[n];
      if (rat(m) - kept > 0) plan.sells[{1, fans[n]}] = rat(m) - kept;
      plan.sells[{1, ups[n]}] = kept;
      plan.sells[{1, downs[n]}] = kept;
    }
    family.instance.strategies.push_back(std::move(plan));
  }

  family.instance.parameters = {{"r1", r1}, {"r2", r2}, {"eps1", eps1},
                                {"eps2", eps2}};
  std::vector<Certification>& certs = family.instance.certified;
  certs.push_back(strict_cert("hold-three-below-bank",
                              bank_three - (stack * (1 + r2) * (1 - tax) + tax)));
  certs.push_back(strict_cert("hold-four-beats-bank",
                              u1 * stack * (1 + r2) * (1 - tax) + tax - bank_four));
  certs.push_back(strict_cert("r1-below-r2", r2 - r1));
  certs.push_back(strict_cert(
      "jump-stays-below-bank",
      bank_three - (stack * (1 + r2 + eps2) * (1 - tax) + tax)));
  certs.push_back(strict_cert("jump-purchase-loses", rate - (r2 + eps2)));
  certs.push_back(strict_cert("deep-hold-gains-on-recovery", min_hold));
  certs.push_back(strict_cert("short-leg-loses-on-recovery", min_unwound));
  certs.push_back(strict_cert("short-leg-gains-on-crash", min_short_gain));
  certs.push_back(strict_cert("crash-sale-loses", min_crash_sale));
  certs.push_back(strict_cert("profit-floor-positive", min_margin));
  return family;
}

SeparatingBoundReport separating_bound_probe(
    const ScaleDivergence& family, const std::optional<SeparatingMeasure>& candidate) {
  const TaxMarket& market = family.instance.market;
  SeparatingMeasure measure;
  if (candidate) {
    measure = *candidate;
  } else {
    const std::vector<int> leaves = market.tree.leaves();
    for (int leaf : leaves) {
      measure.weights[leaf] = rat(1, static_cast<long>(leaves.size()));
    }
  }
  if (auto problem = measure_violation(market, measure)) {
    throw std::invalid_argument("invalid measure: " + *problem);
  }
  SeparatingBoundReport out;
  for (const Strategy& plan : family.instance.strategies) {
    out.strategy_expectations.push_back(
        measure_expectation(measure, liquidation_value(market, plan)));
  }
  out.best = out.strategy_expectations.front();
  for (const Rational& value : out.strategy_expectations) {
    if (value > out.best) out.best = value;
  }
  out.limit_expectation = measure_expectation(measure, family.limit_payoff);
  out.limit_positive = out.limit_expectation > 0;
  return out;
}

ThreeAssetExample gen_three_asset(int depth) {
  if (depth < 1) throw std::invalid_argument("truncation depth must be positive");
  TreeBuilder builder;
  const int root = builder.add_root();
  std::vector<int> mids(depth), ups(depth), downs(depth);
  for (int n = 0; n < depth; ++n) {
    mids[n] = builder.add_child(root, rat(1, depth));
    ups[n] = builder.add_child(mids[n], rat(1, 2));
    downs[n] = builder.add_child(mids[n], rat(1, 2));
  }

  ThreeAssetExample out;
  out.market.tree = builder.build();
  out.market.num_assets = 2;
  out.market.interest = 0;
  for (int asset = 0; asset < 2; ++asset) {
    out.market.ask[{asset, root}] = 1;
    out.market.bid[{asset, root}] = 1;
  }
  for (int n = 0; n < depth; ++n) {
    const Rational shift = rat(1, n + 1);
    out.market.ask[{0, mids[n]}] = 3;
    out.market.bid[{0, mids[n]}] = 0;
    out.market.ask[{1, mids[n]}] = 3;
    out.market.bid[{1, mids[n]}] = 1;
    out.market.ask[{0, ups[n]}] = 3;
    out.market.bid[{0, ups[n]}] = 3;
    out.market.ask[{1, ups[n]}] = 1 - shift;
    out.market.bid[{1, ups[n]}] = 1 - shift;
    out.market.ask[{0, downs[n]}] = 0;
    out.market.bid[{0, downs[n]}] = 0;
    out.market.ask[{1, downs[n]}] = 1 + shift;
    out.market.bid[{1, downs[n]}] = 1 + shift;
  }
  bidask_require(out.market);

  for (int m = 1; m <= depth; ++m) {
    BidAskStrategy plan;
    plan.buys[{0, root}] = 1;
    plan.buys[{1, root}] = rat(m);
    for (int n = 0; n < depth; ++n) {
      const int held = std::min(n + 1, m);
      if (m > held) plan.sells[{1, mids[n]}] = rat(m - held);
      plan.sells[{0, ups[n]}] = 1;
      plan.sells[{0, downs[n]}] = 1;
      plan.sells[{1, ups[n]}] = rat(held);
      plan.sells[{1, downs[n]}] = rat(held);
    }
    out.strategies.push_back(std::move(plan));
  }

  out.up_leaves = ups;
  out.down_leaves = downs;
  for (int n = 0; n < depth; ++n) {
    out.limit_payoff[ups[n]] = 1;
    out.limit_payoff[downs[n]] = 0;
  }
  out.parameters = {{"depth", rat(depth)}};
  out.certified.push_back(Certification{"limit-payoff-nonnegative", rat(0), true});
  out.certified.push_back(strict_cert("limit-payoff-positive-somewhere", rat(1)));
  return out;
}

}  // namespace taxarb
