#include "taxarb/lp.hpp"

#include <stdexcept>

namespace taxarb {

void LinearProgram::add_row(std::vector<Rational> coeff, RowSense sense,
                            Rational rhs) {
  if (static_cast<int>(coeff.size()) != num_vars()) {
    throw std::invalid_argument("row width does not match variable count");
  }
  rows.push_back({std::move(coeff), sense, std::move(rhs)});
}

namespace {

// Dense simplex tableau over exact rationals. Columns are the structural
// variables, then one slack or surplus per row, then one artificial per
// row that needs a starting basic variable.
class Tableau {
 public:
  explicit Tableau(const LinearProgram& lp);

  LpSolution run();

 private:
  enum class Step { Optimal, Unbounded, Pivoted };

  Step pivot_once();
  void price_out();
  Rational objective_value() const;
  void eliminate(int row, int col);

  int m_;       // rows
  int n_;       // structural variables
  int cols_;    // structural + slack + artificial
  std::vector<std::vector<Rational>> a_;  // m_ x cols_
  std::vector<Rational> b_;               // rhs, kept nonnegative
  std::vector<Rational> cost_;            // current phase objective, per column
  std::vector<Rational> rc_;              // reduced costs, per column
  std::vector<int> basis_;                // basic column per row
  std::vector<bool> allowed_;             // artificials are barred once done
  std::vector<int> slack_col_;            // per row: slack or surplus column
  std::vector<int> art_col_;              // per row: artificial column or -1
  std::vector<RowSense> sense_;           // after rhs normalization
  std::vector<bool> flipped_;             // row negated to make rhs nonnegative
  const LinearProgram& lp_;
};

Tableau::Tableau(const LinearProgram& lp) : lp_(lp) {
  m_ = static_cast<int>(lp.rows.size());
  n_ = lp.num_vars();

  sense_.resize(m_);
  flipped_.assign(m_, false);
  std::vector<std::vector<Rational>> rows(m_);
  b_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    rows[i] = lp.rows[i].coeff;
    b_[i] = lp.rows[i].rhs;
    sense_[i] = lp.rows[i].sense;
    if (b_[i] < 0) {
      flipped_[i] = true;
      b_[i] = -b_[i];
      for (Rational& v : rows[i]) v = -v;
      if (sense_[i] == RowSense::LessEq) {
        sense_[i] = RowSense::GreaterEq;
      } else if (sense_[i] == RowSense::GreaterEq) {
        sense_[i] = RowSense::LessEq;
      }
    }
  }

  slack_col_.assign(m_, -1);
  art_col_.assign(m_, -1);
  int next = n_;
  for (int i = 0; i < m_; ++i) {
    if (sense_[i] != RowSense::Equal) slack_col_[i] = next++;
  }
  for (int i = 0; i < m_; ++i) {
    if (sense_[i] != RowSense::LessEq) art_col_[i] = next++;
  }
  cols_ = next;

  a_.assign(m_, std::vector<Rational>(cols_, Rational(0)));
  basis_.assign(m_, -1);
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < n_; ++j) a_[i][j] = rows[i][j];
    if (slack_col_[i] >= 0) {
      a_[i][slack_col_[i]] =
          sense_[i] == RowSense::LessEq ? Rational(1) : Rational(-1);
    }
    if (art_col_[i] >= 0) {
      a_[i][art_col_[i]] = 1;
      basis_[i] = art_col_[i];
    } else {
      basis_[i] = slack_col_[i];
    }
  }
  allowed_.assign(cols_, true);
}

void Tableau::eliminate(int row, int col) {
  const Rational pivot = a_[row][col];
  for (Rational& v : a_[row]) v /= pivot;
  b_[row] /= pivot;
  for (int i = 0; i < m_; ++i) {
    if (i == row || a_[i][col] == 0) continue;
    const Rational f = a_[i][col];
    for (int j = 0; j < cols_; ++j) a_[i][j] -= f * a_[row][j];
    b_[i] -= f * b_[row];
  }
  const Rational f = rc_[col];
  if (f != 0) {
    for (int j = 0; j < cols_; ++j) rc_[j] -= f * a_[row][j];
  }
  basis_[row] = col;
}

void Tableau::price_out() {
  rc_ = cost_;
  for (int i = 0; i < m_; ++i) {
    const Rational cb = cost_[basis_[i]];
    if (cb == 0) continue;
    for (int j = 0; j < cols_; ++j) rc_[j] -= cb * a_[i][j];
  }
}

Rational Tableau::objective_value() const {
  Rational v = 0;
  for (int i = 0; i < m_; ++i) v += cost_[basis_[i]] * b_[i];
  return v;
}

Tableau::Step Tableau::pivot_once() {
  int entering = -1;
  for (int j = 0; j < cols_; ++j) {
    if (allowed_[j] && rc_[j] > 0) {
      entering = j;
      break;
    }
  }
  if (entering < 0) return Step::Optimal;

  int leaving = -1;
  Rational best;
  for (int i = 0; i < m_; ++i) {
    if (a_[i][entering] <= 0) continue;
    const Rational ratio = b_[i] / a_[i][entering];
    if (leaving < 0 || ratio < best ||
        (ratio == best && basis_[i] < basis_[leaving])) {
      leaving = i;
      best = ratio;
    }
  }
  if (leaving < 0) return Step::Unbounded;
  eliminate(leaving, entering);
  return Step::Pivoted;
}

LpSolution Tableau::run() {
  LpSolution sol;

  bool needs_phase1 = false;
  for (int i = 0; i < m_; ++i) needs_phase1 |= art_col_[i] >= 0;

  if (needs_phase1) {
    cost_.assign(cols_, Rational(0));
    for (int i = 0; i < m_; ++i) {
      if (art_col_[i] >= 0) cost_[art_col_[i]] = -1;
    }
    price_out();
    while (pivot_once() == Step::Pivoted) {
    }
    if (objective_value() != 0) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // At optimum every artificial is zero; drive basic ones out so they
    // can be barred for phase two. A pivot sequence can leave an
    // artificial basic in a row other than its own, so test the basic
    // column, not the row's artificial.
    std::vector<bool> artificial(cols_, false);
    for (int i = 0; i < m_; ++i) {
      if (art_col_[i] >= 0) artificial[art_col_[i]] = true;
    }
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_ || !artificial[basis_[i]]) continue;
      int pivot_col = -1;
      for (int j = 0; j < cols_; ++j) {
        if (!artificial[j] && a_[i][j] != 0) {
          pivot_col = j;
          break;
        }
      }
      if (pivot_col >= 0) eliminate(i, pivot_col);
      // Otherwise the row is redundant; its artificial stays basic at zero.
    }
    for (int i = 0; i < m_; ++i) {
      if (art_col_[i] >= 0) allowed_[art_col_[i]] = false;
    }
  }

  cost_.assign(cols_, Rational(0));
  for (int j = 0; j < n_; ++j) cost_[j] = lp_.objective[j];
  price_out();

  for (;;) {
    const Step step = pivot_once();
    if (step == Step::Pivoted) continue;
    if (step == Step::Optimal) break;

    sol.status = LpStatus::Unbounded;
    int entering = -1;
    for (int j = 0; j < cols_; ++j) {
      if (allowed_[j] && rc_[j] > 0) {
        entering = j;
        break;
      }
    }
    sol.ray.assign(n_, Rational(0));
    if (entering < n_) sol.ray[entering] = 1;
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) sol.ray[basis_[i]] = -a_[i][entering];
    }
    sol.primal.assign(n_, Rational(0));
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) sol.primal[basis_[i]] = b_[i];
    }
    return sol;
  }

  sol.status = LpStatus::Optimal;
  sol.primal.assign(n_, Rational(0));
  for (int i = 0; i < m_; ++i) {
    if (basis_[i] < n_) sol.primal[basis_[i]] = b_[i];
  }
  sol.value = 0;
  for (int j = 0; j < n_; ++j) sol.value += lp_.objective[j] * sol.primal[j];

  // Row duals read off the reduced costs of the logical columns. With a
  // +1 slack the dual is the negated reduced cost; with a -1 surplus it
  // is the reduced cost itself; equality rows use their artificial.
  sol.dual.assign(m_, Rational(0));
  for (int i = 0; i < m_; ++i) {
    Rational y;
    if (sense_[i] == RowSense::Equal) {
      y = -rc_[art_col_[i]];
    } else if (sense_[i] == RowSense::LessEq) {
      y = -rc_[slack_col_[i]];
    } else {
      y = rc_[slack_col_[i]];
    }
    // Undo the rhs sign normalization: a flipped row flips its dual.
    if (flipped_[i]) y = -y;
    sol.dual[i] = y;
  }
  return sol;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  for (const LpRow& row : lp.rows) {
    if (static_cast<int>(row.coeff.size()) != lp.num_vars()) {
      throw std::invalid_argument("row width does not match variable count");
    }
  }
  Tableau tableau(lp);
  return tableau.run();
}

std::vector<std::string> check_certificates(const LinearProgram& lp,
                                            const LpSolution& sol) {
  std::vector<std::string> out;
  if (sol.status != LpStatus::Optimal) {
    out.push_back("no optimality certificate for a non optimal status");
    return out;
  }
  const int n = lp.num_vars();
  const int m = static_cast<int>(lp.rows.size());
  if (static_cast<int>(sol.primal.size()) != n ||
      static_cast<int>(sol.dual.size()) != m) {
    out.push_back("certificate vectors have the wrong dimensions");
    return out;
  }

  for (int j = 0; j < n; ++j) {
    if (sol.primal[j] < 0) {
      out.push_back("primal infeasible: variable " + std::to_string(j) +
                    " is negative");
    }
  }
  std::vector<Rational> activity(m, Rational(0));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      activity[i] += lp.rows[i].coeff[j] * sol.primal[j];
    }
    const LpRow& row = lp.rows[i];
    const bool bad = (row.sense == RowSense::LessEq && activity[i] > row.rhs) ||
                     (row.sense == RowSense::Equal && activity[i] != row.rhs) ||
                     (row.sense == RowSense::GreaterEq && activity[i] < row.rhs);
    if (bad) {
      out.push_back("primal infeasible: row " + std::to_string(i) +
                    " is violated");
    }
  }

  for (int i = 0; i < m; ++i) {
    if (lp.rows[i].sense == RowSense::LessEq && sol.dual[i] < 0) {
      out.push_back("dual infeasible: row " + std::to_string(i) +
                    " has a negative multiplier");
    }
    if (lp.rows[i].sense == RowSense::GreaterEq && sol.dual[i] > 0) {
      out.push_back("dual infeasible: row " + std::to_string(i) +
                    " has a positive multiplier");
    }
  }
  for (int j = 0; j < n; ++j) {
    Rational lhs = 0;
    for (int i = 0; i < m; ++i) lhs += sol.dual[i] * lp.rows[i].coeff[j];
    if (lhs < lp.objective[j]) {
      out.push_back("dual infeasible: column " + std::to_string(j) +
                    " has positive reduced cost");
    } else if (lhs > lp.objective[j] && sol.primal[j] != 0) {
      out.push_back("complementary slackness violated at variable " +
                    std::to_string(j));
    }
  }
  for (int i = 0; i < m; ++i) {
    if (sol.dual[i] != 0 && activity[i] != lp.rows[i].rhs) {
      out.push_back("complementary slackness violated at row " +
                    std::to_string(i));
    }
  }

  Rational primal_value = 0;
  for (int j = 0; j < n; ++j) primal_value += lp.objective[j] * sol.primal[j];
  Rational dual_value = 0;
  for (int i = 0; i < m; ++i) dual_value += sol.dual[i] * lp.rows[i].rhs;
  if (primal_value != dual_value) {
    out.push_back("duality gap nonzero: primal " +
                  format_rational(primal_value) + " vs dual " +
                  format_rational(dual_value));
  }
  if (primal_value != sol.value) {
    out.push_back("reported value differs from the primal objective");
  }
  return out;
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Unbounded:
      return "unbounded";
    case LpStatus::Infeasible:
      return "infeasible";
  }
  return "unknown";
}

}  // namespace taxarb
