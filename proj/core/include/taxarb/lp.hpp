#pragma once

#include "taxarb/rational.hpp"

#include <string>
#include <vector>

namespace taxarb {

enum class RowSense { LessEq, Equal, GreaterEq };
enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpRow {
  std::vector<Rational> coeff;
  RowSense sense = RowSense::LessEq;
  Rational rhs;
};

// maximize objective . x  subject to the rows, over x >= 0.
struct LinearProgram {
  std::vector<Rational> objective;
  std::vector<LpRow> rows;

  int num_vars() const { return static_cast<int>(objective.size()); }
  void add_row(std::vector<Rational> coeff, RowSense sense, Rational rhs);
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Rational value;
  std::vector<Rational> primal;  // per variable
  std::vector<Rational> dual;    // per row; >= 0 on LessEq, <= 0 on GreaterEq
  std::vector<Rational> ray;     // improving direction when unbounded
};

// Exact two phase primal simplex with Bland's smallest index rule, so
// every pivot sequence is deterministic and cycling terminates.
LpSolution solve_lp(const LinearProgram& lp);

// Audits an optimal solution exactly: primal feasibility, dual
// feasibility, complementary slackness and matching objective values.
// Returns human readable violations, empty when everything certifies.
std::vector<std::string> check_certificates(const LinearProgram& lp,
                                            const LpSolution& sol);

const char* to_string(LpStatus status);

}  // namespace taxarb
