// Copyright 2026 The cfm Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exact linear programming over the rationals.
//
// Dense two-phase primal simplex, largest-coefficient pricing with a switch
// to Bland's rule on degenerate stalls. Every quantity
// is an exact rational, so optimality, infeasibility and unboundedness are
// decided without tolerances. Intended for programs with up to a few hundred
// columns.

#ifndef CFM_LP_H_
#define CFM_LP_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cfm/rational.h"

namespace cfm::lp {

enum class Relation { kLessEqual, kGreaterEqual, kEqual };
enum class Sense { kMinimize, kMaximize };
enum class Status { kOptimal, kInfeasible, kUnbounded };

const char* StatusName(Status status);

struct Term {
  int var;
  Rational coef;
};

struct Constraint {
  std::vector<Term> terms;
  Relation relation;
  Rational rhs;
  std::string name;
};

struct Objective {
  std::vector<Term> terms;
  Sense sense = Sense::kMinimize;
};

struct Variable {
  std::string name;
  // nullopt means unbounded in that direction.
  std::optional<Rational> lower;
  std::optional<Rational> upper;
};

class LinearProgram {
 public:
  int AddVariable(std::string name = "",
                  std::optional<Rational> lower = Rational(0),
                  std::optional<Rational> upper = std::nullopt);
  int AddConstraint(std::vector<Term> terms, Relation relation, Rational rhs,
                    std::string name = "");
  void SetObjective(std::vector<Term> terms, Sense sense);
  void SetObjective(Objective objective) { objective_ = std::move(objective); }

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Objective& objective() const { return objective_; }

  // Throws kMalformedProgram on undeclared variables or empty rows.
  void Validate() const;

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  Objective objective_;
};

struct LpSolution {
  Status status = Status::kInfeasible;
  std::vector<Rational> values;
  // Shadow prices: derivative of the optimal objective with respect to each
  // constraint's right-hand side, in the sense of the program. For a
  // minimization, >= rows carry nonnegative duals and <= rows nonpositive.
  std::vector<Rational> duals;
  // c_j minus the dual-weighted column, per variable.
  std::vector<Rational> reduced_costs;
  Rational objective;
  // Lexicographic solves: index of the objective that was unbounded.
  int unbounded_stage = -1;
  int pivots = 0;
};

LpSolution Solve(const LinearProgram& lp);

// One feasible region, phase one done once, many objectives.
class PreparedProgram {
 public:
  // The objective of lp is ignored.
  explicit PreparedProgram(const LinearProgram& lp);
  ~PreparedProgram();
  PreparedProgram(PreparedProgram&&) noexcept;
  PreparedProgram& operator=(PreparedProgram&&) noexcept;

  bool feasible() const;
  // Same status, values and duals as Solve on lp with this objective.
  LpSolution Solve(const Objective& objective) const;
  std::optional<std::vector<Rational>> AnyPoint() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

// Optimizes objectives[0], then objectives[1] over the optimal face of the
// first, and so on. Each stage is pinned by an exact equality row. Duals in
// the result refer to the original constraints of the final stage program.
LpSolution SolveLexicographic(const LinearProgram& lp,
                              const std::vector<Objective>& objectives);

// Any feasible point, or nullopt. The objective of lp is ignored.
std::optional<std::vector<Rational>> SolveFeasibility(const LinearProgram& lp);

// Value of a linear expression at a point.
Rational Evaluate(const std::vector<Term>& terms,
                  const std::vector<Rational>& point);

}  // namespace cfm::lp

#endif  // CFM_LP_H_
