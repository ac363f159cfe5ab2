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

#include "cfm/lp.h"

#include <map>
#include <utility>

#include "cfm/error.h"

namespace cfm::lp {

const char* StatusName(Status status) {
  switch (status) {
    case Status::kOptimal: return "Optimal";
    case Status::kInfeasible: return "Infeasible";
    case Status::kUnbounded: return "Unbounded";
  }
  return "Unknown";
}

int LinearProgram::AddVariable(std::string name, std::optional<Rational> lower,
                               std::optional<Rational> upper) {
  variables_.push_back({std::move(name), std::move(lower), std::move(upper)});
  return num_variables() - 1;
}

int LinearProgram::AddConstraint(std::vector<Term> terms, Relation relation,
                                 Rational rhs, std::string name) {
  constraints_.push_back(
      {std::move(terms), relation, std::move(rhs), std::move(name)});
  return num_constraints() - 1;
}

void LinearProgram::SetObjective(std::vector<Term> terms, Sense sense) {
  objective_.terms = std::move(terms);
  objective_.sense = sense;
}

void LinearProgram::Validate() const {
  auto check_terms = [&](const std::vector<Term>& terms,
                         const std::string& where) {
    for (const Term& t : terms) {
      if (t.var < 0 || t.var >= num_variables()) {
        throw Error(ErrorCode::kMalformedProgram,
                    "undeclared variable " + std::to_string(t.var) + " in " +
                        where);
      }
    }
  };
  for (int r = 0; r < num_constraints(); ++r) {
    const Constraint& c = constraints_[r];
    std::string where = c.name.empty() ? "row " + std::to_string(r) : c.name;
    if (c.terms.empty()) {
      throw Error(ErrorCode::kMalformedProgram, "empty constraint " + where);
    }
    check_terms(c.terms, where);
  }
  check_terms(objective_.terms, "objective");
  for (int j = 0; j < num_variables(); ++j) {
    const Variable& v = variables_[j];
    if (v.lower && v.upper && *v.lower > *v.upper) {
      throw Error(ErrorCode::kMalformedProgram,
                  "empty bound interval for variable " + std::to_string(j));
    }
  }
}

Rational Evaluate(const std::vector<Term>& terms,
                  const std::vector<Rational>& point) {
  Rational total = 0;
  for (const Term& t : terms) total += t.coef * point[t.var];
  return total;
}

namespace {

// Rows in the form sum_j a_j y_j (rel) b over nonnegative columns y.
struct InternalRow {
  std::map<int, Rational> coefs;
  Relation relation;
  Rational rhs;
};

struct StandardForm {
  int num_columns = 0;
  // user variable j = offset[j] + sum over (col, sign) of sign * y_col.
  std::vector<std::vector<std::pair<int, int>>> columns_of;
  std::vector<Rational> offset;
  std::vector<InternalRow> rows;
  int num_user_rows = 0;
};

StandardForm ToStandardForm(const LinearProgram& lp) {
  StandardForm sf;
  const int n = lp.num_variables();
  sf.columns_of.resize(n);
  sf.offset.assign(n, Rational(0));
  std::vector<std::pair<int, Rational>> upper_rows;
  for (int j = 0; j < n; ++j) {
    const Variable& v = lp.variables()[j];
    if (v.lower) {
      sf.offset[j] = *v.lower;
      sf.columns_of[j].push_back({sf.num_columns++, 1});
      if (v.upper) upper_rows.push_back({j, *v.upper - *v.lower});
    } else if (v.upper) {
      sf.offset[j] = *v.upper;
      sf.columns_of[j].push_back({sf.num_columns++, -1});
    } else {
      sf.columns_of[j].push_back({sf.num_columns++, 1});
      sf.columns_of[j].push_back({sf.num_columns++, -1});
    }
  }
  auto lower_terms = [&](const std::vector<Term>& terms,
                         std::map<int, Rational>& coefs, Rational& shift) {
    for (const Term& t : terms) {
      if (sgn(t.coef) == 0) continue;
      shift += t.coef * sf.offset[t.var];
      for (auto [col, sign] : sf.columns_of[t.var]) {
        coefs[col] += sign > 0 ? t.coef : Rational(-t.coef);
      }
    }
    for (auto it = coefs.begin(); it != coefs.end();) {
      if (sgn(it->second) == 0) {
        it = coefs.erase(it);
      } else {
        ++it;
      }
    }
  };
  for (const Constraint& c : lp.constraints()) {
    InternalRow row;
    Rational shift = 0;
    lower_terms(c.terms, row.coefs, shift);
    row.relation = c.relation;
    row.rhs = c.rhs - shift;
    sf.rows.push_back(std::move(row));
  }
  sf.num_user_rows = static_cast<int>(sf.rows.size());
  for (auto& [j, width] : upper_rows) {
    InternalRow row;
    row.coefs[sf.columns_of[j][0].first] = 1;
    row.relation = Relation::kLessEqual;
    row.rhs = width;
    sf.rows.push_back(std::move(row));
  }
  return sf;
}

// Minimization costs over the standard-form columns.
std::vector<Rational> LowerCost(const StandardForm& sf,
                                const Objective& objective) {
  std::vector<Rational> cost(sf.num_columns);
  const bool maximize = objective.sense == Sense::kMaximize;
  for (const Term& t : objective.terms) {
    for (auto [col, sign] : sf.columns_of[t.var]) {
      const bool plus = (sign > 0) != maximize;
      if (plus) {
        cost[col] += t.coef;
      } else {
        cost[col] -= t.coef;
      }
    }
  }
  return cost;
}

constexpr int kDegenerateLimit = 50;

class Tableau {
 public:
  explicit Tableau(const StandardForm& sf) {
    m_ = static_cast<int>(sf.rows.size());
    num_struct_ = sf.num_columns;
    // One slack or surplus column per inequality, one artificial per row
    // lacking a usable slack.
    int col = num_struct_;
    std::vector<int> slack_col(m_, -1);
    row_sign_.assign(m_, 1);
    std::vector<Relation> rel(m_);
    for (int i = 0; i < m_; ++i) {
      rel[i] = sf.rows[i].relation;
      if (sgn(sf.rows[i].rhs) < 0) {
        row_sign_[i] = -1;
        if (rel[i] == Relation::kLessEqual) {
          rel[i] = Relation::kGreaterEqual;
        } else if (rel[i] == Relation::kGreaterEqual) {
          rel[i] = Relation::kLessEqual;
        }
      }
      if (rel[i] != Relation::kEqual) slack_col[i] = col++;
    }
    std::vector<int> art_col(m_, -1);
    for (int i = 0; i < m_; ++i) {
      if (rel[i] != Relation::kLessEqual) art_col[i] = col++;
    }
    n_ = col;
    is_artificial_.assign(n_, false);
    a_.assign(m_, std::vector<Rational>(n_ + 1));
    basis_.assign(m_, -1);
    unit_col_.assign(m_, -1);
    for (int i = 0; i < m_; ++i) {
      const InternalRow& row = sf.rows[i];
      for (auto& [c, coef] : row.coefs) {
        a_[i][c] = row_sign_[i] > 0 ? coef : Rational(-coef);
      }
      a_[i][n_] = row_sign_[i] > 0 ? row.rhs : Rational(-row.rhs);
      if (rel[i] == Relation::kLessEqual) {
        a_[i][slack_col[i]] = 1;
        basis_[i] = slack_col[i];
        unit_col_[i] = slack_col[i];
      } else {
        if (rel[i] == Relation::kGreaterEqual) a_[i][slack_col[i]] = -1;
        a_[i][art_col[i]] = 1;
        is_artificial_[art_col[i]] = true;
        basis_[i] = art_col[i];
        unit_col_[i] = art_col[i];
      }
    }
  }

  // Returns false when the program is infeasible.
  bool PhaseOne() {
    d_.assign(n_ + 1, Rational(0));
    bool any = false;
    for (int j = 0; j < n_; ++j) {
      if (is_artificial_[j]) {
        d_[j] = 1;
        any = true;
      }
    }
    if (!any) return true;
    for (int i = 0; i < m_; ++i) {
      if (!is_artificial_[basis_[i]]) continue;
      for (int j = 0; j <= n_; ++j) {
        if (sgn(a_[i][j]) != 0) d_[j] -= a_[i][j];
      }
    }
    Run(/*allow_artificial=*/true);
    if (sgn(d_[n_]) != 0) return false;
    // Drive degenerate artificials out of the basis where possible.
    for (int i = 0; i < m_; ++i) {
      if (!is_artificial_[basis_[i]]) continue;
      for (int j = 0; j < n_; ++j) {
        if (!is_artificial_[j] && sgn(a_[i][j]) != 0) {
          Pivot(i, j);
          break;
        }
      }
    }
    return true;
  }

  // Returns false when unbounded.
  bool PhaseTwo(const std::vector<Rational>& cost) {
    d_.assign(n_ + 1, Rational(0));
    for (int j = 0; j < num_struct_; ++j) d_[j] = cost[j];
    for (int i = 0; i < m_; ++i) {
      const int b = basis_[i];
      if (b >= num_struct_ || sgn(cost[b]) == 0) continue;
      const Rational cb = cost[b];
      for (int j = 0; j <= n_; ++j) {
        if (sgn(a_[i][j]) != 0) d_[j] -= cb * a_[i][j];
      }
    }
    return Run(/*allow_artificial=*/false);
  }

  std::vector<Rational> ColumnValues() const {
    std::vector<Rational> y(n_);
    for (int i = 0; i < m_; ++i) y[basis_[i]] = a_[i][n_];
    return y;
  }

  // Duals of the internal minimization with respect to the original
  // (unnormalized) rows.
  std::vector<Rational> RowDuals() const {
    std::vector<Rational> y(m_);
    for (int i = 0; i < m_; ++i) {
      y[i] = -d_[unit_col_[i]];
      if (row_sign_[i] < 0) y[i] = -y[i];
    }
    return y;
  }

  int pivots() const { return pivots_; }

 private:
  bool Run(bool allow_artificial) {
    // Most negative reduced cost until pivots stall, then Bland's rule,
    // which cannot cycle.
    int degenerate = 0;
    bool bland = false;
    while (true) {
      int enter = -1;
      for (int j = 0; j < n_; ++j) {
        if (!allow_artificial && is_artificial_[j]) continue;
        if (sgn(d_[j]) < 0 && (enter < 0 || (!bland && d_[j] < d_[enter]))) {
          enter = j;
          if (bland) break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best_ratio;
      for (int i = 0; i < m_; ++i) {
        if (sgn(a_[i][enter]) <= 0) continue;
        Rational ratio = a_[i][n_] / a_[i][enter];
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = std::move(ratio);
        }
      }
      if (leave < 0) return false;
      if (sgn(best_ratio) == 0) {
        if (++degenerate >= kDegenerateLimit) bland = true;
      } else {
        degenerate = 0;
      }
      Pivot(leave, enter);
    }
  }

  void Pivot(int r, int c) {
    ++pivots_;
    std::vector<Rational>& pr = a_[r];
    if (pr[c] != 1) {
      const Rational inv = 1 / pr[c];
      for (int j = 0; j <= n_; ++j) {
        if (sgn(pr[j]) != 0) pr[j] *= inv;
      }
    }
    std::vector<int> nz;
    for (int j = 0; j <= n_; ++j) {
      if (sgn(pr[j]) != 0) nz.push_back(j);
    }
    Rational f;
    for (int i = 0; i < m_; ++i) {
      if (i == r || sgn(a_[i][c]) == 0) continue;
      f = a_[i][c];
      for (int j : nz) a_[i][j] -= f * pr[j];
    }
    if (sgn(d_[c]) != 0) {
      f = d_[c];
      for (int j : nz) d_[j] -= f * pr[j];
    }
    basis_[r] = c;
  }

  int m_ = 0;
  int n_ = 0;
  int num_struct_ = 0;
  std::vector<std::vector<Rational>> a_;
  std::vector<Rational> d_;
  std::vector<int> basis_;
  std::vector<int> unit_col_;
  std::vector<int> row_sign_;
  std::vector<bool> is_artificial_;
  int pivots_ = 0;
};

LpSolution Extract(const LinearProgram& lp, const StandardForm& sf,
                   const Tableau& tableau, const Objective& objective,
                   bool with_duals) {
  LpSolution sol;
  sol.status = Status::kOptimal;
  sol.pivots = tableau.pivots();
  const std::vector<Rational> y = tableau.ColumnValues();
  const int n = lp.num_variables();
  sol.values.assign(n, Rational(0));
  for (int j = 0; j < n; ++j) {
    sol.values[j] = sf.offset[j];
    for (auto [col, sign] : sf.columns_of[j]) {
      if (sign > 0) {
        sol.values[j] += y[col];
      } else {
        sol.values[j] -= y[col];
      }
    }
  }
  sol.objective = Evaluate(objective.terms, sol.values);
  if (!with_duals) return sol;
  const bool maximize = objective.sense == Sense::kMaximize;
  std::vector<Rational> row_duals = tableau.RowDuals();
  sol.duals.assign(lp.num_constraints(), Rational(0));
  for (int i = 0; i < lp.num_constraints(); ++i) {
    sol.duals[i] = maximize ? Rational(-row_duals[i]) : row_duals[i];
  }
  sol.reduced_costs.assign(n, Rational(0));
  for (const Term& t : objective.terms) sol.reduced_costs[t.var] += t.coef;
  for (int i = 0; i < lp.num_constraints(); ++i) {
    if (sgn(sol.duals[i]) == 0) continue;
    for (const Term& t : lp.constraints()[i].terms) {
      sol.reduced_costs[t.var] -= t.coef * sol.duals[i];
    }
  }
  return sol;
}

}  // namespace

struct PreparedProgram::State {
  LinearProgram lp;
  StandardForm sf;
  std::optional<Tableau> feasible;
  int pivots = 0;
};

PreparedProgram::PreparedProgram(const LinearProgram& lp)
    : state_(std::make_unique<State>()) {
  lp.Validate();
  state_->lp = lp;
  state_->sf = ToStandardForm(lp);
  Tableau tableau(state_->sf);
  const bool ok = tableau.PhaseOne();
  state_->pivots = tableau.pivots();
  if (ok) state_->feasible = std::move(tableau);
}

PreparedProgram::~PreparedProgram() = default;
PreparedProgram::PreparedProgram(PreparedProgram&&) noexcept = default;
PreparedProgram& PreparedProgram::operator=(PreparedProgram&&) noexcept =
    default;

bool PreparedProgram::feasible() const { return state_->feasible.has_value(); }

LpSolution PreparedProgram::Solve(const Objective& objective) const {
  LinearProgram check;
  for (int j = 0; j < state_->lp.num_variables(); ++j) check.AddVariable();
  check.SetObjective(objective);
  check.Validate();
  if (!feasible()) {
    LpSolution sol;
    sol.status = Status::kInfeasible;
    sol.pivots = state_->pivots;
    return sol;
  }
  Tableau tableau = *state_->feasible;
  if (!tableau.PhaseTwo(LowerCost(state_->sf, objective))) {
    LpSolution sol;
    sol.status = Status::kUnbounded;
    sol.pivots = tableau.pivots();
    return sol;
  }
  return Extract(state_->lp, state_->sf, tableau, objective, true);
}

std::optional<std::vector<Rational>> PreparedProgram::AnyPoint() const {
  if (!feasible()) return std::nullopt;
  return Extract(state_->lp, state_->sf, *state_->feasible, Objective{}, false)
      .values;
}

LpSolution Solve(const LinearProgram& lp) {
  return PreparedProgram(lp).Solve(lp.objective());
}

LpSolution SolveLexicographic(const LinearProgram& lp,
                              const std::vector<Objective>& objectives) {
  if (objectives.empty()) {
    throw Error(ErrorCode::kMalformedProgram, "no objectives");
  }
  LinearProgram stage = lp;
  LpSolution sol;
  int total_pivots = 0;
  for (size_t k = 0; k < objectives.size(); ++k) {
    stage.SetObjective(objectives[k]);
    sol = Solve(stage);
    total_pivots += sol.pivots;
    if (sol.status == Status::kUnbounded) {
      sol.unbounded_stage = static_cast<int>(k);
    }
    if (sol.status != Status::kOptimal) break;
    if (k + 1 < objectives.size() && !objectives[k].terms.empty()) {
      stage.AddConstraint(objectives[k].terms, Relation::kEqual, sol.objective,
                          "stage" + std::to_string(k));
    }
  }
  sol.pivots = total_pivots;
  if (sol.status == Status::kOptimal) sol.duals.resize(lp.num_constraints());
  return sol;
}

std::optional<std::vector<Rational>> SolveFeasibility(const LinearProgram& lp) {
  return PreparedProgram(lp).AnyPoint();
}

}  // namespace cfm::lp
