#include <stdexcept>

#include "usp/lp.hpp"

namespace usp {

std::size_t LinearSystem::add_variable(std::string name, std::optional<Rational> lower,
                                       std::optional<Rational> upper) {
  variables.push_back({std::move(name), std::move(lower), std::move(upper)});
  return variables.size() - 1;
}

void LinearSystem::add_row(std::string name,
                           std::vector<std::pair<std::size_t, Rational>> terms,
                           Sense sense, Rational rhs) {
  rows.push_back({std::move(name), std::move(terms), sense, std::move(rhs)});
}

std::vector<std::string> unsatisfied_rows(const LinearSystem& system,
                                          const std::vector<Rational>& values) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < system.variables.size(); ++j) {
    const auto& v = system.variables[j];
    if ((v.lower && values[j] < *v.lower) || (v.upper && values[j] > *v.upper))
      out.push_back("bound:" + v.name);
  }
  for (const auto& r : system.rows) {
    Rational lhs = 0;
    for (const auto& [j, a] : r.terms) lhs += a * values[j];
    bool ok = r.sense == Sense::LessEqual      ? lhs <= r.rhs
              : r.sense == Sense::GreaterEqual ? lhs >= r.rhs
                                               : lhs == r.rhs;
    if (!ok) out.push_back(r.name);
  }
  return out;
}

namespace {

inline bool is_zero(const Rational& q) { return mpq_sgn(q.get_mpq_t()) == 0; }
inline int sign(const Rational& q) { return mpq_sgn(q.get_mpq_t()); }

// How an original variable maps onto non-negative standard-form columns.
struct ColumnMap {
  enum Kind { Fixed, Shift, Negate, Split } kind = Fixed;
  Rational offset;  // Fixed value, Shift lower bound or Negate upper bound
  std::size_t col = 0;
  std::size_t col_neg = 0;
};

// Dense tableau in standard form: T z = rhs, z >= 0, with a basis column per
// row. Pivoting skips zero entries, which dominate path-length systems.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : t_(rows, std::vector<Rational>(cols + 1)), basis_(rows, 0), cost_(cols + 1) {}

  std::size_t rows() const { return t_.size(); }
  std::size_t cols() const { return cost_.size() - 1; }
  Rational& at(std::size_t r, std::size_t c) { return t_[r][c]; }
  Rational& rhs(std::size_t r) { return t_[r].back(); }
  std::size_t& basis(std::size_t r) { return basis_[r]; }

  // Sets the objective (minimize sum cost[c] z[c]) and prices out the basis.
  void set_costs(const std::vector<Rational>& cost) {
    for (std::size_t c = 0; c < cols(); ++c) cost_[c] = cost[c];
    cost_.back() = 0;
    for (std::size_t r = 0; r < rows(); ++r) {
      Rational cb = cost[basis_[r]];
      if (is_zero(cb)) continue;
      for (std::size_t c = 0; c <= cols(); ++c)
        if (!is_zero(t_[r][c])) cost_[c] -= cb * t_[r][c];
    }
  }

  // Current objective value of the minimization.
  Rational objective() const { return -cost_.back(); }

  void pivot(std::size_t r, std::size_t c) {
    std::vector<Rational>& pr = t_[r];
    Rational inv = 1 / pr[c];
    nz_.clear();
    for (std::size_t k = 0; k < pr.size(); ++k) {
      if (is_zero(pr[k])) continue;
      pr[k] *= inv;
      nz_.push_back(k);
    }
    auto eliminate = [&](std::vector<Rational>& row) {
      if (is_zero(row[c])) return;
      Rational f = row[c];
      for (std::size_t k : nz_) {
        mpq_mul(tmp_.get_mpq_t(), f.get_mpq_t(), pr[k].get_mpq_t());
        mpq_sub(row[k].get_mpq_t(), row[k].get_mpq_t(), tmp_.get_mpq_t());
      }
    };
    for (std::size_t i = 0; i < t_.size(); ++i)
      if (i != r) eliminate(t_[i]);
    eliminate(cost_);
    basis_[r] = c;
  }

  enum class Outcome { Optimal, Unbounded };

  // Primal simplex with Bland's rule; columns >= `allowed` never enter.
  Outcome run(std::size_t allowed) {
    for (;;) {
      std::size_t enter = allowed;
      for (std::size_t c = 0; c < allowed; ++c)
        if (sign(cost_[c]) < 0) {
          enter = c;
          break;
        }
      if (enter == allowed) return Outcome::Optimal;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t r = 0; r < rows(); ++r) {
        if (sign(t_[r][enter]) <= 0) continue;
        Rational ratio = t_[r].back() / t_[r][enter];
        if (!leave || ratio < best || (ratio == best && basis_[r] < basis_[*leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (!leave) return Outcome::Unbounded;
      pivot(*leave, enter);
    }
  }

  std::vector<Rational> values() const {
    std::vector<Rational> z(cols());
    for (std::size_t r = 0; r < rows(); ++r) z[basis_[r]] = t_[r].back();
    return z;
  }

 private:
  std::vector<std::vector<Rational>> t_;
  std::vector<std::size_t> basis_;
  std::vector<Rational> cost_;
  std::vector<std::size_t> nz_;
  Rational tmp_;
};

struct Standardized {
  std::vector<ColumnMap> map;
  std::size_t n_struct = 0;
  std::size_t n_slack = 0;
  std::size_t n_art = 0;
  std::optional<Tableau> tableau;
  bool bounds_conflict = false;
};

Standardized standardize(const LinearSystem& sys) {
  Standardized s;
  for (const auto& v : sys.variables) {
    ColumnMap cm;
    if (v.lower && v.upper && *v.lower > *v.upper) {
      s.bounds_conflict = true;
      return s;
    }
    if (v.lower && v.upper && *v.lower == *v.upper) {
      cm.kind = ColumnMap::Fixed;
      cm.offset = *v.lower;
    } else if (v.lower) {
      cm.kind = ColumnMap::Shift;
      cm.offset = *v.lower;
      cm.col = s.n_struct++;
    } else if (v.upper) {
      cm.kind = ColumnMap::Negate;
      cm.offset = *v.upper;
      cm.col = s.n_struct++;
    } else {
      cm.kind = ColumnMap::Split;
      cm.col = s.n_struct++;
      cm.col_neg = s.n_struct++;
    }
    s.map.push_back(cm);
  }

  // Row list in standard-form coordinates: original rows, then upper bounds
  // of shifted columns.
  struct StdRow {
    std::vector<std::pair<std::size_t, Rational>> terms;
    Sense sense;
    Rational rhs;
  };
  std::vector<StdRow> rows;
  for (const auto& r : sys.rows) {
    StdRow sr{{}, r.sense, r.rhs};
    std::vector<Rational> dense;
    for (const auto& [j, a] : r.terms) {
      const auto& cm = s.map[j];
      switch (cm.kind) {
        case ColumnMap::Fixed: sr.rhs -= a * cm.offset; break;
        case ColumnMap::Shift:
          sr.rhs -= a * cm.offset;
          sr.terms.push_back({cm.col, a});
          break;
        case ColumnMap::Negate:
          sr.rhs -= a * cm.offset;
          sr.terms.push_back({cm.col, -a});
          break;
        case ColumnMap::Split:
          sr.terms.push_back({cm.col, a});
          sr.terms.push_back({cm.col_neg, -a});
          break;
      }
    }
    rows.push_back(std::move(sr));
  }
  for (std::size_t j = 0; j < sys.variables.size(); ++j) {
    const auto& v = sys.variables[j];
    if (s.map[j].kind == ColumnMap::Shift && v.upper)
      rows.push_back({{{s.map[j].col, Rational(1)}}, Sense::LessEqual, *v.upper - *v.lower});
  }

  for (auto& r : rows) {
    if (sign(r.rhs) < 0) {
      r.rhs = -r.rhs;
      for (auto& t : r.terms) t.second = -t.second;
      if (r.sense == Sense::LessEqual)
        r.sense = Sense::GreaterEqual;
      else if (r.sense == Sense::GreaterEqual)
        r.sense = Sense::LessEqual;
    }
    if (r.sense != Sense::Equal) ++s.n_slack;
    if (r.sense != Sense::LessEqual) ++s.n_art;
  }

  const std::size_t cols = s.n_struct + s.n_slack + s.n_art;
  s.tableau.emplace(rows.size(), cols);
  Tableau& T = *s.tableau;
  std::size_t slack = s.n_struct, art = s.n_struct + s.n_slack;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [c, a] : rows[i].terms) T.at(i, c) += a;
    T.rhs(i) = rows[i].rhs;
    switch (rows[i].sense) {
      case Sense::LessEqual:
        T.at(i, slack) = 1;
        T.basis(i) = slack++;
        break;
      case Sense::GreaterEqual:
        T.at(i, slack++) = -1;
        T.at(i, art) = 1;
        T.basis(i) = art++;
        break;
      case Sense::Equal:
        T.at(i, art) = 1;
        T.basis(i) = art++;
        break;
    }
  }
  return s;
}

std::vector<Rational> recover_values(const Standardized& s, const std::vector<Rational>& z) {
  std::vector<Rational> x;
  for (const auto& cm : s.map) {
    switch (cm.kind) {
      case ColumnMap::Fixed: x.push_back(cm.offset); break;
      case ColumnMap::Shift: x.push_back(cm.offset + z[cm.col]); break;
      case ColumnMap::Negate: x.push_back(cm.offset - z[cm.col]); break;
      case ColumnMap::Split: x.push_back(z[cm.col] - z[cm.col_neg]); break;
    }
  }
  return x;
}

// Phase 1; returns false when the system is infeasible. On success the
// artificial columns are out of the basis or sit on redundant rows.
bool phase_one(Standardized& s) {
  if (s.bounds_conflict) return false;
  Tableau& T = *s.tableau;
  const std::size_t first_art = s.n_struct + s.n_slack;
  std::vector<Rational> cost(T.cols());
  for (std::size_t c = first_art; c < T.cols(); ++c) cost[c] = 1;
  T.set_costs(cost);
  T.run(T.cols());
  if (sign(T.objective()) > 0) return false;
  for (std::size_t r = 0; r < T.rows(); ++r) {
    if (T.basis(r) < first_art) continue;
    for (std::size_t c = 0; c < first_art; ++c)
      if (!is_zero(T.at(r, c))) {
        T.pivot(r, c);
        break;
      }
  }
  return true;
}

void verify(const LinearSystem& system, const std::vector<Rational>& x) {
  auto bad = unsatisfied_rows(system, x);
  if (!bad.empty())
    throw std::logic_error("simplex produced a point violating " + bad.front());
}

bool feasible(const LinearSystem& system) {
  Standardized s = standardize(system);
  return phase_one(s);
}

}  // namespace

FeasibilityResult solve_feasibility(const LinearSystem& system, bool want_hint) {
  Standardized s = standardize(system);
  if (phase_one(s)) {
    auto x = recover_values(s, s.tableau->values());
    verify(system, x);
    return Feasible{std::move(x)};
  }
  Infeasible result;
  if (want_hint) {
    // Deletion filter: drop each row whose removal keeps the rest infeasible.
    LinearSystem work = system;
    std::size_t i = 0;
    while (i < work.rows.size()) {
      LinearSystem trial = work;
      trial.rows.erase(trial.rows.begin() + static_cast<long>(i));
      if (!feasible(trial))
        work = std::move(trial);
      else
        ++i;
    }
    for (const auto& r : work.rows) result.hint.push_back(r.name);
  }
  return result;
}

LpSolution optimize(const LinearSystem& system) {
  Standardized s = standardize(system);
  LpSolution out;
  if (!phase_one(s)) return out;
  Tableau& T = *s.tableau;
  std::vector<Rational> cost(T.cols());
  for (const auto& [j, a] : system.objective) {
    const auto& cm = s.map[j];
    switch (cm.kind) {
      case ColumnMap::Fixed: break;
      case ColumnMap::Shift: cost[cm.col] -= a; break;
      case ColumnMap::Negate: cost[cm.col] += a; break;
      case ColumnMap::Split:
        cost[cm.col] -= a;
        cost[cm.col_neg] += a;
        break;
    }
  }
  T.set_costs(cost);
  if (T.run(s.n_struct + s.n_slack) == Tableau::Outcome::Unbounded) {
    out.status = LpStatus::Unbounded;
    return out;
  }
  out.status = LpStatus::Optimal;
  out.values = recover_values(s, T.values());
  verify(system, out.values);
  out.objective = 0;
  for (const auto& [j, a] : system.objective) out.objective += a * out.values[j];
  return out;
}

}  // namespace usp
