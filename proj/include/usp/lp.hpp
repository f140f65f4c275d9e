#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "usp/model.hpp"
#include "usp/spf.hpp"

namespace usp {

using Rational = mpq_class;

struct LpVariable {
  std::string name;
  std::optional<Rational> lower;  // nullopt = unbounded
  std::optional<Rational> upper;
};

struct LpRow {
  std::string name;
  std::vector<std::pair<std::size_t, Rational>> terms;
  Sense sense = Sense::LessEqual;
  Rational rhs;
};

// Continuous system over the rationals. `objective` is maximized by optimize()
// and ignored by solve_feasibility().
struct LinearSystem {
  std::vector<LpVariable> variables;
  std::vector<LpRow> rows;
  std::vector<std::pair<std::size_t, Rational>> objective;

  std::size_t add_variable(std::string name, std::optional<Rational> lower,
                           std::optional<Rational> upper);
  void add_row(std::string name, std::vector<std::pair<std::size_t, Rational>> terms,
               Sense sense, Rational rhs);
};

struct Feasible {
  std::vector<Rational> values;
};

// `hint` lists rows of an infeasible subsystem (deletion filter, bounds kept)
// when requested, else empty.
struct Infeasible {
  std::vector<std::string> hint;
};

using FeasibilityResult = std::variant<Feasible, Infeasible>;

// Names of rows (and "bound:<var>" entries) that `values` violates, exactly.
std::vector<std::string> unsatisfied_rows(const LinearSystem& system,
                                          const std::vector<Rational>& values);

// Phase-1 simplex over the rationals with Bland's rule. A Feasible result has
// been checked by substitution into every row and bound.
FeasibilityResult solve_feasibility(const LinearSystem& system, bool want_hint = false);

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<Rational> values;
  Rational objective;
};

// Two-phase simplex maximizing system.objective.
LpSolution optimize(const LinearSystem& system);

// Path-length rows of the origin-based model with the routing binaries fixed
// to `forest`. Variables: w per link (grid units), then l per (origin, node).
// `eps_units` and `big_M_units` are in grid units. When `margin` is set, the
// strict rows use a variable t in place of eps, t >= eps, and the objective
// maximizes t.
struct PathLengthSystem {
  LinearSystem system;
  std::vector<std::size_t> weight_var;
  std::optional<std::size_t> margin_var;
  std::vector<std::string> strict_rows;
};

PathLengthSystem path_length_system(const Instance& instance, const RoutingForest& forest,
                                    const Rational& eps_units, const Rational& big_M_units,
                                    bool margin = false);

enum class RecoveryStatus { Recovered, Infeasible, GridInfeasible };

struct WeightRecovery {
  RecoveryStatus status = RecoveryStatus::Infeasible;
  std::optional<WeightVector> weights;
  std::vector<std::string> hint;
  // 1 = rounded LP point, 2 = rounded max-margin point, 3 = branch on weights.
  int stage = 0;
  int lp_solves = 0;
};

struct RecoveryOptions {
  bool want_hint = false;
  // Cap on branch-and-bound nodes in stage 3.
  std::size_t branch_limit = 100000;
};

// Finds grid weights in [w_min, w_max] whose unique shortest paths reproduce
// `forest` exactly (verified with routing_from_weights). eps and big_M are in
// weight units. Infeasible: no continuous weights exist. GridInfeasible:
// continuous weights exist but none on the grid.
WeightRecovery recover_weights(const Instance& instance, const RoutingForest& forest,
                               const ModelConstants& constants,
                               const RecoveryOptions& options = {});

struct MarginResult {
  bool feasible = false;
  Rational margin;                  // in grid units
  std::vector<Rational> weights;    // continuous optimum, grid units
  std::optional<WeightVector> snapped;  // rounded weights if they reproduce the forest
};

// Maximizes the minimum slack t of the strict path-length rows.
MarginResult maximize_margin(const Instance& instance, const RoutingForest& forest,
                             const ModelConstants& constants);

}  // namespace usp
