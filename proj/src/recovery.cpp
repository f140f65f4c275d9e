#include <algorithm>
#include <functional>
#include <stdexcept>

#include "usp/lp.hpp"

namespace usp {

PathLengthSystem path_length_system(const Instance& instance, const RoutingForest& forest,
                                    const Rational& eps_units, const Rational& big_M_units,
                                    bool margin) {
  PathLengthSystem out;
  LinearSystem& sys = out.system;
  const auto origins = instance.origins();
  const std::size_t n = instance.nodes.size();
  auto id = [](std::size_t i) { return std::to_string(i); };

  for (const auto& e : instance.links)
    out.weight_var.push_back(sys.add_variable("w_" + id(e.tail) + "_" + id(e.head),
                                              Rational(instance.w_min_units()),
                                              Rational(instance.w_max_units())));
  std::vector<std::vector<std::size_t>> len(origins.size());
  for (std::size_t p = 0; p < origins.size(); ++p)
    for (NodeIndex i = 0; i < n; ++i)
      len[p].push_back(sys.add_variable("l_" + id(origins[p]) + "_" + id(i), Rational(0),
                                        i == origins[p] ? std::optional<Rational>(0)
                                                        : std::nullopt));
  if (margin) {
    out.margin_var = sys.add_variable(
        "t", eps_units,
        Rational(instance.w_max_units()) * static_cast<long>(std::max<std::size_t>(n, 1)));
    sys.objective.push_back({*out.margin_var, Rational(1)});
  }

  Adjacency adj(instance);
  for (std::size_t p = 0; p < origins.size(); ++p) {
    const OriginTree* tree = forest.tree_for(origins[p]);
    if (!tree || tree->used.size() != instance.links.size())
      throw MalformedRouting("forest has no tree for origin " + instance.nodes[origins[p]]);
    for (LinkIndex l = 0; l < instance.links.size(); ++l) {
      const NodeIndex i = instance.links[l].tail, j = instance.links[l].head;
      const int y = tree->used[l] ? 1 : 0;
      int into = 0;
      for (LinkIndex h : adj.in(j)) into += tree->used[h] ? 1 : 0;
      const std::string tag = id(origins[p]) + "_" + id(i) + "_" + id(j);
      std::vector<std::pair<std::size_t, Rational>> diff{
          {len[p][j], Rational(1)}, {len[p][i], Rational(-1)}, {out.weight_var[l], Rational(-1)}};

      if (margin && into - y == 1) {
        auto terms = diff;
        terms.push_back({*out.margin_var, Rational(1)});
        sys.add_row("plu_" + tag, std::move(terms), Sense::LessEqual, Rational(0));
        out.strict_rows.push_back("plu_" + tag);
      } else {
        sys.add_row("plu_" + tag, diff, Sense::LessEqual, -eps_units * (into - y));
        if (into - y > 0) out.strict_rows.push_back("plu_" + tag);
      }
      sys.add_row("pll_" + tag, std::move(diff), Sense::GreaterEqual,
                  -big_M_units * (1 - y));
    }
  }
  return out;
}

namespace {

Rational units_of(double value, double step) { return Rational(value) / Rational(step); }

std::int64_t round_half_up(const Rational& q) {
  Rational shifted = q + Rational(1, 2);
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
  return f.get_si();
}

std::int64_t floor_of(const Rational& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f.get_si();
}

WeightVector snap(const Instance& instance, const std::vector<Rational>& values,
                  const std::vector<std::size_t>& weight_var) {
  std::vector<std::int64_t> units;
  for (std::size_t v : weight_var)
    units.push_back(std::clamp(round_half_up(values[v]), instance.w_min_units(),
                               instance.w_max_units()));
  return WeightVector(std::move(units), instance.weight_resolution);
}

// True when `weights` route every demand on its path in `forest`.
bool reproduces(const Instance& instance, const WeightVector& weights,
                const RoutingForest& forest) {
  auto outcome = route_demands(instance, weights);
  if (outcome.status != RoutingStatus::Unique) return false;
  for (DemandIndex k = 0; k < instance.demands.size(); ++k)
    if (trace_demand_path(instance, outcome.forest, k) !=
        trace_demand_path(instance, forest, k))
      return false;
  return true;
}

}  // namespace

MarginResult maximize_margin(const Instance& instance, const RoutingForest& forest,
                             const ModelConstants& constants) {
  require_valid_constants(instance, constants);
  auto pls = path_length_system(instance, forest,
                                units_of(constants.eps, instance.weight_resolution),
                                units_of(constants.big_M, instance.weight_resolution), true);
  MarginResult out;
  auto sol = optimize(pls.system);
  if (sol.status != LpStatus::Optimal) return out;
  out.feasible = true;
  out.margin = sol.values[*pls.margin_var];
  for (std::size_t v : pls.weight_var) out.weights.push_back(sol.values[v]);
  WeightVector w = snap(instance, sol.values, pls.weight_var);
  if (reproduces(instance, w, forest)) out.snapped = std::move(w);
  return out;
}

WeightRecovery recover_weights(const Instance& instance, const RoutingForest& forest,
                               const ModelConstants& constants,
                               const RecoveryOptions& options) {
  require_valid_constants(instance, constants);
  const Rational eps = units_of(constants.eps, instance.weight_resolution);
  const Rational big_M = units_of(constants.big_M, instance.weight_resolution);
  auto pls = path_length_system(instance, forest, eps, big_M);

  WeightRecovery out;
  ++out.lp_solves;
  auto first = solve_feasibility(pls.system, options.want_hint);
  if (auto* inf = std::get_if<Infeasible>(&first)) {
    out.status = RecoveryStatus::Infeasible;
    out.hint = inf->hint;
    return out;
  }
  const auto& point = std::get<Feasible>(first).values;
  if (WeightVector w = snap(instance, point, pls.weight_var); reproduces(instance, w, forest)) {
    out.status = RecoveryStatus::Recovered;
    out.weights = std::move(w);
    out.stage = 1;
    return out;
  }

  ++out.lp_solves;
  auto margin = maximize_margin(instance, forest, constants);
  if (margin.snapped) {
    out.status = RecoveryStatus::Recovered;
    out.weights = std::move(margin.snapped);
    out.stage = 2;
    return out;
  }

  // Depth-first branching on fractional weights; an integral LP point routes
  // the forest uniquely because eps <= one grid unit.
  std::size_t nodes = 0;
  std::function<std::optional<WeightVector>(LinearSystem&)> branch =
      [&](LinearSystem& sys) -> std::optional<WeightVector> {
    if (++nodes > options.branch_limit)
      throw ResourceLimit("weight recovery exceeded the branch limit");
    ++out.lp_solves;
    auto res = solve_feasibility(sys);
    auto* feas = std::get_if<Feasible>(&res);
    if (!feas) return std::nullopt;
    WeightVector w = snap(instance, feas->values, pls.weight_var);
    if (reproduces(instance, w, forest)) return w;
    for (std::size_t v : pls.weight_var) {
      const Rational& x = feas->values[v];
      if (x.get_den() == 1) continue;
      const std::int64_t down = floor_of(x);
      auto saved = sys.variables[v];
      sys.variables[v].upper = Rational(down);
      auto found = branch(sys);
      sys.variables[v] = saved;
      if (found) return found;
      sys.variables[v].lower = Rational(down + 1);
      found = branch(sys);
      sys.variables[v] = saved;
      return found;
    }
    throw std::logic_error("integral weights satisfy the path-length rows but do not "
                           "reproduce the forest");
  };
  LinearSystem work = pls.system;
  if (auto w = branch(work)) {
    out.status = RecoveryStatus::Recovered;
    out.weights = std::move(w);
    out.stage = 3;
    return out;
  }
  out.status = RecoveryStatus::GridInfeasible;
  return out;
}

}  // namespace usp
