#include "usp/solver.hpp"

#include <chrono>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

namespace usp {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::BoundsExhausted: return "BoundsExhausted";
  }
  return "?";
}

const char* to_string(CutMode m) {
  switch (m) {
    case CutMode::Exact: return "exact";
    case CutMode::Origin: return "origin";
    case CutMode::Hint: return "hint";
  }
  return "?";
}

CutMode parse_cut_mode(const std::string& text) {
  if (text == "exact") return CutMode::Exact;
  if (text == "origin") return CutMode::Origin;
  if (text == "hint") return CutMode::Hint;
  throw Error("unknown cut mode '" + text + "'");
}

std::optional<RoutingForest> feasible_routing(const Instance& instance,
                                              const WeightVector& weights) {
  auto outcome = route_demands(instance, weights);
  if (outcome.status != RoutingStatus::Unique) return std::nullopt;
  if (!check_capacity(instance, outcome.forest).empty()) return std::nullopt;
  return std::move(outcome.forest);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Cheaper of the two baselines when either routes feasibly.
void carry_baseline(const Instance& instance, Solution& sol) {
  std::vector<WeightVector> tries{hop_count_weights(instance)};
  try {
    tries.push_back(inv_cap_weights(instance));
  } catch (const Error&) {
  }
  for (auto& w : tries) {
    auto forest = feasible_routing(instance, w);
    if (!forest) continue;
    double obj = evaluate_objective(instance, *forest);
    if (!sol.weights || obj < sol.objective) {
      sol.weights = w;
      sol.forest = std::move(*forest);
      sol.objective = obj;
    }
  }
}

Instance single_origin(const Instance& instance, NodeIndex origin) {
  Instance sub = instance;
  sub.demands.clear();
  for (const auto& d : instance.demands)
    if (d.origin == origin) sub.demands.push_back(d);
  return sub;
}

// Literals behind the rows named in an infeasibility hint.
std::optional<Cut> hint_cut(const Instance& instance, const RoutingForest& forest,
                            const std::vector<std::string>& hint) {
  Adjacency adj(instance);
  Cut cut;
  auto add = [&](NodeIndex s, LinkIndex l) {
    const OriginTree* t = forest.tree_for(s);
    CutLiteral lit{s, l, t->used[l] != 0};
    for (const auto& have : cut.literals)
      if (have == lit) return;
    cut.literals.push_back(lit);
  };
  for (const auto& row : hint) {
    const bool upper = row.rfind("plu_", 0) == 0;
    if (!upper && row.rfind("pll_", 0) != 0) return std::nullopt;
    std::istringstream in(row.substr(4));
    std::size_t s = 0, i = 0, j = 0;
    char u1 = 0, u2 = 0;
    if (!(in >> s >> u1 >> i >> u2 >> j)) return std::nullopt;
    auto l = instance.find_link(i, j);
    if (!l || !forest.tree_for(s)) return std::nullopt;
    add(s, *l);
    if (upper)
      for (LinkIndex h : adj.in(j)) add(s, h);
  }
  if (cut.literals.empty()) return std::nullopt;
  return cut;
}

}  // namespace

Solution benders_solve(const Instance& instance, const BendersConfig& config) {
  const auto t0 = Clock::now();
  ModelConstants constants = default_constants(instance);
  if (config.eps) constants.eps = *config.eps;
  if (config.big_M) constants.big_M = *config.big_M;
  require_valid_constants(instance, constants);

  Solution sol;
  auto exhausted = [&](const std::string& why) {
    sol = Solution{SolveStatus::BoundsExhausted, std::nullopt, {}, 0.0, sol.diagnostics};
    sol.diagnostics.note = why;
    carry_baseline(instance, sol);
    sol.diagnostics.wall_seconds = seconds_since(t0);
    return sol;
  };
  if (config.time_limit <= 0.0) return exhausted("time limit");

  MasterSearch master(instance, {std::nullopt, config.node_limit});
  std::map<std::pair<NodeIndex, std::vector<char>>, bool> alone;
  RecoveryOptions ropt;
  ropt.want_hint = config.cut_mode == CutMode::Hint;
  try {
    while (true) {
      if (seconds_since(t0) >= config.time_limit) return exhausted("time limit");
      auto cand = master.next();
      sol.diagnostics.nodes = master.nodes_explored();
      if (!cand) {
        sol.status = SolveStatus::Infeasible;
        break;
      }
      ++sol.diagnostics.iterations;
      auto rec = recover_weights(instance, cand->forest, constants, ropt);
      sol.diagnostics.lp_solves += static_cast<std::uint64_t>(rec.lp_solves);
      if (rec.status == RecoveryStatus::Recovered) {
        if (!(routing_from_weights(instance, *rec.weights) == cand->forest) ||
            !check_capacity(instance, cand->forest).empty())
          throw std::logic_error("recovered weights do not reproduce the candidate");
        sol.status = SolveStatus::Optimal;
        sol.weights = std::move(rec.weights);
        sol.forest = std::move(cand->forest);
        sol.objective = evaluate_objective(instance, sol.forest);
        break;
      }

      std::vector<Cut> cuts;
      if (config.cut_mode == CutMode::Origin) {
        for (const auto& tree : cand->forest.trees) {
          auto key = std::make_pair(tree.origin, tree.used);
          auto it = alone.find(key);
          if (it == alone.end()) {
            Instance sub = single_origin(instance, tree.origin);
            auto r = recover_weights(sub, RoutingForest{{tree}}, constants);
            sol.diagnostics.lp_solves += static_cast<std::uint64_t>(r.lp_solves);
            it = alone.emplace(key, r.status == RecoveryStatus::Recovered).first;
          }
          if (!it->second) cuts.push_back(tree_cut(instance, tree));
        }
      } else if (config.cut_mode == CutMode::Hint && rec.status == RecoveryStatus::Infeasible) {
        if (auto c = hint_cut(instance, cand->forest, rec.hint)) cuts.push_back(std::move(*c));
      }
      if (cuts.empty()) cuts.push_back(exact_cut(instance, cand->forest));
      for (auto& c : cuts) {
        master.add_cut(std::move(c));
        ++sol.diagnostics.cuts;
      }
    }
  } catch (const ResourceLimit& e) {
    return exhausted(e.what());
  }
  sol.diagnostics.nodes = master.nodes_explored();
  sol.diagnostics.wall_seconds = seconds_since(t0);
  return sol;
}

std::uint64_t grid_size(const Instance& instance) {
  const auto per = static_cast<std::uint64_t>(instance.w_max_units() - instance.w_min_units() + 1);
  std::uint64_t total = 1;
  for (std::size_t l = 0; l < instance.links.size(); ++l) {
    if (total > std::numeric_limits<std::uint64_t>::max() / per)
      return std::numeric_limits<std::uint64_t>::max();
    total *= per;
  }
  return total;
}

Solution brute_force_solve(const Instance& instance, std::uint64_t grid_limit) {
  const auto t0 = Clock::now();
  const std::uint64_t total = grid_size(instance);
  if (total > grid_limit)
    throw ResourceLimit("weight grid has " + std::to_string(total) +
                        " vectors, above the limit of " + std::to_string(grid_limit));
  const std::int64_t lo = instance.w_min_units(), hi = instance.w_max_units();
  std::vector<std::int64_t> units(instance.links.size(), lo);
  Solution sol;
  while (true) {
    ++sol.diagnostics.nodes;
    WeightVector w(units, instance.weight_resolution);
    if (auto forest = feasible_routing(instance, w)) {
      double obj = evaluate_objective(instance, *forest);
      if (!sol.weights || obj < sol.objective - 1e-9) {
        sol.status = SolveStatus::Optimal;
        sol.weights = std::move(w);
        sol.forest = std::move(*forest);
        sol.objective = obj;
      }
    }
    std::size_t p = units.size();
    while (p > 0 && units[p - 1] == hi) units[--p] = lo;
    if (p == 0) break;
    ++units[p - 1];
  }
  sol.diagnostics.wall_seconds = seconds_since(t0);
  return sol;
}

std::string export_solution(const Instance& instance, const Solution& solution) {
  nlohmann::ordered_json j;
  j["status"] = to_string(solution.status);
  if (solution.weights) {
    j["objective"] = solution.objective;
    j["max_utilization"] = max_utilization(instance, solution.forest);
    j["weights"] = nlohmann::ordered_json::parse(save_weights(instance, *solution.weights));
    j["paths"] = nlohmann::ordered_json::parse(export_forest(instance, solution.forest))["paths"];
  } else {
    j["objective"] = nullptr;
    j["max_utilization"] = nullptr;
    j["weights"] = nlohmann::ordered_json::array();
    j["paths"] = nlohmann::ordered_json::array();
  }
  const auto& d = solution.diagnostics;
  j["diagnostics"] = {{"iterations", d.iterations}, {"cuts", d.cuts},
                      {"nodes", d.nodes},           {"lp_solves", d.lp_solves},
                      {"wall_seconds", d.wall_seconds}, {"note", d.note}};
  return j.dump(2) + "\n";
}

}  // namespace usp
