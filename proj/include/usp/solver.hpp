#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "usp/lp.hpp"
#include "usp/master.hpp"
#include "usp/spf.hpp"

namespace usp {

enum class SolveStatus { Optimal, Infeasible, BoundsExhausted };
const char* to_string(SolveStatus s);

struct Diagnostics {
  std::uint64_t iterations = 0;  // master candidates examined
  std::uint64_t cuts = 0;
  std::uint64_t nodes = 0;  // master search nodes, or grid points for the oracle
  std::uint64_t lp_solves = 0;
  double wall_seconds = 0.0;
  std::string note;
};

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<WeightVector> weights;
  RoutingForest forest;
  double objective = 0.0;
  Diagnostics diagnostics;
};

// exact: exclude the whole tree combination. origin: additionally test each
// origin's tree on its own and exclude a tree that fails alone. hint: exclude
// the y literals behind the rows of an infeasible subsystem.
enum class CutMode { Exact, Origin, Hint };
const char* to_string(CutMode m);
CutMode parse_cut_mode(const std::string& text);

struct BendersConfig {
  std::optional<double> eps;    // default: one grid step
  std::optional<double> big_M;  // default: |N| * w_max
  std::uint64_t node_limit = 1000000;
  double time_limit = 600.0;  // seconds; 0 gives BoundsExhausted at once
  CutMode cut_mode = CutMode::Exact;
};

// Decomposition: candidates from MasterSearch in nondecreasing objective, each
// tested with recover_weights; failures become no-good cuts. The first
// recovered candidate is optimal. On BoundsExhausted the best feasible
// baseline (hop-count or inverse-capacity) is carried when one exists.
Solution benders_solve(const Instance& instance, const BendersConfig& config = {});

// Exhaustive search over the weight grid in lexicographic order; keeps the
// first vector of minimum objective. Throws ResourceLimit when the grid holds
// more than grid_limit vectors.
Solution brute_force_solve(const Instance& instance, std::uint64_t grid_limit = 10000000);

// Number of weight vectors on the grid, saturating at UINT64_MAX.
std::uint64_t grid_size(const Instance& instance);

// Weights feasible for the problem: unique routing for every demand and no
// capacity excess. Returns the forest when so.
std::optional<RoutingForest> feasible_routing(const Instance& instance,
                                              const WeightVector& weights);

std::string export_solution(const Instance& instance, const Solution& solution);

}  // namespace usp
