#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "usp/instance.hpp"

namespace usp {

// Integer link weights in units of the instance's weight_resolution.
class WeightVector {
 public:
  WeightVector() = default;
  WeightVector(std::vector<std::int64_t> units, double resolution)
      : units_(std::move(units)), resolution_(resolution) {}

  static WeightVector uniform(const Instance& instance, std::int64_t units);

  std::size_t size() const { return units_.size(); }
  std::int64_t units(LinkIndex l) const { return units_[l]; }
  const std::vector<std::int64_t>& units() const { return units_; }
  double value(LinkIndex l) const {
    return static_cast<double>(units_[l]) * resolution_;
  }
  double resolution() const { return resolution_; }

  friend bool operator==(const WeightVector& a, const WeightVector& b) {
    return a.units_ == b.units_;
  }

 private:
  std::vector<std::int64_t> units_;
  double resolution_ = 1.0;
};

// Throws Error unless every link has a weight inside [w_min, w_max].
void require_admissible(const Instance& instance, const WeightVector& weights);

// Shortest-path lengths from one origin, in grid units; nullopt marks an
// unreachable node.
struct PathLengths {
  NodeIndex origin = 0;
  std::vector<std::optional<std::int64_t>> length;
};

// Per-origin routing tree: y (used) and f (flow) indexed by link.
struct OriginTree {
  NodeIndex origin = 0;
  std::vector<char> used;
  std::vector<double> flow;

  friend bool operator==(const OriginTree&, const OriginTree&) = default;
};

// One tree per origin, ordered as Instance::origins().
struct RoutingForest {
  std::vector<OriginTree> trees;

  friend bool operator==(const RoutingForest&, const RoutingForest&) = default;

  const OriginTree* tree_for(NodeIndex origin) const;
};

// Builds the forest induced by one simple path per demand (node sequences,
// in demand order). Paths of the same origin must agree on incoming links.
RoutingForest forest_from_paths(const Instance& instance,
                                const std::vector<std::vector<NodeIndex>>& paths);

// Node sequence of demand k obtained by walking the used incoming links of its
// origin's tree back from the destination. Throws MalformedRouting.
std::vector<NodeIndex> trace_demand_path(const Instance& instance,
                                         const RoutingForest& forest,
                                         DemandIndex k);

// Every broken forest invariant, as text; empty means the forest satisfies
// uniqueness in-degrees, per-origin conservation and flow bounds.
std::vector<std::string> forest_violations(const Instance& instance,
                                           const RoutingForest& forest);

PathLengths shortest_path_lengths(const Instance& instance,
                                  const WeightVector& weights, NodeIndex origin);

// Number of minimum-length origin->dest paths, capped at 2. Throws
// UnreachableDemand when dest cannot be reached.
int count_shortest_paths(const Instance& instance, const WeightVector& weights,
                         NodeIndex origin, NodeIndex dest);

enum class RoutingStatus { Unique, NonUnique, Unreachable };

struct RoutingOutcome {
  RoutingStatus status = RoutingStatus::Unique;
  DemandIndex demand = 0;  // first offending demand when not Unique
  RoutingForest forest;
};

// Non-throwing core of routing_from_weights.
RoutingOutcome route_demands(const Instance& instance, const WeightVector& weights);

// Unique shortest-path routing induced by `weights`. Throws NonUniqueRouting or
// UnreachableDemand naming the first offending demand.
RoutingForest routing_from_weights(const Instance& instance,
                                   const WeightVector& weights);

// Per-link load: sum over origins of f^s.
std::vector<double> link_loads(const Instance& instance, const RoutingForest& forest);

double evaluate_objective(const Instance& instance, const RoutingForest& forest);

struct CapacityViolation {
  LinkIndex link = 0;
  double load = 0.0;
  double capacity = 0.0;
  double excess = 0.0;
};

std::vector<CapacityViolation> check_capacity(const Instance& instance,
                                              const RoutingForest& forest);

// max over links of load / capacity. Throws Error on a loaded link with zero
// capacity.
double max_utilization(const Instance& instance, const RoutingForest& forest);

// Unit weights clamped into [w_min, w_max] and rounded to the grid.
WeightVector hop_count_weights(const Instance& instance);
// w = w_min * max_capacity / c, clamped to w_max, rounded to the nearest grid
// point. Throws Error when a capacity is zero.
WeightVector inv_cap_weights(const Instance& instance);

// JSON array of {tail, head, weight}. load_weights also takes a solution
// file and reads its "weights" member.
std::string save_weights(const Instance& instance, const WeightVector& weights);
WeightVector load_weights(const Instance& instance, const std::string& text);

// JSON with per-demand node sequences and per-origin link/flow tables.
std::string export_forest(const Instance& instance, const RoutingForest& forest);

}  // namespace usp
