#pragma once

#include <string>
#include <vector>

#include "usp/spf.hpp"

namespace usp {

// x^k_ij per demand k and link (i,j).
struct DemandRouting {
  std::vector<std::vector<char>> x;

  friend bool operator==(const DemandRouting&, const DemandRouting&) = default;

  static DemandRouting empty(const Instance& instance);
  static DemandRouting from_paths(const Instance& instance,
                                  const std::vector<std::vector<NodeIndex>>& paths);
};

// sum_k d_k sum_ij x^k_ij
double routing_objective(const Instance& instance, const DemandRouting& routing);

// Per-demand flow conservation (-1 at origin, +1 at destination, 0 elsewhere).
std::vector<std::string> conservation_violations(const Instance& instance,
                                                 const DemandRouting& routing);

// Per-demand endpoint conditions: no used link into the origin, exactly one
// out of it; exactly one into the destination, none out of it.
std::vector<std::string> endpoint_violations(const Instance& instance,
                                             const DemandRouting& routing);

bool has_loops(const Instance& instance, const DemandRouting& routing);

// Removes every directed cycle of assigned links, demand by demand. Throws
// MalformedRouting when the input breaks flow conservation.
DemandRouting strip_loops(const Instance& instance, const DemandRouting& routing);

struct SubpathViolation {
  NodeIndex origin = 0;
  NodeIndex node = 0;
  int incoming = 0;  // sum_h max_{k in D_s} x^k_hi
};

// Evaluates sum_h max_{k in D_s} x^k_hi <= 1 for every origin s and node i != s.
std::vector<SubpathViolation> subpath_optimality_check(const Instance& instance,
                                                       const DemandRouting& routing);

// y^s = max_{k in D_s} x^k, f^s = sum_{k in D_s} d_k x^k. Requires a
// loop-free, conserving, sub-path-optimal routing; throws MalformedRouting
// naming the first offending origin and node otherwise.
RoutingForest demand_to_origin(const Instance& instance, const DemandRouting& routing);

// Per demand, walks back from the destination along the unique used incoming
// link of its origin's tree until the origin. Throws MalformedRouting when a
// walk stalls or revisits a node.
DemandRouting origin_to_demand(const Instance& instance, const RoutingForest& forest);

}  // namespace usp
