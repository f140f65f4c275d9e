#pragma once

#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

#include "usp/instance.hpp"
#include "usp/spf.hpp"

namespace usp::test {

struct L {
  std::string tail, head;
  double capacity;
};
struct D {
  std::string origin, destination;
  double bandwidth;
};

inline Instance make(std::vector<std::string> nodes, const std::vector<L>& links,
                     const std::vector<D>& demands, double w_min = 1, double w_max = 10,
                     double step = 1) {
  Instance inst;
  inst.nodes = std::move(nodes);
  auto idx = [&](const std::string& id) { return *inst.find_node(id); };
  for (const auto& l : links) inst.links.push_back({idx(l.tail), idx(l.head), l.capacity});
  for (const auto& d : demands)
    inst.demands.push_back({idx(d.origin), idx(d.destination), d.bandwidth});
  inst.w_min = w_min;
  inst.w_max = w_max;
  inst.weight_resolution = step;
  return inst;
}

inline Instance two_node() { return make({"a", "b"}, {{"a", "b", 10}}, {{"a", "b", 1}}); }

// s->a->t (links 0, 1) and s->b->t (links 2, 3).
inline Instance diamond(double w_min = 1, double w_max = 10, double cap = 10) {
  return make({"s", "a", "b", "t"},
              {{"s", "a", cap}, {"a", "t", cap}, {"s", "b", cap}, {"b", "t", cap}},
              {{"s", "t", 1}}, w_min, w_max);
}

inline WeightVector weights(const Instance& inst, std::vector<std::int64_t> units) {
  return WeightVector(std::move(units), inst.weight_resolution);
}

inline std::vector<NodeIndex> nodes_of(const Instance& inst, std::vector<std::string> ids) {
  std::vector<NodeIndex> out;
  for (const auto& id : ids) out.push_back(*inst.find_node(id));
  return out;
}

// Small random instance with a coarse weight grid.
inline Instance small_random(std::uint64_t seed, std::size_t max_nodes = 5,
                             std::int64_t grid_points = 3) {
  GeneratorParams p;
  p.seed = seed;
  p.n_nodes = 2 + seed % (max_nodes - 1);
  p.avg_out_degree = std::min(1.0 + static_cast<double>(seed % 3) * 0.5,
                              static_cast<double>(p.n_nodes - 1));
  const std::size_t pairs = p.n_nodes * (p.n_nodes - 1);
  p.n_demands = 1 + seed % std::min<std::size_t>(pairs, 4);
  p.capacity_range = {1, 12};
  p.demand_range = {1, 4};
  p.w_min = 1;
  p.w_max = static_cast<double>(grid_points);
  return generate_random_instance(p);
}

}  // namespace usp::test

namespace usp::test {

// Instances whose recovery needs the later stages once eps < one grid step.
inline Instance stage_instance(std::uint64_t seed) {
  GeneratorParams p;
  p.seed = seed;
  p.n_nodes = 4 + seed % 4;
  p.avg_out_degree = 2.2;
  p.n_demands = 2 + seed % 4;
  p.w_min = 1;
  p.w_max = static_cast<double>(1 + seed % 3);
  p.capacity_range = {2, 10};
  return generate_random_instance(p);
}

}  // namespace usp::test
