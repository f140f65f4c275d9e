#include "usp/spf.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>

#include "json.hpp"

namespace usp {

using json = nlohmann::ordered_json;

WeightVector WeightVector::uniform(const Instance& instance, std::int64_t units) {
  return WeightVector(std::vector<std::int64_t>(instance.links.size(), units),
                      instance.weight_resolution);
}

void require_admissible(const Instance& instance, const WeightVector& weights) {
  if (weights.size() != instance.links.size())
    throw Error("weight vector has " + std::to_string(weights.size()) +
                " entries for " + std::to_string(instance.links.size()) + " links");
  const auto lo = instance.w_min_units(), hi = instance.w_max_units();
  for (LinkIndex l = 0; l < weights.size(); ++l)
    if (weights.units(l) < lo || weights.units(l) > hi)
      throw Error("weight of link " + instance.link_label(l) +
                  " outside [w_min, w_max]");
}

const OriginTree* RoutingForest::tree_for(NodeIndex origin) const {
  for (const auto& t : trees)
    if (t.origin == origin) return &t;
  return nullptr;
}

RoutingForest forest_from_paths(const Instance& instance,
                                const std::vector<std::vector<NodeIndex>>& paths) {
  if (paths.size() != instance.demands.size())
    throw MalformedRouting("expected one path per demand");
  RoutingForest forest;
  const std::size_t m = instance.links.size();
  for (NodeIndex s : instance.origins())
    forest.trees.push_back({s, std::vector<char>(m, 0), std::vector<double>(m, 0.0)});
  auto tree_of = [&](NodeIndex s) -> OriginTree& {
    for (auto& t : forest.trees)
      if (t.origin == s) return t;
    throw MalformedRouting("unknown origin");
  };
  std::vector<std::vector<std::optional<LinkIndex>>> incoming(
      forest.trees.size(), std::vector<std::optional<LinkIndex>>(instance.nodes.size()));

  for (DemandIndex k = 0; k < paths.size(); ++k) {
    const auto& d = instance.demands[k];
    const auto& p = paths[k];
    if (p.size() < 2 || p.front() != d.origin || p.back() != d.destination)
      throw MalformedRouting("path of demand " + instance.demand_label(k) +
                             " does not join its endpoints");
    OriginTree& tree = tree_of(d.origin);
    auto ti = static_cast<std::size_t>(&tree - forest.trees.data());
    for (std::size_t h = 0; h + 1 < p.size(); ++h) {
      auto l = instance.find_link(p[h], p[h + 1]);
      if (!l) throw MalformedRouting("path of demand " + instance.demand_label(k) +
                                     " uses a missing link");
      auto& in = incoming[ti][p[h + 1]];
      if (in && *in != *l)
        throw MalformedRouting("paths from origin " + instance.nodes[d.origin] +
                               " enter node " + instance.nodes[p[h + 1]] +
                               " on different links");
      in = *l;
      tree.used[*l] = 1;
      tree.flow[*l] += d.bandwidth;
    }
  }
  return forest;
}

std::vector<NodeIndex> trace_demand_path(const Instance& instance,
                                         const RoutingForest& forest,
                                         DemandIndex k) {
  const auto& d = instance.demands.at(k);
  const OriginTree* tree = forest.tree_for(d.origin);
  if (!tree) throw MalformedRouting("no tree for origin of demand " + instance.demand_label(k));
  Adjacency adj(instance);
  std::vector<char> visited(instance.nodes.size(), 0);
  std::vector<NodeIndex> reversed{d.destination};
  NodeIndex i = d.destination;
  visited[i] = 1;
  while (i != d.origin) {
    std::optional<LinkIndex> pred;
    for (LinkIndex l : adj.in(i)) {
      if (!tree->used[l]) continue;
      if (pred)
        throw MalformedRouting("node " + instance.nodes[i] +
                               " has two used incoming links");
      pred = l;
    }
    if (!pred)
      throw MalformedRouting("walk from " + instance.nodes[d.destination] +
                             " stops at " + instance.nodes[i] + " before the origin");
    i = instance.links[*pred].tail;
    if (visited[i])
      throw MalformedRouting("cycle through node " + instance.nodes[i]);
    visited[i] = 1;
    reversed.push_back(i);
  }
  return {reversed.rbegin(), reversed.rend()};
}

namespace {

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::vector<std::string> forest_violations(const Instance& instance,
                                           const RoutingForest& forest) {
  std::vector<std::string> out;
  const auto origins = instance.origins();
  if (forest.trees.size() != origins.size()) {
    out.push_back("forest has " + std::to_string(forest.trees.size()) +
                  " trees for " + std::to_string(origins.size()) + " origins");
    return out;
  }
  Adjacency adj(instance);
  const std::size_t m = instance.links.size();
  for (std::size_t t = 0; t < origins.size(); ++t) {
    const auto& tree = forest.trees[t];
    const NodeIndex s = origins[t];
    const std::string tag = "origin " + instance.nodes[s];
    if (tree.origin != s || tree.used.size() != m || tree.flow.size() != m) {
      out.push_back(tag + ": tree shape mismatch");
      continue;
    }
    const double d_s = instance.origin_demand(s);
    std::vector<double> sink(instance.nodes.size(), 0.0);
    sink[s] = -d_s;
    for (DemandIndex k : instance.demands_from(s))
      sink[instance.demands[k].destination] += instance.demands[k].bandwidth;
    std::vector<char> is_dest(instance.nodes.size(), 0);
    for (NodeIndex v : instance.destinations_from(s)) is_dest[v] = 1;

    for (NodeIndex i = 0; i < instance.nodes.size(); ++i) {
      int indeg = 0;
      double inflow = 0.0, outflow = 0.0;
      for (LinkIndex l : adj.in(i)) {
        indeg += tree.used[l] ? 1 : 0;
        inflow += tree.flow[l];
      }
      for (LinkIndex l : adj.out(i)) outflow += tree.flow[l];
      const std::string at = tag + ", node " + instance.nodes[i];
      if (i == s && indeg != 0) out.push_back(at + ": origin has a used incoming link");
      if (i != s && is_dest[i] && indeg != 1)
        out.push_back(at + ": destination needs exactly one used incoming link");
      if (i != s && !is_dest[i] && indeg > 1)
        out.push_back(at + ": more than one used incoming link");
      if (!close(inflow - outflow, sink[i]))
        out.push_back(at + ": flow conservation broken");
    }
    for (LinkIndex l = 0; l < m; ++l) {
      const std::string at = tag + ", link " + instance.link_label(l);
      if (tree.flow[l] < 0.0) out.push_back(at + ": negative flow");
      if (tree.flow[l] > 0.0 && !tree.used[l]) out.push_back(at + ": flow on unused link");
      if (tree.flow[l] > d_s && !close(tree.flow[l], d_s))
        out.push_back(at + ": flow exceeds origin demand");
    }
  }
  return out;
}

namespace {

struct OriginSearch {
  std::vector<std::optional<std::int64_t>> dist;
  std::vector<int> count;  // number of shortest paths, capped at 2
};

OriginSearch search_from(const Instance& instance, const Adjacency& adj,
                         const WeightVector& w, NodeIndex origin) {
  const std::size_t n = instance.nodes.size();
  OriginSearch r{std::vector<std::optional<std::int64_t>>(n), std::vector<int>(n, 0)};
  using Item = std::pair<std::int64_t, NodeIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  std::vector<char> done(n, 0);
  std::vector<NodeIndex> settled;
  r.dist[origin] = 0;
  pq.push({0, origin});
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = 1;
    settled.push_back(u);
    for (LinkIndex l : adj.out(u)) {
      NodeIndex v = instance.links[l].head;
      std::int64_t nd = du + w.units(l);
      if (!r.dist[v] || nd < *r.dist[v]) {
        r.dist[v] = nd;
        pq.push({nd, v});
      }
    }
  }
  // Positive weights: settle order is a topological order of the
  // shortest-path DAG.
  r.count[origin] = 1;
  for (NodeIndex v : settled) {
    if (v == origin) continue;
    int c = 0;
    for (LinkIndex l : adj.in(v)) {
      NodeIndex u = instance.links[l].tail;
      if (r.dist[u] && *r.dist[u] + w.units(l) == *r.dist[v]) c += r.count[u];
    }
    r.count[v] = std::min(c, 2);
  }
  return r;
}

}  // namespace

PathLengths shortest_path_lengths(const Instance& instance,
                                  const WeightVector& weights, NodeIndex origin) {
  require_admissible(instance, weights);
  Adjacency adj(instance);
  return {origin, search_from(instance, adj, weights, origin).dist};
}

int count_shortest_paths(const Instance& instance, const WeightVector& weights,
                         NodeIndex origin, NodeIndex dest) {
  require_admissible(instance, weights);
  Adjacency adj(instance);
  auto r = search_from(instance, adj, weights, origin);
  if (!r.dist[dest])
    throw UnreachableDemand(0, "(" + instance.nodes[origin] + "," +
                                   instance.nodes[dest] + ")");
  return r.count[dest];
}

RoutingOutcome route_demands(const Instance& instance, const WeightVector& weights) {
  require_admissible(instance, weights);
  Adjacency adj(instance);
  RoutingOutcome out;
  const std::size_t m = instance.links.size();
  for (NodeIndex s : instance.origins()) {
    auto r = search_from(instance, adj, weights, s);
    OriginTree tree{s, std::vector<char>(m, 0), std::vector<double>(m, 0.0)};
    for (DemandIndex k : instance.demands_from(s)) {
      const auto& d = instance.demands[k];
      if (!r.dist[d.destination] || r.count[d.destination] != 1) {
        RoutingStatus st = r.dist[d.destination] ? RoutingStatus::NonUnique
                                                 : RoutingStatus::Unreachable;
        if (out.status == RoutingStatus::Unique || k < out.demand) {
          out.status = st;
          out.demand = k;
        }
        continue;
      }
      NodeIndex v = d.destination;
      while (v != s) {
        for (LinkIndex l : adj.in(v)) {
          NodeIndex u = instance.links[l].tail;
          if (r.dist[u] && *r.dist[u] + weights.units(l) == *r.dist[v]) {
            tree.used[l] = 1;
            tree.flow[l] += d.bandwidth;
            v = u;
            break;
          }
        }
      }
    }
    out.forest.trees.push_back(std::move(tree));
  }
  if (out.status != RoutingStatus::Unique) out.forest = {};
  return out;
}

RoutingForest routing_from_weights(const Instance& instance,
                                   const WeightVector& weights) {
  auto out = route_demands(instance, weights);
  switch (out.status) {
    case RoutingStatus::NonUnique:
      throw NonUniqueRouting(out.demand, instance.demand_label(out.demand));
    case RoutingStatus::Unreachable:
      throw UnreachableDemand(out.demand, instance.demand_label(out.demand));
    case RoutingStatus::Unique:
      break;
  }
  return std::move(out.forest);
}

std::vector<double> link_loads(const Instance& instance, const RoutingForest& forest) {
  std::vector<double> load(instance.links.size(), 0.0);
  for (LinkIndex l = 0; l < load.size(); ++l)
    for (const auto& t : forest.trees) load[l] += t.flow.at(l);
  return load;
}

double evaluate_objective(const Instance& instance, const RoutingForest& forest) {
  double total = 0.0;
  for (double x : link_loads(instance, forest)) total += x;
  return total;
}

std::vector<CapacityViolation> check_capacity(const Instance& instance,
                                              const RoutingForest& forest) {
  std::vector<CapacityViolation> out;
  auto load = link_loads(instance, forest);
  for (LinkIndex l = 0; l < load.size(); ++l) {
    double c = instance.links[l].capacity;
    if (load[l] > c) out.push_back({l, load[l], c, load[l] - c});
  }
  return out;
}

double max_utilization(const Instance& instance, const RoutingForest& forest) {
  auto load = link_loads(instance, forest);
  double worst = 0.0;
  for (LinkIndex l = 0; l < load.size(); ++l) {
    if (load[l] <= 0.0) continue;
    double c = instance.links[l].capacity;
    if (c <= 0.0)
      throw Error("link " + instance.link_label(l) + " carries load with zero capacity");
    worst = std::max(worst, load[l] / c);
  }
  return worst;
}

WeightVector hop_count_weights(const Instance& instance) {
  const auto lo = instance.w_min_units(), hi = instance.w_max_units();
  auto one = std::llround(1.0 / instance.weight_resolution);
  return WeightVector::uniform(instance, std::clamp<std::int64_t>(one, lo, hi));
}

WeightVector inv_cap_weights(const Instance& instance) {
  const auto lo = instance.w_min_units(), hi = instance.w_max_units();
  double max_cap = 0.0;
  for (const auto& e : instance.links) {
    if (e.capacity <= 0.0)
      throw Error("inverse-capacity weights need positive capacities");
    max_cap = std::max(max_cap, e.capacity);
  }
  std::vector<std::int64_t> units;
  for (const auto& e : instance.links) {
    double w = std::min(instance.w_min * max_cap / e.capacity, instance.w_max);
    units.push_back(
        std::clamp<std::int64_t>(std::llround(w / instance.weight_resolution), lo, hi));
  }
  return WeightVector(std::move(units), instance.weight_resolution);
}

std::string save_weights(const Instance& instance, const WeightVector& weights) {
  json doc = json::array();
  for (LinkIndex l = 0; l < instance.links.size(); ++l)
    doc.push_back({{"tail", instance.nodes[instance.links[l].tail]},
                   {"head", instance.nodes[instance.links[l].head]},
                   {"weight", weights.value(l)}});
  return doc.dump(2) + "\n";
}

WeightVector load_weights(const Instance& instance, const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (doc.is_object() && doc.contains("weights")) doc = doc["weights"];
  if (!doc.is_array()) throw ParseError("expected an array of {tail, head, weight}");
  std::vector<std::optional<std::int64_t>> units(instance.links.size());
  for (std::size_t r = 0; r < doc.size(); ++r) {
    const std::string path = "[" + std::to_string(r) + "]";
    const auto& e = doc[r];
    if (!e.is_object() || !e.contains("tail") || !e.contains("head") ||
        !e.contains("weight"))
      throw ParseError("expected {tail, head, weight}", 0, path);
    if (!e["tail"].is_string() || !e["head"].is_string() || !e["weight"].is_number())
      throw ParseError("wrong field types", 0, path);
    auto i = instance.find_node(e["tail"].get<std::string>());
    auto j = instance.find_node(e["head"].get<std::string>());
    std::optional<LinkIndex> l;
    if (i && j) l = instance.find_link(*i, *j);
    if (!l) throw ParseError("no such link", 0, path);
    if (units[*l]) throw ParseError("link listed twice", 0, path);
    units[*l] = to_grid_units(e["weight"].get<double>(), instance.weight_resolution);
    if (!units[*l]) throw ParseError("weight not on the grid", 0, path + ".weight");
  }
  std::vector<std::int64_t> out;
  for (LinkIndex l = 0; l < units.size(); ++l) {
    if (!units[l]) throw ParseError("missing weight for link " + instance.link_label(l));
    out.push_back(*units[l]);
  }
  WeightVector w(std::move(out), instance.weight_resolution);
  require_admissible(instance, w);
  return w;
}

std::string export_forest(const Instance& instance, const RoutingForest& forest) {
  json doc;
  json paths = json::array();
  for (DemandIndex k = 0; k < instance.demands.size(); ++k) {
    json nodes = json::array();
    for (NodeIndex v : trace_demand_path(instance, forest, k))
      nodes.push_back(instance.nodes[v]);
    paths.push_back({{"demand", k},
                     {"origin", instance.nodes[instance.demands[k].origin]},
                     {"destination", instance.nodes[instance.demands[k].destination]},
                     {"bandwidth", instance.demands[k].bandwidth},
                     {"nodes", std::move(nodes)}});
  }
  doc["paths"] = std::move(paths);
  json trees = json::array();
  for (const auto& t : forest.trees) {
    json links = json::array();
    for (LinkIndex l = 0; l < t.used.size(); ++l)
      if (t.used[l])
        links.push_back({{"tail", instance.nodes[instance.links[l].tail]},
                         {"head", instance.nodes[instance.links[l].head]},
                         {"flow", t.flow[l]}});
    trees.push_back({{"origin", instance.nodes[t.origin]}, {"links", std::move(links)}});
  }
  doc["trees"] = std::move(trees);
  return doc.dump(2) + "\n";
}

}  // namespace usp
