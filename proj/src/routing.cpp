#include "usp/routing.hpp"

#include <algorithm>

namespace usp {

DemandRouting DemandRouting::empty(const Instance& instance) {
  return {std::vector<std::vector<char>>(instance.demands.size(),
                                         std::vector<char>(instance.links.size(), 0))};
}

DemandRouting DemandRouting::from_paths(const Instance& instance,
                                        const std::vector<std::vector<NodeIndex>>& paths) {
  DemandRouting r = empty(instance);
  if (paths.size() != instance.demands.size())
    throw MalformedRouting("expected one path per demand");
  for (DemandIndex k = 0; k < paths.size(); ++k)
    for (std::size_t h = 0; h + 1 < paths[k].size(); ++h) {
      auto l = instance.find_link(paths[k][h], paths[k][h + 1]);
      if (!l) throw MalformedRouting("path uses a missing link");
      r.x[k][*l] = 1;
    }
  return r;
}

double routing_objective(const Instance& instance, const DemandRouting& routing) {
  double total = 0.0;
  for (DemandIndex k = 0; k < routing.x.size(); ++k)
    for (char used : routing.x[k])
      if (used) total += instance.demands[k].bandwidth;
  return total;
}

std::vector<std::string> conservation_violations(const Instance& instance,
                                                 const DemandRouting& routing) {
  std::vector<std::string> out;
  for (DemandIndex k = 0; k < routing.x.size(); ++k) {
    std::vector<int> balance(instance.nodes.size(), 0);
    for (LinkIndex l = 0; l < instance.links.size(); ++l)
      if (routing.x[k][l]) {
        ++balance[instance.links[l].head];
        --balance[instance.links[l].tail];
      }
    const auto& d = instance.demands[k];
    for (NodeIndex i = 0; i < balance.size(); ++i) {
      int want = i == d.origin ? -1 : i == d.destination ? 1 : 0;
      if (balance[i] != want)
        out.push_back("demand " + instance.demand_label(k) + ", node " + instance.nodes[i] +
                      ": flow conservation broken");
    }
  }
  return out;
}

std::vector<std::string> endpoint_violations(const Instance& instance,
                                             const DemandRouting& routing) {
  std::vector<std::string> out;
  for (DemandIndex k = 0; k < routing.x.size(); ++k) {
    const auto& d = instance.demands[k];
    int s_in = 0, s_out = 0, t_in = 0, t_out = 0;
    for (LinkIndex l = 0; l < instance.links.size(); ++l) {
      if (!routing.x[k][l]) continue;
      const auto& e = instance.links[l];
      s_in += e.head == d.origin;
      s_out += e.tail == d.origin;
      t_in += e.head == d.destination;
      t_out += e.tail == d.destination;
    }
    if (s_in != 0 || s_out != 1)
      out.push_back("demand " + instance.demand_label(k) + ": origin needs one outgoing link and no incoming");
    if (t_in != 1 || t_out != 0)
      out.push_back("demand " + instance.demand_label(k) + ": destination needs one incoming link and no outgoing");
  }
  return out;
}

namespace {

// Links of one directed cycle among the assigned links, or empty.
std::vector<LinkIndex> find_cycle(const Instance& instance, const Adjacency& adj,
                                  const std::vector<char>& x) {
  const std::size_t n = instance.nodes.size();
  std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::vector<LinkIndex> stack;
  std::vector<LinkIndex> cycle;

  auto dfs = [&](auto&& self, NodeIndex u) -> bool {
    state[u] = 1;
    for (LinkIndex l : adj.out(u)) {
      if (!x[l]) continue;
      NodeIndex v = instance.links[l].head;
      if (state[v] == 1) {
        // Unwind the stack back to v.
        cycle.push_back(l);
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
          cycle.push_back(*it);
          if (instance.links[*it].tail == v) break;
        }
        return true;
      }
      if (state[v] == 0) {
        stack.push_back(l);
        if (self(self, v)) return true;
        stack.pop_back();
      }
    }
    state[u] = 2;
    return false;
  };
  for (NodeIndex u = 0; u < n; ++u)
    if (state[u] == 0 && dfs(dfs, u)) return cycle;
  return {};
}

}  // namespace

bool has_loops(const Instance& instance, const DemandRouting& routing) {
  Adjacency adj(instance);
  for (const auto& x : routing.x)
    if (!find_cycle(instance, adj, x).empty()) return true;
  return false;
}

DemandRouting strip_loops(const Instance& instance, const DemandRouting& routing) {
  if (auto bad = conservation_violations(instance, routing); !bad.empty())
    throw MalformedRouting(bad.front());
  Adjacency adj(instance);
  DemandRouting out = routing;
  for (auto& x : out.x)
    for (auto cycle = find_cycle(instance, adj, x); !cycle.empty();
         cycle = find_cycle(instance, adj, x))
      for (LinkIndex l : cycle) x[l] = 0;
  return out;
}

std::vector<SubpathViolation> subpath_optimality_check(const Instance& instance,
                                                       const DemandRouting& routing) {
  std::vector<SubpathViolation> out;
  Adjacency adj(instance);
  for (NodeIndex s : instance.origins()) {
    const auto ks = instance.demands_from(s);
    for (NodeIndex i = 0; i < instance.nodes.size(); ++i) {
      if (i == s) continue;
      int sum = 0;
      for (LinkIndex h : adj.in(i)) {
        bool any = std::any_of(ks.begin(), ks.end(),
                               [&](DemandIndex k) { return routing.x[k][h] != 0; });
        sum += any ? 1 : 0;
      }
      if (sum > 1) out.push_back({s, i, sum});
    }
  }
  return out;
}

RoutingForest demand_to_origin(const Instance& instance, const DemandRouting& routing) {
  if (routing.x.size() != instance.demands.size())
    throw MalformedRouting("routing has the wrong number of demands");
  if (auto bad = conservation_violations(instance, routing); !bad.empty())
    throw MalformedRouting(bad.front());
  if (has_loops(instance, routing)) throw MalformedRouting("routing contains flow loops");
  if (auto bad = subpath_optimality_check(instance, routing); !bad.empty())
    throw MalformedRouting("sub-path optimality violated: origin " +
                           instance.nodes[bad.front().origin] + ", node " +
                           instance.nodes[bad.front().node]);
  RoutingForest forest;
  const std::size_t m = instance.links.size();
  for (NodeIndex s : instance.origins()) {
    OriginTree tree{s, std::vector<char>(m, 0), std::vector<double>(m, 0.0)};
    for (DemandIndex k : instance.demands_from(s))
      for (LinkIndex l = 0; l < m; ++l)
        if (routing.x[k][l]) {
          tree.used[l] = 1;
          tree.flow[l] += instance.demands[k].bandwidth;
        }
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

DemandRouting origin_to_demand(const Instance& instance, const RoutingForest& forest) {
  DemandRouting r = DemandRouting::empty(instance);
  for (DemandIndex k = 0; k < instance.demands.size(); ++k) {
    auto path = trace_demand_path(instance, forest, k);
    for (std::size_t h = 0; h + 1 < path.size(); ++h)
      r.x[k][*instance.find_link(path[h], path[h + 1])] = 1;
  }
  return r;
}

}  // namespace usp
