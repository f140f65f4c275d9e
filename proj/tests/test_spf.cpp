#include <doctest.h>

#include <functional>
#include <random>

#include "helpers.hpp"
#include "usp/routing.hpp"

using namespace usp;
using namespace usp::test;

namespace {

Instance triangle() {
  return make({"a", "b", "c"}, {{"a", "b", 10}, {"b", "c", 10}, {"a", "c", 10}},
              {{"a", "c", 1}});
}

// Number of minimum-length simple paths, capped at 2, by enumeration.
int enumerate_count(const Instance& inst, const WeightVector& w, NodeIndex s, NodeIndex t) {
  Adjacency adj(inst);
  std::optional<std::int64_t> best;
  int count = 0;
  std::vector<char> on(inst.nodes.size(), 0);
  std::function<void(NodeIndex, std::int64_t)> go = [&](NodeIndex u, std::int64_t len) {
    if (u == t) {
      if (!best || len < *best) {
        best = len;
        count = 1;
      } else if (len == *best) {
        ++count;
      }
      return;
    }
    on[u] = 1;
    for (LinkIndex l : adj.out(u))
      if (!on[inst.links[l].head]) go(inst.links[l].head, len + w.units(l));
    on[u] = 0;
  };
  go(s, 0);
  return std::min(count, 2);
}

WeightVector random_weights(const Instance& inst, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> pick(inst.w_min_units(), inst.w_max_units());
  std::vector<std::int64_t> u;
  for (std::size_t l = 0; l < inst.links.size(); ++l) u.push_back(pick(rng));
  return weights(inst, u);
}

}  // namespace

TEST_CASE("shortest path lengths") {
  auto two = two_node();
  auto pl = shortest_path_lengths(two, weights(two, {5}), 0);
  CHECK(pl.length[0] == 0);
  CHECK(pl.length[1] == 5);

  auto tri = triangle();
  CHECK(shortest_path_lengths(tri, weights(tri, {3, 4, 8}), 0).length[2] == 7);
  CHECK_FALSE(shortest_path_lengths(tri, weights(tri, {3, 4, 8}), 2).length[0]);
}

TEST_CASE("counting shortest paths") {
  auto dia = diamond();
  CHECK(count_shortest_paths(dia, WeightVector::uniform(dia, 1), 0, 3) == 2);
  CHECK(count_shortest_paths(dia, weights(dia, {1, 1, 1, 2}), 0, 3) == 1);
  auto two = two_node();
  CHECK(count_shortest_paths(two, weights(two, {1}), 0, 1) == 1);
  CHECK_THROWS_AS(count_shortest_paths(two, weights(two, {1}), 1, 0), UnreachableDemand);
}

TEST_CASE("routing from weights") {
  auto dia = diamond();
  auto forest = routing_from_weights(dia, weights(dia, {1, 1, 1, 2}));
  REQUIRE(forest.trees.size() == 1);
  CHECK(forest.trees[0].used == std::vector<char>{1, 1, 0, 0});
  CHECK(forest.trees[0].flow == std::vector<double>{1, 1, 0, 0});
  CHECK(trace_demand_path(dia, forest, 0) == nodes_of(dia, {"s", "a", "t"}));

  try {
    routing_from_weights(dia, WeightVector::uniform(dia, 1));
    FAIL("expected non-unique routing");
  } catch (const NonUniqueRouting& e) {
    CHECK(std::string(e.what()) == "non-unique: demand (s,t)");
    CHECK(e.demand() == 0);
  }

  auto chain = make({"s", "a", "t"}, {{"s", "a", 10}, {"a", "t", 10}},
                    {{"s", "a", 1}, {"s", "t", 2}});
  auto f = routing_from_weights(chain, WeightVector::uniform(chain, 1));
  CHECK(f.trees[0].flow == std::vector<double>{3, 2});

  CHECK_THROWS_AS(require_admissible(dia, weights(dia, {0, 1, 1, 1})), Error);
}

TEST_CASE("objective, capacity and utilization") {
  auto chain = make({"s", "a", "t", "u"}, {{"s", "a", 10}, {"a", "t", 6}, {"t", "u", 10}},
                    {{"s", "t", 1}});
  auto f = routing_from_weights(chain, WeightVector::uniform(chain, 1));
  CHECK(evaluate_objective(chain, f) == 2);
  CHECK(evaluate_objective(chain, RoutingForest{}) == 0);

  auto two = make({"s", "a", "t", "u"}, {{"s", "a", 10}, {"a", "t", 10}, {"t", "u", 10}},
                  {{"s", "t", 1}, {"s", "u", 2}});
  CHECK(evaluate_objective(two, routing_from_weights(two, WeightVector::uniform(two, 1))) == 8);

  auto load3 = make({"a", "b"}, {{"a", "b", 10}}, {{"a", "b", 3}});
  auto f3 = routing_from_weights(load3, weights(load3, {1}));
  CHECK(check_capacity(load3, f3).empty());
  CHECK(max_utilization(load3, f3) == doctest::Approx(0.3));
  load3.links[0].capacity = 2;
  auto over = check_capacity(load3, f3);
  REQUIRE(over.size() == 1);
  CHECK(over[0].excess == 1);
  load3.links[0].capacity = 3;
  CHECK(check_capacity(load3, f3).empty());
  CHECK(max_utilization(load3, f3) == 1.0);
  load3.links[0].capacity = 0;
  CHECK_THROWS_AS(max_utilization(load3, f3), Error);

  auto pair = make({"a", "b", "c"}, {{"a", "b", 10}, {"b", "c", 6}}, {{"a", "b", 8}, {"b", "c", 3}});
  CHECK(max_utilization(pair, routing_from_weights(pair, WeightVector::uniform(pair, 1))) == 0.8);
  auto none = make({"a", "b"}, {{"a", "b", 10}}, {});
  CHECK(max_utilization(none, routing_from_weights(none, WeightVector::uniform(none, 1))) == 0);
}

TEST_CASE("baseline weights") {
  auto dia = diamond();
  CHECK(hop_count_weights(dia) == WeightVector::uniform(dia, 1));
  auto two = make({"a", "b", "c"}, {{"a", "b", 10}, {"b", "c", 5}}, {{"a", "c", 1}});
  CHECK(inv_cap_weights(two).units() == std::vector<std::int64_t>{1, 2});
  two.links[1].capacity = 10;
  CHECK(inv_cap_weights(two).units() == std::vector<std::int64_t>{1, 1});
  two.links[1].capacity = 0;
  CHECK_THROWS_AS(inv_cap_weights(two), Error);
  auto tight = two_node();
  tight.w_min = 3;
  tight.w_max = 4;
  CHECK(hop_count_weights(tight).units() == std::vector<std::int64_t>{3});
}

TEST_CASE("weights and forest files") {
  auto dia = diamond();
  auto w = weights(dia, {1, 1, 1, 2});
  CHECK(load_weights(dia, save_weights(dia, w)) == w);
  CHECK_THROWS_AS(load_weights(dia, "[{\"tail\": \"s\", \"head\": \"a\", \"weight\": 1}]"), Error);
  auto text = export_forest(dia, routing_from_weights(dia, w));
  CHECK(text.find("\"paths\"") != std::string::npos);
  CHECK(text.find("\"trees\"") != std::string::npos);
}

TEST_CASE("path counts agree with enumeration; forests satisfy shortest-path properties") {
  std::mt19937_64 rng(3);
  int unique_seen = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    auto inst = small_random(seed, 6, 3);
    auto w = random_weights(inst, rng);
    for (NodeIndex s = 0; s < inst.nodes.size(); ++s) {
      auto pl = shortest_path_lengths(inst, w, s);
      CHECK(pl.length[s] == 0);
      for (LinkIndex l = 0; l < inst.links.size(); ++l) {
        auto li = pl.length[inst.links[l].tail], lj = pl.length[inst.links[l].head];
        if (li) CHECK(*lj <= *li + w.units(l));
      }
      for (NodeIndex t = 0; t < inst.nodes.size(); ++t)
        if (t != s && pl.length[t]) CHECK(count_shortest_paths(inst, w, s, t) == enumerate_count(inst, w, s, t));
    }
    auto outcome = route_demands(inst, w);
    if (outcome.status != RoutingStatus::Unique) continue;
    ++unique_seen;
    CHECK(forest_violations(inst, outcome.forest).empty());
    for (const auto& tree : outcome.forest.trees) {
      auto pl = shortest_path_lengths(inst, w, tree.origin);
      for (LinkIndex l = 0; l < inst.links.size(); ++l)
        if (tree.used[l])
          CHECK(*pl.length[inst.links[l].head] == *pl.length[inst.links[l].tail] + w.units(l));
    }
    auto x = origin_to_demand(inst, outcome.forest);
    CHECK(subpath_optimality_check(inst, x).empty());
    double by_hops = 0;
    for (DemandIndex k = 0; k < inst.demands.size(); ++k)
      by_hops += inst.demands[k].bandwidth *
                 static_cast<double>(trace_demand_path(inst, outcome.forest, k).size() - 1);
    CHECK(evaluate_objective(inst, outcome.forest) == by_hops);
  }
  CHECK(unique_seen > 50);
}
