#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"

using namespace usp;
using namespace usp::test;

namespace {

bool reports(const ValidationReport& r, const std::string& msg) {
  return std::any_of(r.begin(), r.end(), [&](const Violation& v) { return v.message == msg; });
}

}  // namespace

TEST_CASE("minimal instance is valid") {
  CHECK(validate_instance(two_node()).empty());
}

TEST_CASE("validation catches each broken invariant") {
  auto inst = two_node();
  inst.demands[0].destination = inst.demands[0].origin;
  CHECK(reports(validate_instance(inst), "origin equals destination"));

  inst = two_node();
  inst.demands.push_back(inst.demands[0]);
  CHECK(reports(validate_instance(inst), "duplicate OD pair"));

  inst = two_node();
  inst.links.push_back({0, 0, 1});
  CHECK(reports(validate_instance(inst), "self-loop link"));

  inst = two_node();
  inst.links.push_back(inst.links[0]);
  CHECK(reports(validate_instance(inst), "duplicate link"));

  inst = two_node();
  inst.links[0].capacity = -3;
  CHECK(reports(validate_instance(inst), "negative capacity"));

  inst = two_node();
  inst.demands[0].bandwidth = 0;
  CHECK(reports(validate_instance(inst), "non-positive bandwidth"));

  inst = two_node();
  inst.nodes.push_back("a");
  CHECK(reports(validate_instance(inst), "duplicate node id"));

  inst = two_node();
  inst.w_min = 5;
  inst.w_max = 2;
  CHECK(reports(validate_instance(inst), "w_min exceeds w_max"));

  inst = two_node();
  inst.w_max = 2.5;
  CHECK(reports(validate_instance(inst), "w_max is not on the weight grid"));

  inst = two_node();
  inst.demands[0] = {1, 0, 1};
  CHECK(reports(validate_instance(inst), "destination unreachable from origin"));
}

TEST_CASE("derived sets follow the demand list") {
  auto inst = make({"a", "b", "c"}, {{"a", "b", 1}, {"b", "c", 1}, {"c", "a", 1}},
                   {{"c", "a", 1}, {"a", "b", 2}, {"a", "c", 3}});
  CHECK(inst.origins() == std::vector<NodeIndex>{0, 2});
  CHECK(inst.demands_from(0) == std::vector<DemandIndex>{1, 2});
  CHECK(inst.destinations_from(0) == std::vector<NodeIndex>{1, 2});
  CHECK(inst.origin_demand(0) == 5);
  CHECK(inst.dims() == InstanceDims{3, 3, 3, 2});
  inst.demands.pop_back();
  CHECK(inst.origin_demand(0) == 2);
}

TEST_CASE("grid units") {
  CHECK(to_grid_units(3.0, 0.5) == 6);
  CHECK(to_grid_units(0.3, 0.1) == 3);
  CHECK_FALSE(to_grid_units(0.25, 0.1));
  auto inst = two_node();
  inst.weight_resolution = 0.5;
  CHECK(inst.w_max_units() == 20);
}

TEST_CASE("generator is deterministic and honors the counts") {
  GeneratorParams p;
  p.seed = 7;
  CHECK(generate_random_instance(p) == generate_random_instance(p));
  auto inst = generate_random_instance(p);
  CHECK(inst.dims() == InstanceDims{4, 8, 3, inst.origins().size()});
  CHECK(validate_instance(inst).empty());

  p.seed = 8;
  CHECK_FALSE(generate_random_instance(p) == inst);

  p.n_nodes = 2;
  CHECK_THROWS_AS(generate_random_instance(p), GenerationInfeasible);
}

TEST_CASE("generator at reference scale") {
  GeneratorParams p;
  p.n_nodes = 50;
  p.avg_out_degree = 12.84;
  p.n_demands = 1000;
  auto inst = generate_random_instance(p);
  auto d = inst.dims();
  CHECK(d.n_nodes == 50);
  CHECK(d.n_links == 642);
  CHECK(d.n_demands == 1000);
  CHECK(d.n_origins <= 50);
}

TEST_CASE("save and load round trip") {
  auto inst = two_node();
  CHECK(load_instance(save_instance(inst)) == inst);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto g = small_random(seed, 8, 5);
    CHECK(load_instance(save_instance(g)) == g);
  }
}

TEST_CASE("load reports missing fields, syntax errors and invalid data") {
  const std::string ok = save_instance(two_node());
  std::string text = ok;
  auto pos = text.find("\"w_min\"");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 7, "\"w_low\"");
  try {
    load_instance(text);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.field() == "w_min");
  }

  try {
    load_instance("{\n  \"nodes\": [\n  ,\n]}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }

  text = ok;
  pos = text.find("10.0");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 4, "-3");
  CHECK_THROWS_AS(load_instance(text), InvalidInstance);

  try {
    load_instance("{\"nodes\": [\"a\"], \"links\": [{\"tail\": \"a\", \"head\": \"z\", "
                  "\"capacity\": 1}], \"demands\": [], \"w_min\": 1, \"w_max\": 1, "
                  "\"weight_resolution\": 1}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.field() == "links[0].head");
  }
}
