#include <doctest.h>

#include "helpers.hpp"
#include "usp/lp.hpp"
#include "usp/solver.hpp"

using namespace usp;
using namespace usp::test;

TEST_CASE("tiny feasibility systems") {
  LinearSystem a;
  auto x = a.add_variable("x", Rational(0), Rational(1));
  a.add_row("r", {{x, Rational(1)}}, Sense::GreaterEqual, Rational(2));
  CHECK(std::holds_alternative<Infeasible>(solve_feasibility(a)));

  LinearSystem b;
  auto bx = b.add_variable("x", Rational(1), Rational(10));
  auto by = b.add_variable("y", Rational(1), Rational(10));
  b.add_row("r", {{bx, Rational(1)}, {by, Rational(1)}}, Sense::LessEqual, Rational(3));
  auto res = solve_feasibility(b);
  REQUIRE(std::holds_alternative<Feasible>(res));
  CHECK(unsatisfied_rows(b, std::get<Feasible>(res).values).empty());

  LinearSystem free;
  auto fz = free.add_variable("z", std::nullopt, std::nullopt);
  free.add_row("r", {{fz, Rational(1)}}, Sense::Equal, Rational(-7, 3));
  auto fr = solve_feasibility(free);
  REQUIRE(std::holds_alternative<Feasible>(fr));
  CHECK(std::get<Feasible>(fr).values[fz] == Rational(-7, 3));
}

TEST_CASE("optimization") {
  LinearSystem s;
  auto x = s.add_variable("x", Rational(0), std::nullopt);
  auto y = s.add_variable("y", Rational(0), std::nullopt);
  s.add_row("a", {{x, Rational(1)}, {y, Rational(2)}}, Sense::LessEqual, Rational(4));
  s.add_row("b", {{x, Rational(3)}, {y, Rational(1)}}, Sense::LessEqual, Rational(6));
  s.objective = {{x, Rational(1)}, {y, Rational(1)}};
  auto sol = optimize(s);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == Rational(14, 5));

  s.rows.pop_back();
  s.rows.pop_back();
  CHECK(optimize(s).status == LpStatus::Unbounded);
}

TEST_CASE("infeasibility hint is an irreducible subset") {
  LinearSystem s;
  auto x = s.add_variable("x", Rational(0), std::nullopt);
  auto y = s.add_variable("y", Rational(0), std::nullopt);
  s.add_row("spare", {{y, Rational(1)}}, Sense::LessEqual, Rational(5));
  s.add_row("low", {{x, Rational(1)}}, Sense::GreaterEqual, Rational(3));
  s.add_row("other", {{x, Rational(1)}, {y, Rational(1)}}, Sense::LessEqual, Rational(100));
  s.add_row("high", {{x, Rational(1)}}, Sense::LessEqual, Rational(2));
  auto res = solve_feasibility(s, true);
  REQUIRE(std::holds_alternative<Infeasible>(res));
  CHECK(std::get<Infeasible>(res).hint == std::vector<std::string>{"low", "high"});
}

TEST_CASE("recovering weights for the diamond") {
  auto dia = diamond();
  auto upper = forest_from_paths(dia, {nodes_of(dia, {"s", "a", "t"})});
  auto rec = recover_weights(dia, upper, default_constants(dia));
  REQUIRE(rec.status == RecoveryStatus::Recovered);
  CHECK(routing_from_weights(dia, *rec.weights) == upper);

  auto half = recover_weights(dia, upper, {0.5, 40});
  REQUIRE(half.status == RecoveryStatus::Recovered);
  CHECK(routing_from_weights(dia, *half.weights) == upper);

  auto margin = maximize_margin(dia, upper, default_constants(dia));
  REQUIRE(margin.feasible);
  CHECK(margin.margin >= 1);
  REQUIRE(margin.snapped);
  CHECK(routing_from_weights(dia, *margin.snapped) == upper);
}

TEST_CASE("fixed uniform weights cannot separate the diamond paths") {
  auto dia = diamond(2, 2);
  auto upper = forest_from_paths(dia, {nodes_of(dia, {"s", "a", "t"})});
  auto rec = recover_weights(dia, upper, default_constants(dia), {true});
  CHECK(rec.status == RecoveryStatus::Infeasible);
  CHECK_FALSE(rec.hint.empty());
  CHECK_FALSE(maximize_margin(dia, upper, default_constants(dia)).feasible);
}

TEST_CASE("single link forest") {
  auto two = two_node();
  auto f = forest_from_paths(two, {{0, 1}});
  auto rec = recover_weights(two, f, default_constants(two));
  REQUIRE(rec.status == RecoveryStatus::Recovered);
  CHECK(rec.stage == 1);
}

TEST_CASE("forests without sub-path optimality are infeasible") {
  // Two demands from s reach m by different links.
  auto inst = make({"s", "a", "b", "m", "t"},
                   {{"s", "a", 9}, {"s", "b", 9}, {"a", "m", 9}, {"b", "m", 9}, {"m", "t", 9},
                    {"a", "t", 9}},
                   {{"s", "m", 1}, {"s", "t", 1}});
  OriginTree t{0, std::vector<char>(6, 0), std::vector<double>(6, 0.0)};
  for (LinkIndex l : {0, 1, 2, 3, 4}) t.used[l] = 1;
  t.flow = {1, 1, 1, 1, 1, 0};
  RoutingForest bad{{t}};
  CHECK(recover_weights(inst, bad, default_constants(inst)).status == RecoveryStatus::Infeasible);
}

TEST_CASE("recovered weights reproduce every realizable forest") {
  int recovered = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto inst = small_random(seed, 5, 3);
    for (const auto& cand : master_candidates(inst)) {
      auto rec = recover_weights(inst, cand.forest, default_constants(inst));
      if (rec.status != RecoveryStatus::Recovered) continue;
      ++recovered;
      auto outcome = route_demands(inst, *rec.weights);
      REQUIRE(outcome.status == RoutingStatus::Unique);
      CHECK(outcome.forest == cand.forest);
    }
  }
  CHECK(recovered > 60);
}

TEST_CASE("a smaller eps needs the margin stage and can leave no grid point") {
  auto inst = stage_instance(29);
  auto c = default_constants(inst);
  c.eps = 0.5;
  int stage2 = 0, grid_infeasible = 0;
  for (const auto& cand : master_candidates(inst)) {
    auto rec = recover_weights(inst, cand.forest, c);
    if (rec.status == RecoveryStatus::Recovered) {
      stage2 += rec.stage == 2;
      CHECK(routing_from_weights(inst, *rec.weights) == cand.forest);
    }
    if (rec.status != RecoveryStatus::GridInfeasible) continue;
    ++grid_infeasible;
    std::vector<std::int64_t> u(inst.links.size(), inst.w_min_units());
    bool witness = false;
    while (!witness) {
      auto o = route_demands(inst, weights(inst, u));
      witness = o.status == RoutingStatus::Unique && o.forest == cand.forest;
      std::size_t q = u.size();
      while (q > 0 && u[q - 1] == inst.w_max_units()) u[--q] = inst.w_min_units();
      if (q == 0) break;
      ++u[q - 1];
    }
    CHECK_FALSE(witness);
  }
  CHECK(stage2 > 0);
  CHECK(grid_infeasible > 0);
}
