#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "helpers.hpp"
#include "usp/cli.hpp"

using namespace usp;
using namespace usp::test;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "usp_cli_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::string write_instance(const std::string& name, const Instance& inst) {
  auto p = temp_path(name);
  write_text_file(p, save_instance(inst));
  return p;
}

bool has(const std::string& text, const std::string& part) {
  return text.find(part) != std::string::npos;
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"solve"}).code == kExitUsage);
  CHECK(run({"solve", "/nonexistent/file.json"}).code == kExitUsage);
}

TEST_CASE("help lists defaults") {
  auto r = run({"solve", "--help"});
  CHECK(r.code == kExitOk);
  CHECK(has(r.out, "600"));
  CHECK(has(r.out, "1000000"));
  CHECK(has(r.out, "exact"));
  auto g = run({"generate", "--help"});
  CHECK(has(g.out, "--seed"));
}

TEST_CASE("generate") {
  auto a = temp_path("gen_a.json"), b = temp_path("gen_b.json");
  auto r = run({"generate", "--nodes", "6", "--degree", "2", "--demands", "4", "--seed", "1", "-o", a});
  CHECK(r.code == kExitOk);
  CHECK(has(r.out, "nodes=6 links=12 demands=4"));
  run({"generate", "--nodes", "6", "--degree", "2", "--demands", "4", "--seed", "1", "-o", b});
  CHECK(read_text_file(a) == read_text_file(b));
  CHECK(run({"generate", "--nodes", "3", "--demands", "99", "-o", a}).code != kExitOk);
  CHECK(run({"validate", a}).code == kExitOk);
}

TEST_CASE("validate reports violations") {
  auto text = save_instance(two_node());
  text.replace(text.find("10.0"), 4, "-3");
  auto p = temp_path("neg.json");
  write_text_file(p, text);
  auto r = run({"validate", p});
  CHECK(r.code == kExitFailed);
  CHECK(has(r.out, "negative capacity"));
}

TEST_CASE("solve and verify") {
  auto inst = write_instance("diamond.json", diamond());
  auto sol = temp_path("diamond_sol.json");
  auto r = run({"solve", inst, "-o", sol});
  CHECK(r.code == kExitOk);
  CHECK(has(r.out, "Optimal objective=2"));
  auto o = run({"solve", "--oracle", inst});
  CHECK(has(o.out, "Optimal objective=2"));
  CHECK(run({"solve", inst, "--cuts", "hint"}).code == kExitOk);

  auto v = run({"verify", inst, sol});
  CHECK(v.code == kExitOk);
  CHECK(has(v.out, "(s,t): s "));
  CHECK(has(v.out, "capacity: ok"));

  auto t0 = run({"solve", inst, "--time-limit", "0"});
  CHECK(t0.code == kExitLimit);
  CHECK(has(t0.out, "BoundsExhausted"));

  auto flat = write_instance("flat.json", diamond(1, 1));
  auto f = run({"solve", flat});
  CHECK(f.code == kExitFailed);
  CHECK(has(f.out, "Infeasible"));

  auto ones = temp_path("ones.json");
  auto dia = diamond();
  write_text_file(ones, save_weights(dia, WeightVector::uniform(dia, 1)));
  auto nu = run({"verify", inst, ones});
  CHECK(nu.code == kExitFailed);
  CHECK(has(nu.out, "non-unique: demand (s,t)"));

  auto tight = write_instance("tight.json", make({"a", "b", "c"}, {{"a", "b", 10}, {"b", "c", 2}},
                                                 {{"a", "c", 3}}));
  auto tw = temp_path("tight_w.json");
  auto ti = make({"a", "b", "c"}, {{"a", "b", 10}, {"b", "c", 2}}, {{"a", "c", 3}});
  write_text_file(tw, save_weights(ti, WeightVector::uniform(ti, 1)));
  auto cv = run({"verify", tight, tw});
  CHECK(cv.code == kExitFailed);
  CHECK(has(cv.out, "capacity violations"));
  CHECK(has(cv.out, "(b,c)"));
}

TEST_CASE("export") {
  auto r = run({"export", USP_FIXTURES "/two_node.json", "--formulation", "dbm"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == read_text_file(USP_FIXTURES "/two_node_dbm.lp"));
  auto m = run({"export", USP_FIXTURES "/two_node.json", "--formulation", "obm", "--master"});
  CHECK(m.code == kExitOk);
  CHECK(has(m.out, "pu_0_1"));
  CHECK_FALSE(has(m.out, "pl"));
  CHECK(run({"export", USP_FIXTURES "/two_node.json", "--formulation", "mps"}).code == kExitUsage);
}

TEST_CASE("report") {
  auto r = run({"report", "--dims", "50,642,1000,50"});
  CHECK(r.code == kExitOk);
  CHECK(has(r.out, "32,100"));
  CHECK(has(r.out, "2,500"));
  CHECK(has(r.out, "642,000"));
  CHECK(has(r.out, "50,642"));
  auto z = run({"report", "--dims", "0,0,0,0", "--format", "tsv"});
  CHECK(z.code == kExitOk);
  CHECK(run({"report", "--dims", "1,2"}).code == kExitUsage);

  auto inst = write_instance("report_diamond.json", diamond());
  auto d = run({"report", inst});
  CHECK(d.code == kExitOk);
  CHECK(has(d.out, "hop-count"));
  CHECK(has(d.out, "inv-cap"));
  CHECK(has(d.out, "solver"));
  CHECK(has(d.out, "max_utilization"));
  CHECK(has(d.out, "not reproducible"));
}
