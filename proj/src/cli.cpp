#include "usp/cli.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "usp/model.hpp"
#include "usp/routing.hpp"
#include "usp/solver.hpp"

namespace usp {

namespace {

using Table = std::vector<std::vector<std::string>>;

std::string num(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

void print_table(std::ostream& out, const Table& rows, bool tsv) {
  if (rows.empty()) return;
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (tsv) {
        line += (c ? "\t" : "") + r[c];
      } else {
        line += r[c];
        if (c + 1 < r.size()) line += std::string(width[c] - r[c].size() + 2, ' ');
      }
    }
    out << line << "\n";
  }
}

std::string dims_line(const Instance& inst) {
  auto d = inst.dims();
  return "nodes=" + std::to_string(d.n_nodes) + " links=" + std::to_string(d.n_links) +
         " demands=" + std::to_string(d.n_demands) + " origins=" + std::to_string(d.n_origins);
}

std::string path_text(const Instance& inst, const std::vector<NodeIndex>& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? " " : "") + inst.nodes[p[i]];
  return s;
}

void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    out << text;
  else
    write_text_file(path, text);
}

struct Constants {
  double eps = 0.0;
  double big_M = 0.0;
};

ModelConstants resolve(const Instance& inst, const Constants& c) {
  ModelConstants m = default_constants(inst);
  if (c.eps > 0) m.eps = c.eps;
  if (c.big_M > 0) m.big_M = c.big_M;
  require_valid_constants(inst, m);
  return m;
}

void add_constants(CLI::App* cmd, Constants& c) {
  cmd->add_option("--eps", c.eps, "Strictness constant; 0 = one weight grid step")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--big-m", c.big_M, "Big-M constant; 0 = |N| * w_max")
      ->check(CLI::NonNegativeNumber);
}

int cmd_verify(const Instance& inst, const WeightVector& w, std::ostream& out) {
  auto outcome = route_demands(inst, w);
  if (outcome.status == RoutingStatus::NonUnique) {
    out << "non-unique: demand " << inst.demand_label(outcome.demand) << "\n";
    return kExitFailed;
  }
  if (outcome.status == RoutingStatus::Unreachable) {
    out << "unreachable: demand " << inst.demand_label(outcome.demand) << "\n";
    return kExitFailed;
  }
  const auto& forest = outcome.forest;
  for (DemandIndex k = 0; k < inst.demands.size(); ++k)
    out << inst.demand_label(k) << ": " << path_text(inst, trace_demand_path(inst, forest, k))
        << "\n";
  auto over = check_capacity(inst, forest);
  out << "objective=" << num(evaluate_objective(inst, forest));
  bool zero_cap_loaded = false;
  try {
    out << " max_utilization=" << num(max_utilization(inst, forest)) << "\n";
  } catch (const Error&) {
    zero_cap_loaded = true;
    out << " max_utilization=inf\n";
  }
  if (over.empty() && !zero_cap_loaded) {
    out << "capacity: ok\n";
    return kExitOk;
  }
  out << "capacity violations:\n";
  Table t{{"link", "load", "capacity", "excess"}};
  for (const auto& v : over)
    t.push_back({inst.link_label(v.link), num(v.load), num(v.capacity), num(v.excess)});
  print_table(out, t, false);
  return kExitFailed;
}

void baseline_table(const Instance& inst, const Solution& sol, std::ostream& out, bool tsv) {
  Table t{{"method", "status", "objective", "max_utilization"}};
  auto row = [&](const std::string& name, const std::optional<WeightVector>& w) {
    if (!w) {
      t.push_back({name, "unavailable", "-", "-"});
      return;
    }
    auto outcome = route_demands(inst, *w);
    if (outcome.status != RoutingStatus::Unique) {
      t.push_back({name, outcome.status == RoutingStatus::NonUnique ? "non-unique" : "unreachable",
                   "-", "-"});
      return;
    }
    const bool fits = check_capacity(inst, outcome.forest).empty();
    std::string util = "inf";
    try {
      util = num(max_utilization(inst, outcome.forest));
    } catch (const Error&) {
    }
    t.push_back({name, fits ? "feasible" : "over capacity",
                 num(evaluate_objective(inst, outcome.forest)), util});
  };
  row("hop-count", hop_count_weights(inst));
  std::optional<WeightVector> inv;
  try {
    inv = inv_cap_weights(inst);
  } catch (const Error&) {
  }
  row("inv-cap", inv);
  if (sol.status == SolveStatus::Optimal)
    row("solver", sol.weights);
  else
    t.push_back({"solver", to_string(sol.status), "-", "-"});
  print_table(out, t, tsv);
  if (!tsv)
    out << "note: utilization ratios depend on the instance set; figures from other "
           "studies are not reproducible here\n";
}

std::optional<InstanceDims> parse_dims(const std::string& text) {
  std::vector<std::uint64_t> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoull(part, &used));
      if (used != part.size()) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  if (v.size() != 4) return std::nullopt;
  return InstanceDims{v[0], v[1], v[2], v[3]};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unique shortest path routing toolkit", "usp"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  // generate
  GeneratorParams gen;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Write a random instance");
  generate->add_option("--nodes", gen.n_nodes, "Number of nodes")->check(CLI::PositiveNumber);
  generate->add_option("--degree", gen.avg_out_degree, "Average out-degree")
      ->check(CLI::PositiveNumber);
  generate->add_option("--demands", gen.n_demands, "Number of demands");
  generate->add_option("--cap-min", gen.capacity_range.first, "Smallest capacity");
  generate->add_option("--cap-max", gen.capacity_range.second, "Largest capacity");
  generate->add_option("--bw-min", gen.demand_range.first, "Smallest bandwidth");
  generate->add_option("--bw-max", gen.demand_range.second, "Largest bandwidth");
  generate->add_option("--w-min", gen.w_min, "Lower weight bound");
  generate->add_option("--w-max", gen.w_max, "Upper weight bound");
  generate->add_option("--step", gen.weight_resolution, "Weight grid step");
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_option("-o,--output", gen_out, "Output file ('-' = stdout)");

  // validate
  std::string val_in;
  auto* validate = app.add_subcommand("validate", "Check an instance file");
  validate->add_option("instance", val_in, "Instance file")->required();

  // solve
  std::string sol_in, sol_out, cut_mode = "exact";
  bool oracle = false;
  BendersConfig bcfg;
  std::uint64_t grid_limit = 10000000;
  Constants sol_c;
  auto* solve = app.add_subcommand("solve", "Find optimal link weights");
  solve->add_option("instance", sol_in, "Instance file")->required();
  solve->add_option("-o,--output", sol_out, "Solution file");
  solve->add_flag("--oracle", oracle, "Use exhaustive grid search instead of decomposition");
  solve->add_option("--node-limit", bcfg.node_limit, "Master search node limit (0 = none)");
  solve->add_option("--time-limit", bcfg.time_limit, "Time limit in seconds")
      ->check(CLI::NonNegativeNumber);
  solve->add_option("--cuts", cut_mode, "No-good cut form")
      ->check(CLI::IsMember({"exact", "origin", "hint"}));
  solve->add_option("--grid-limit", grid_limit, "Largest weight grid the oracle enumerates");
  add_constants(solve, sol_c);

  // verify
  std::string ver_in, ver_w;
  auto* verify = app.add_subcommand("verify", "Check weights against an instance");
  verify->add_option("instance", ver_in, "Instance file")->required();
  verify->add_option("weights", ver_w, "Weights or solution file")->required();

  // export
  std::string exp_in, exp_out, formulation = "dbm";
  bool master_only = false;
  Constants exp_c;
  auto* exprt = app.add_subcommand("export", "Write a model in LP format");
  exprt->add_option("instance", exp_in, "Instance file")->required();
  exprt->add_option("--formulation", formulation, "Model")
      ->check(CLI::IsMember({"dbm", "obm"}));
  exprt->add_flag("--master", master_only, "Master-problem rows and variables only");
  exprt->add_option("-o,--output", exp_out, "Output file ('-' = stdout)");
  add_constants(exprt, exp_c);

  // report
  std::string rep_in, rep_dims, rep_format = "text";
  Constants rep_c;
  auto* report = app.add_subcommand("report", "Model sizes, structure and baselines");
  report->add_option("instance", rep_in, "Instance file");
  report->add_option("--dims", rep_dims, "Sizes only for N,L,D,S");
  report->add_option("--format", rep_format, "Output format")
      ->check(CLI::IsMember({"text", "tsv"}));
  add_constants(report, rep_c);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) {
      Instance inst = generate_random_instance(gen);
      emit(out, gen_out, save_instance(inst));
      (gen_out.empty() || gen_out == "-" ? err : out) << dims_line(inst) << "\n";
      return kExitOk;
    }

    if (*validate) {
      Instance inst;
      try {
        inst = read_instance_file(val_in);
      } catch (const InvalidInstance& e) {
        for (const auto& v : e.report())
          out << v.location << ": " << v.message << "\n";
        return kExitFailed;
      }
      out << "valid: " << dims_line(inst) << "\n";
      return kExitOk;
    }

    if (*solve) {
      Instance inst = read_instance_file(sol_in);
      Solution sol;
      if (oracle) {
        try {
          sol = brute_force_solve(inst, grid_limit);
        } catch (const ResourceLimit& e) {
          err << e.what() << "\n";
          return kExitLimit;
        }
      } else {
        ModelConstants mc = resolve(inst, sol_c);
        bcfg.eps = mc.eps;
        bcfg.big_M = mc.big_M;
        bcfg.cut_mode = parse_cut_mode(cut_mode);
        sol = benders_solve(inst, bcfg);
      }
      out << to_string(sol.status);
      if (sol.weights) {
        out << " objective=" << num(sol.objective)
            << " max_utilization=" << num(max_utilization(inst, sol.forest));
      }
      out << " iterations=" << sol.diagnostics.iterations << " cuts=" << sol.diagnostics.cuts
          << "\n";
      if (!sol_out.empty()) emit(out, sol_out, export_solution(inst, sol));
      switch (sol.status) {
        case SolveStatus::Optimal: return kExitOk;
        case SolveStatus::Infeasible: return kExitFailed;
        case SolveStatus::BoundsExhausted: return kExitLimit;
      }
    }

    if (*verify) {
      Instance inst = read_instance_file(ver_in);
      WeightVector w = load_weights(inst, read_text_file(ver_w));
      return cmd_verify(inst, w, out);
    }

    if (*exprt) {
      Instance inst = read_instance_file(exp_in);
      ModelConstants mc = resolve(inst, exp_c);
      ModelScope scope = master_only ? ModelScope::Master : ModelScope::Full;
      LinearModel m = formulation == "dbm" ? build_dbm(inst, mc, scope) : build_obm(inst, mc, scope);
      emit(out, exp_out, export_lp(m));
      return kExitOk;
    }

    if (*report) {
      const bool tsv = rep_format == "tsv";
      if (!rep_dims.empty()) {
        auto dims = parse_dims(rep_dims);
        if (!dims) {
          err << "--dims expects four comma-separated counts N,L,D,S\n";
          return kExitUsage;
        }
        out << format_size_report(size_report(*dims), tsv);
        return kExitOk;
      }
      if (rep_in.empty()) {
        err << "report needs an instance file or --dims\n";
        return kExitUsage;
      }
      Instance inst = read_instance_file(rep_in);
      ModelConstants mc = resolve(inst, rep_c);
      out << format_size_report(size_report(inst.dims()), tsv) << "\n";
      for (auto* build : {&build_dbm, &build_obm}) {
        LinearModel m = (*build)(inst, mc, ModelScope::Full);
        out << format_structure_report(m, structure_report(m), tsv) << "\n";
      }
      BendersConfig cfg;
      cfg.eps = mc.eps;
      cfg.big_M = mc.big_M;
      baseline_table(inst, benders_solve(inst, cfg), out, tsv);
      return kExitOk;
    }
  } catch (const ResourceLimit& e) {
    err << e.what() << "\n";
    return kExitLimit;
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidInstance& e) {
    err << "invalid instance:\n";
    for (const auto& v : e.report()) err << "  " << v.location << ": " << v.message << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace usp
