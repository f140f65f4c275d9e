#include "usp/model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace usp {

const char* to_string(Formulation f) {
  return f == Formulation::DBM ? "DBM" : "OBM";
}

const char* to_string(Sense s) {
  switch (s) {
    case Sense::LessEqual: return "<=";
    case Sense::Equal: return "=";
    case Sense::GreaterEqual: return ">=";
  }
  return "?";
}

const char* to_string(Family f) {
  switch (f) {
    case Family::Route: return "routing";
    case Family::Flow: return "flow";
    case Family::Weight: return "weight";
    case Family::Length: return "length";
    case Family::Conservation: return "flow-conservation";
    case Family::Capacity: return "link-capacity";
    case Family::FlowBound: return "flow-bound";
    case Family::Uniqueness: return "path-uniqueness";
    case Family::PathLength: return "path-length";
  }
  return "?";
}

const char* to_string(LengthRelation r) {
  switch (r) {
    case LengthRelation::AtMost: return "l_j <= l_i + w_ij";
    case LengthRelation::Strictly: return "l_j < l_i + w_ij";
    case LengthRelation::Equal: return "l_j = l_i + w_ij";
  }
  return "?";
}

std::optional<std::size_t> LinearModel::find_variable(const std::string& name) const {
  for (std::size_t v = 0; v < variables.size(); ++v)
    if (variables[v].name == name) return v;
  return std::nullopt;
}

std::size_t LinearModel::count_variables(Family f) const {
  return static_cast<std::size_t>(std::count_if(
      variables.begin(), variables.end(), [f](const auto& v) { return v.family == f; }));
}

std::size_t LinearModel::count_constraints(Family f) const {
  return static_cast<std::size_t>(std::count_if(
      constraints.begin(), constraints.end(), [f](const auto& c) { return c.family == f; }));
}

ModelConstants default_constants(const Instance& instance) {
  return {instance.weight_resolution,
          static_cast<double>(instance.nodes.size()) * instance.w_max};
}

void require_valid_constants(const Instance& instance, const ModelConstants& c) {
  if (!(c.eps > 0.0) || c.eps > instance.weight_resolution)
    throw std::invalid_argument("eps must satisfy 0 < eps <= weight_resolution");
  double min_m = static_cast<double>(instance.nodes.size()) * instance.w_max;
  if (!(c.big_M >= min_m))
    throw std::invalid_argument("big_M must be at least |N| * w_max");
}

namespace {

std::string idx(std::size_t i) { return std::to_string(i); }

class ModelWriter {
 public:
  explicit ModelWriter(LinearModel& m) : m_(m) {}

  std::size_t var(std::string name, VarKind kind, double lo, double hi, Family f) {
    m_.variables.push_back({std::move(name), kind, lo, hi, f});
    return m_.variables.size() - 1;
  }

  void row(std::string name, std::vector<Term> terms, Sense sense, double rhs, Family f) {
    // Merge duplicate variables and drop zero coefficients.
    std::vector<Term> merged;
    for (const auto& t : terms) {
      auto it = std::find_if(merged.begin(), merged.end(),
                             [&](const Term& x) { return x.var == t.var; });
      if (it == merged.end())
        merged.push_back(t);
      else
        it->coef += t.coef;
    }
    std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
    m_.constraints.push_back({std::move(name), std::move(merged), sense, rhs, f});
  }

 private:
  LinearModel& m_;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

// Weight and length variables shared by both formulations.
struct LengthVars {
  std::vector<std::size_t> w;               // per link
  std::vector<std::vector<std::size_t>> l;  // per origin position, per node
};

LengthVars add_length_vars(ModelWriter& out, const Instance& in,
                           const std::vector<NodeIndex>& origins) {
  LengthVars v;
  for (const auto& e : in.links)
    v.w.push_back(out.var("w_" + idx(e.tail) + "_" + idx(e.head), VarKind::Continuous,
                          in.w_min, in.w_max, Family::Weight));
  for (NodeIndex s : origins) {
    std::vector<std::size_t> row;
    for (NodeIndex i = 0; i < in.nodes.size(); ++i)
      row.push_back(out.var("l_" + idx(s) + "_" + idx(i), VarKind::Continuous, 0.0,
                            i == s ? 0.0 : kInf, Family::Length));
    v.l.push_back(std::move(row));
  }
  return v;
}

// Linearized path-length pair for one (origin or demand, link), where
// `route[l]` is the routing binary of link l for that origin/demand.
void add_path_length_rows(ModelWriter& out, const Instance& in, const Adjacency& adj,
                          const ModelConstants& c, const std::string& tag,
                          const std::vector<std::size_t>& route,
                          const std::vector<std::size_t>& lengths,
                          const std::vector<std::size_t>& weights) {
  for (LinkIndex l = 0; l < in.links.size(); ++l) {
    const NodeIndex i = in.links[l].tail, j = in.links[l].head;
    const std::string suffix = tag + "_" + idx(i) + "_" + idx(j);
    std::vector<Term> upper{{lengths[j], 1.0}, {lengths[i], -1.0}, {weights[l], -1.0}};
    for (LinkIndex h : adj.in(j)) upper.push_back({route[h], c.eps});
    upper.push_back({route[l], -c.eps});
    out.row("plu_" + suffix, std::move(upper), Sense::LessEqual, 0.0, Family::PathLength);
    out.row("pll_" + suffix,
            {{lengths[j], 1.0}, {lengths[i], -1.0}, {weights[l], -1.0}, {route[l], -c.big_M}},
            Sense::GreaterEqual, -c.big_M, Family::PathLength);
  }
}

std::size_t origin_position(const std::vector<NodeIndex>& origins, NodeIndex s) {
  return static_cast<std::size_t>(
      std::lower_bound(origins.begin(), origins.end(), s) - origins.begin());
}

}  // namespace

LinearModel build_dbm(const Instance& in, const ModelConstants& c, ModelScope scope) {
  require_valid_constants(in, c);
  LinearModel m;
  m.formulation = Formulation::DBM;
  m.scope = scope;
  m.eps = c.eps;
  m.big_M = c.big_M;
  ModelWriter out(m);
  Adjacency adj(in);
  const auto origins = in.origins();
  const std::size_t D = in.demands.size(), L = in.links.size();

  std::vector<std::vector<std::size_t>> x(D);
  for (DemandIndex k = 0; k < D; ++k)
    for (const auto& e : in.links)
      x[k].push_back(out.var("x_" + idx(k) + "_" + idx(e.tail) + "_" + idx(e.head),
                             VarKind::Binary, 0.0, 1.0, Family::Route));
  LengthVars lv;
  if (scope == ModelScope::Full) lv = add_length_vars(out, in, origins);

  for (LinkIndex l = 0; l < L; ++l) {
    std::vector<Term> t;
    for (DemandIndex k = 0; k < D; ++k) t.push_back({x[k][l], in.demands[k].bandwidth});
    out.row("cap_" + idx(in.links[l].tail) + "_" + idx(in.links[l].head), std::move(t),
            Sense::LessEqual, in.links[l].capacity, Family::Capacity);
  }
  for (DemandIndex k = 0; k < D; ++k) {
    const auto& d = in.demands[k];
    for (NodeIndex i = 0; i < in.nodes.size(); ++i) {
      std::vector<Term> t;
      for (LinkIndex l : adj.in(i)) t.push_back({x[k][l], 1.0});
      for (LinkIndex l : adj.out(i)) t.push_back({x[k][l], -1.0});
      double rhs = i == d.origin ? -1.0 : i == d.destination ? 1.0 : 0.0;
      out.row("fc_" + idx(k) + "_" + idx(i), std::move(t), Sense::Equal, rhs,
              Family::Conservation);
    }
  }
  if (scope == ModelScope::Full) {
    for (DemandIndex k = 0; k < D; ++k) {
      auto pos = origin_position(origins, in.demands[k].origin);
      add_path_length_rows(out, in, adj, c, idx(k), x[k], lv.l[pos], lv.w);
    }
  }
  for (DemandIndex k = 0; k < D; ++k)
    for (LinkIndex l = 0; l < L; ++l) m.objective.push_back({x[k][l], in.demands[k].bandwidth});
  return m;
}

LinearModel build_obm(const Instance& in, const ModelConstants& c, ModelScope scope) {
  require_valid_constants(in, c);
  LinearModel m;
  m.formulation = Formulation::OBM;
  m.scope = scope;
  m.eps = c.eps;
  m.big_M = c.big_M;
  ModelWriter out(m);
  Adjacency adj(in);
  const auto origins = in.origins();
  const std::size_t S = origins.size(), L = in.links.size();
  const bool full = scope == ModelScope::Full;

  auto link_tag = [&](NodeIndex s, LinkIndex l) {
    return idx(s) + "_" + idx(in.links[l].tail) + "_" + idx(in.links[l].head);
  };
  std::vector<std::vector<std::size_t>> y(S), f(S);
  for (std::size_t p = 0; p < S; ++p)
    for (LinkIndex l = 0; l < L; ++l)
      y[p].push_back(out.var("y_" + link_tag(origins[p], l), VarKind::Binary, 0.0, 1.0,
                             Family::Route));
  if (full)
    for (std::size_t p = 0; p < S; ++p)
      for (LinkIndex l = 0; l < L; ++l)
        f[p].push_back(out.var("f_" + link_tag(origins[p], l), VarKind::Continuous, 0.0,
                               kInf, Family::Flow));
  LengthVars lv;
  if (full) lv = add_length_vars(out, in, origins);

  for (std::size_t p = 0; p < S; ++p) {
    const NodeIndex s = origins[p];
    const auto dests = in.destinations_from(s);
    for (NodeIndex i = 0; i < in.nodes.size(); ++i) {
      std::vector<Term> t;
      for (LinkIndex l : adj.in(i)) t.push_back({y[p][l], 1.0});
      bool is_dest = std::find(dests.begin(), dests.end(), i) != dests.end();
      Sense sense = (i == s || is_dest) ? Sense::Equal : Sense::LessEqual;
      double rhs = i == s ? 0.0 : 1.0;
      out.row("pu_" + idx(s) + "_" + idx(i), std::move(t), sense, rhs, Family::Uniqueness);
    }
  }
  if (full) {
    for (std::size_t p = 0; p < S; ++p) {
      const double d_s = in.origin_demand(origins[p]);
      for (LinkIndex l = 0; l < L; ++l)
        out.row("fb_" + link_tag(origins[p], l), {{f[p][l], 1.0}, {y[p][l], -d_s}},
                Sense::LessEqual, 0.0, Family::FlowBound);
    }
    for (std::size_t p = 0; p < S; ++p) {
      const NodeIndex s = origins[p];
      for (NodeIndex i = 0; i < in.nodes.size(); ++i) {
        std::vector<Term> t;
        for (LinkIndex l : adj.in(i)) t.push_back({f[p][l], 1.0});
        for (LinkIndex l : adj.out(i)) t.push_back({f[p][l], -1.0});
        double rhs = 0.0;
        if (i == s) rhs = -in.origin_demand(s);
        for (DemandIndex k : in.demands_from(s))
          if (in.demands[k].destination == i) rhs = in.demands[k].bandwidth;
        out.row("fc_" + idx(s) + "_" + idx(i), std::move(t), Sense::Equal, rhs,
                Family::Conservation);
      }
    }
    for (LinkIndex l = 0; l < L; ++l) {
      std::vector<Term> t;
      for (std::size_t p = 0; p < S; ++p) t.push_back({f[p][l], 1.0});
      out.row("cap_" + idx(in.links[l].tail) + "_" + idx(in.links[l].head), std::move(t),
              Sense::LessEqual, in.links[l].capacity, Family::Capacity);
    }
    for (std::size_t p = 0; p < S; ++p)
      add_path_length_rows(out, in, adj, c, idx(origins[p]), y[p], lv.l[p], lv.w);
    for (LinkIndex l = 0; l < L; ++l)
      for (std::size_t p = 0; p < S; ++p) m.objective.push_back({f[p][l], 1.0});
  }
  return m;
}

std::vector<std::string> model_violations(const LinearModel& model,
                                          const std::map<std::string, double>& values,
                                          const std::vector<Family>& families) {
  std::vector<std::optional<double>> val(model.variables.size());
  for (std::size_t v = 0; v < model.variables.size(); ++v)
    if (auto it = values.find(model.variables[v].name); it != values.end()) val[v] = it->second;

  std::vector<std::string> out;
  for (std::size_t v = 0; v < model.variables.size(); ++v) {
    if (!val[v]) continue;
    const auto& var = model.variables[v];
    if (*val[v] < var.lower - 1e-9 || *val[v] > var.upper + 1e-9)
      out.push_back(var.name + ": outside bounds");
    if (var.kind == VarKind::Binary && *val[v] != 0.0 && *val[v] != 1.0)
      out.push_back(var.name + ": not binary");
  }
  for (const auto& c : model.constraints) {
    if (!families.empty() &&
        std::find(families.begin(), families.end(), c.family) == families.end())
      continue;
    double lhs = 0.0, scale = std::abs(c.rhs);
    bool complete = true;
    for (const auto& t : c.terms) {
      if (!val[t.var]) {
        complete = false;
        break;
      }
      lhs += t.coef * *val[t.var];
      scale = std::max(scale, std::abs(t.coef * *val[t.var]));
    }
    if (!complete) continue;
    const double tol = 1e-9 * std::max(1.0, scale);
    bool ok = c.sense == Sense::LessEqual      ? lhs <= c.rhs + tol
              : c.sense == Sense::GreaterEqual ? lhs >= c.rhs - tol
                                               : std::abs(lhs - c.rhs) <= tol;
    if (!ok) out.push_back(c.name + ": violated");
  }
  return out;
}

namespace {

ModelSize make_size(std::string label, std::vector<FamilyCount> vars,
                    std::vector<FamilyCount> cons) {
  ModelSize m{std::move(label), 0, 0, std::move(vars), std::move(cons)};
  for (const auto& f : m.variable_families) m.variables += f.count;
  for (const auto& f : m.constraint_families) m.constraints += f.count;
  return m;
}

std::string grouped(std::uint64_t v) {
  std::string s = std::to_string(v);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(static_cast<std::size_t>(i), ",");
  return s;
}

}  // namespace

SizeReport size_report(const InstanceDims& d) {
  const std::uint64_t N = d.n_nodes, L = d.n_links, D = d.n_demands, S = d.n_origins;
  SizeReport r;
  r.dims = d;
  r.dbm = make_size("DBM original",
                    {{"x", D * L}, {"w", L}, {"l", S * N}},
                    {{"flow-conservation", D * N}, {"link-capacity", L},
                     {"path-length", 2 * D * L}});
  r.dbm_master = make_size("DBM master", {{"x", D * L}},
                           {{"flow-conservation", D * N}, {"link-capacity", L}});
  r.obm = make_size("OBM original",
                    {{"y", S * L}, {"f", S * L}, {"w", L}, {"l", S * N}},
                    {{"path-uniqueness", S * N}, {"flow-bound", S * L},
                     {"flow-conservation", S * N}, {"link-capacity", L},
                     {"path-length", 2 * S * L}});
  r.obm_master = make_size("OBM master", {{"y", S * L}}, {{"path-uniqueness", S * N}});
  r.obm_routing_flow = make_size(
      "OBM original (routing+flow accounting)", {{"y", S * L}, {"f", S * L}},
      {{"path-uniqueness", S * N}, {"flow-conservation", S * N}, {"flow-bound", S * L},
       {"link-capacity", L}});
  return r;
}

std::string format_size_report(const SizeReport& r, bool tsv) {
  std::ostringstream os;
  const auto& d = r.dims;
  const ModelSize* rows[] = {&r.dbm, &r.dbm_master, &r.obm, &r.obm_routing_flow,
                             &r.obm_master};
  if (tsv) {
    os << "model\tvariables\tconstraints\n";
    for (const auto* m : rows) os << m->label << '\t' << m->variables << '\t' << m->constraints << '\n';
    return os.str();
  }
  os << "dims: |N|=" << d.n_nodes << " |L|=" << d.n_links << " |D|=" << d.n_demands
     << " |S|=" << d.n_origins << "\n";
  os << std::left << std::setw(42) << "model" << std::right << std::setw(14) << "variables"
     << std::setw(14) << "constraints" << "\n";
  for (const auto* m : rows) {
    os << std::left << std::setw(42) << m->label << std::right << std::setw(14)
       << grouped(m->variables) << std::setw(14) << grouped(m->constraints) << "\n";
    std::string vf, cf;
    for (const auto& f : m->variable_families) vf += " " + f.family + "=" + grouped(f.count);
    for (const auto& f : m->constraint_families) cf += " " + f.family + "=" + grouped(f.count);
    os << "    vars:" << vf << "\n    rows:" << cf << "\n";
  }
  if (r.obm.variables != r.obm_routing_flow.variables ||
      r.obm.constraints != r.obm_routing_flow.constraints)
    os << "note: the two OBM original accountings differ; the routing+flow accounting "
          "omits w, l and the path-length rows.\n";
  return os.str();
}

std::vector<FamilyStructure> structure_report(const LinearModel& model) {
  std::vector<FamilyStructure> out;
  for (const auto& c : model.constraints) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const FamilyStructure& f) { return f.rows == c.family; });
    if (it == out.end()) {
      out.push_back({c.family, 0, {}});
      it = out.end() - 1;
    }
    ++it->count;
    for (const auto& t : c.terms) {
      Family vf = model.variables[t.var].family;
      if (std::find(it->touches.begin(), it->touches.end(), vf) == it->touches.end())
        it->touches.push_back(vf);
    }
  }
  for (auto& f : out) std::sort(f.touches.begin(), f.touches.end());
  return out;
}

std::string format_structure_report(const LinearModel& model,
                                    const std::vector<FamilyStructure>& s, bool tsv) {
  std::ostringstream os;
  auto var_tag = [&](Family f) -> std::string {
    switch (f) {
      case Family::Route: return model.formulation == Formulation::DBM ? "x" : "y";
      case Family::Flow: return "f";
      case Family::Weight: return "w";
      case Family::Length: return "l";
      default: return to_string(f);
    }
  };
  if (!tsv) os << to_string(model.formulation) << " constraint structure\n";
  for (const auto& f : s) {
    std::string touches;
    for (Family v : f.touches) touches += (touches.empty() ? "" : ",") + var_tag(v);
    if (tsv)
      os << to_string(model.formulation) << '\t' << to_string(f.rows) << '\t' << f.count
         << '\t' << touches << '\n';
    else
      os << "  " << std::left << std::setw(20) << to_string(f.rows) << std::right
         << std::setw(10) << f.count << " rows  touches {" << touches << "}\n";
  }
  return os.str();
}

LengthRelation logic_relation(int on_link, int into_head) {
  if ((on_link != 0 && on_link != 1) || (into_head != 0 && into_head != 1) ||
      on_link > into_head)
    throw std::invalid_argument("inconsistent routing binaries: on_link=" +
                                std::to_string(on_link) +
                                ", into_head=" + std::to_string(into_head));
  if (on_link == 1) return LengthRelation::Equal;
  return into_head == 1 ? LengthRelation::Strictly : LengthRelation::AtMost;
}

LinearizationCheck linearization_check(int on_link, int into_head,
                                       const LinearizationDomain& dom) {
  LinearizationCheck r;
  r.relation = logic_relation(on_link, into_head);
  if (dom.eps <= 0 || dom.n_nodes < 1 || dom.w_min > dom.w_max)
    throw std::invalid_argument("invalid linearization domain");

  // Scale by the common denominator so the sweep runs in exact integers.
  mpz_class q;
  mpz_lcm(q.get_mpz_t(), dom.eps.get_den_mpz_t(), dom.big_M.get_den_mpz_t());
  mpz_class eps_q = dom.eps.get_num() * (q / dom.eps.get_den());
  mpz_class m_q = dom.big_M.get_num() * (q / dom.big_M.get_den());
  if (!q.fits_slong_p() || !eps_q.fits_slong_p() || !m_q.fits_slong_p())
    throw std::invalid_argument("linearization constants too large");
  const std::int64_t scale = q.get_si(), eps = eps_q.get_si(), M = m_q.get_si();

  const std::int64_t max_len = (dom.n_nodes - 1) * dom.w_max;
  for (std::int64_t lj = 0; lj <= max_len; ++lj)
    for (std::int64_t li = 0; li <= max_len; ++li)
      for (std::int64_t w = dom.w_min; w <= dom.w_max; ++w) {
        ++r.points;
        bool logic = logic_holds<std::int64_t>(r.relation, lj, li, w);
        bool linear = linearized_holds<std::int64_t>(on_link, into_head, lj * scale,
                                                     li * scale, w * scale, eps, M);
        if (logic != linear && r.agrees) {
          r.agrees = false;
          r.counterexample = std::array<std::int64_t, 3>{lj, li, w};
        }
      }
  return r;
}

}  // namespace usp
