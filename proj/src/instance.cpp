#include "usp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace usp {

using json = nlohmann::ordered_json;

InstanceDims Instance::dims() const {
  return {nodes.size(), links.size(), demands.size(), origins().size()};
}

std::vector<NodeIndex> Instance::origins() const {
  std::set<NodeIndex> s;
  for (const auto& d : demands) s.insert(d.origin);
  return {s.begin(), s.end()};
}

std::vector<DemandIndex> Instance::demands_from(NodeIndex origin) const {
  std::vector<DemandIndex> out;
  for (DemandIndex k = 0; k < demands.size(); ++k)
    if (demands[k].origin == origin) out.push_back(k);
  return out;
}

std::vector<NodeIndex> Instance::destinations_from(NodeIndex origin) const {
  std::vector<NodeIndex> out;
  for (const auto& d : demands)
    if (d.origin == origin) out.push_back(d.destination);
  return out;
}

double Instance::origin_demand(NodeIndex origin) const {
  double total = 0.0;
  for (const auto& d : demands)
    if (d.origin == origin) total += d.bandwidth;
  return total;
}

std::optional<LinkIndex> Instance::find_link(NodeIndex tail,
                                             NodeIndex head) const {
  for (LinkIndex l = 0; l < links.size(); ++l)
    if (links[l].tail == tail && links[l].head == head) return l;
  return std::nullopt;
}

std::optional<NodeIndex> Instance::find_node(const std::string& id) const {
  auto it = std::find(nodes.begin(), nodes.end(), id);
  if (it == nodes.end()) return std::nullopt;
  return static_cast<NodeIndex>(it - nodes.begin());
}

std::int64_t Instance::w_min_units() const {
  auto u = to_grid_units(w_min, weight_resolution);
  if (!u) throw Error("w_min is not on the weight grid");
  return *u;
}

std::int64_t Instance::w_max_units() const {
  auto u = to_grid_units(w_max, weight_resolution);
  if (!u) throw Error("w_max is not on the weight grid");
  return *u;
}

namespace {

std::string node_name(const Instance& in, NodeIndex i) {
  return i < in.nodes.size() ? in.nodes[i] : "#" + std::to_string(i);
}

}  // namespace

std::string Instance::demand_label(DemandIndex k) const {
  const auto& d = demands.at(k);
  return "(" + node_name(*this, d.origin) + "," +
         node_name(*this, d.destination) + ")";
}

std::string Instance::link_label(LinkIndex l) const {
  const auto& e = links.at(l);
  return "(" + node_name(*this, e.tail) + "," + node_name(*this, e.head) +
         ")";
}

Adjacency::Adjacency(const Instance& instance)
    : in_(instance.nodes.size()), out_(instance.nodes.size()) {
  for (LinkIndex l = 0; l < instance.links.size(); ++l) {
    out_[instance.links[l].tail].push_back(l);
    in_[instance.links[l].head].push_back(l);
  }
}

std::optional<std::int64_t> to_grid_units(double x, double step) {
  if (!(step > 0.0) || !std::isfinite(x)) return std::nullopt;
  double q = x / step;
  double r = std::round(q);
  if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) return std::nullopt;
  if (std::abs(r) > 1e15) return std::nullopt;
  return static_cast<std::int64_t>(r);
}

InvalidInstance::InvalidInstance(ValidationReport report)
    : Error([&] {
        std::string msg = "invalid instance";
        for (const auto& v : report)
          msg += "; " + v.location + ": " + v.message;
        return msg;
      }()),
      report_(std::move(report)) {}

ValidationReport validate_instance(const Instance& in) {
  ValidationReport report;
  auto add = [&](std::string where, std::string what) {
    report.push_back({std::move(where), std::move(what)});
  };

  std::set<std::string> seen_ids;
  for (std::size_t i = 0; i < in.nodes.size(); ++i)
    if (!seen_ids.insert(in.nodes[i]).second)
      add("nodes[" + std::to_string(i) + "]", "duplicate node id");

  const std::size_t n = in.nodes.size();
  std::set<std::pair<NodeIndex, NodeIndex>> seen_links;
  for (std::size_t l = 0; l < in.links.size(); ++l) {
    const auto& e = in.links[l];
    std::string where = "links[" + std::to_string(l) + "]";
    if (e.tail >= n || e.head >= n) {
      add(where, "unknown node");
      continue;
    }
    if (e.tail == e.head) add(where, "self-loop link");
    if (!seen_links.insert({e.tail, e.head}).second)
      add(where, "duplicate link");
    if (!(e.capacity >= 0.0) || !std::isfinite(e.capacity))
      add(where, "negative capacity");
  }

  std::set<std::pair<NodeIndex, NodeIndex>> seen_od;
  for (std::size_t k = 0; k < in.demands.size(); ++k) {
    const auto& d = in.demands[k];
    std::string where = "demands[" + std::to_string(k) + "]";
    if (d.origin >= n || d.destination >= n) {
      add(where, "unknown node");
      continue;
    }
    if (d.origin == d.destination) add(where, "origin equals destination");
    if (!seen_od.insert({d.origin, d.destination}).second)
      add(where, "duplicate OD pair");
    if (!(d.bandwidth > 0.0) || !std::isfinite(d.bandwidth))
      add(where, "non-positive bandwidth");
  }

  bool grid_ok = true;
  if (!(in.weight_resolution > 0.0) || !std::isfinite(in.weight_resolution)) {
    add("weight_resolution", "weight_resolution must be positive");
    grid_ok = false;
  }
  if (!(in.w_min > 0.0)) add("w_min", "w_min must be positive");
  if (!(in.w_min <= in.w_max)) add("w_max", "w_min exceeds w_max");
  if (grid_ok) {
    if (!to_grid_units(in.w_min, in.weight_resolution))
      add("w_min", "w_min is not on the weight grid");
    if (!to_grid_units(in.w_max, in.weight_resolution))
      add("w_max", "w_max is not on the weight grid");
  }

  // Every demand needs at least one path; full strong connectivity is not
  // required.
  bool structure_ok = std::none_of(report.begin(), report.end(), [](auto& v) {
    return v.message == "unknown node";
  });
  if (structure_ok) {
    Adjacency adj(in);
    std::map<NodeIndex, std::vector<char>> reach;
    for (std::size_t k = 0; k < in.demands.size(); ++k) {
      const auto& d = in.demands[k];
      if (d.origin == d.destination) continue;
      auto it = reach.find(d.origin);
      if (it == reach.end()) {
        std::vector<char> seen(n, 0);
        std::queue<NodeIndex> q;
        q.push(d.origin);
        seen[d.origin] = 1;
        while (!q.empty()) {
          NodeIndex u = q.front();
          q.pop();
          for (LinkIndex l : adj.out(u)) {
            NodeIndex v = in.links[l].head;
            if (!seen[v]) {
              seen[v] = 1;
              q.push(v);
            }
          }
        }
        it = reach.emplace(d.origin, std::move(seen)).first;
      }
      if (!it->second[d.destination])
        add("demands[" + std::to_string(k) + "]",
            "destination unreachable from origin");
    }
  }
  return report;
}

namespace {

// Portable bounded draws: std distributions are implementation-defined, and
// generated instances must be identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  // Integer in [ceil(lo), floor(hi)], or lo itself when that range is empty.
  double integer_in(std::pair<double, double> range) {
    double lo = std::ceil(range.first);
    double hi = std::floor(range.second);
    if (hi < lo) return range.first;
    auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<double>(below(span));
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

Instance generate_random_instance(const GeneratorParams& p) {
  if (p.n_nodes < 2) throw GenerationInfeasible("n_nodes must be at least 2");
  if (!(p.avg_out_degree > 0.0))
    throw GenerationInfeasible("avg_out_degree must be positive");
  const std::size_t n = p.n_nodes;
  const std::size_t max_links = n * (n - 1);
  if (p.avg_out_degree * static_cast<double>(n) >
      static_cast<double>(max_links) + 1e-9)
    throw GenerationInfeasible("avg_out_degree * n_nodes exceeds n_nodes * (n_nodes - 1)");
  if (p.n_demands > max_links)
    throw GenerationInfeasible("n_demands = " + std::to_string(p.n_demands) +
                               " exceeds the " + std::to_string(max_links) +
                               " available OD pairs");
  if (p.capacity_range.first < 0.0 || p.capacity_range.second < p.capacity_range.first)
    throw GenerationInfeasible("invalid capacity range");
  if (!(p.demand_range.first > 0.0) || p.demand_range.second < p.demand_range.first)
    throw GenerationInfeasible("invalid demand range");

  Rng rng(p.seed);
  Instance in;
  in.w_min = p.w_min;
  in.w_max = p.w_max;
  in.weight_resolution = p.weight_resolution;
  for (std::size_t i = 0; i < n; ++i) in.nodes.push_back("n" + std::to_string(i));

  std::vector<NodeIndex> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  std::set<std::pair<NodeIndex, NodeIndex>> arcs;
  for (std::size_t i = 0; i < n; ++i) {
    NodeIndex a = order[i], b = order[(i + 1) % n];
    arcs.insert({a, b});
  }
  std::size_t target = std::max<std::size_t>(
      arcs.size(),
      static_cast<std::size_t>(std::llround(p.avg_out_degree * static_cast<double>(n))));
  target = std::min(target, max_links);

  std::vector<std::pair<NodeIndex, NodeIndex>> candidates;
  for (NodeIndex i = 0; i < n; ++i)
    for (NodeIndex j = 0; j < n; ++j)
      if (i != j && !arcs.count({i, j})) candidates.push_back({i, j});
  rng.shuffle(candidates);
  for (std::size_t c = 0; arcs.size() < target; ++c) arcs.insert(candidates[c]);

  for (const auto& [i, j] : arcs)
    in.links.push_back({i, j, rng.integer_in(p.capacity_range)});

  std::vector<std::pair<NodeIndex, NodeIndex>> od;
  for (NodeIndex i = 0; i < n; ++i)
    for (NodeIndex j = 0; j < n; ++j)
      if (i != j) od.push_back({i, j});
  rng.shuffle(od);
  od.resize(p.n_demands);
  std::sort(od.begin(), od.end());
  for (const auto& [s, t] : od)
    in.demands.push_back({s, t, rng.integer_in(p.demand_range)});
  return in;
}

namespace {

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

const json& field(const json& obj, const std::string& key,
                  const std::string& path) {
  if (!obj.is_object()) throw ParseError("expected an object", 0, path);
  auto it = obj.find(key);
  if (it == obj.end())
    throw ParseError("missing field", 0, path.empty() ? key : path + "." + key);
  return *it;
}

double number(const json& obj, const std::string& key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_number())
    throw ParseError("expected a number", 0,
                     path.empty() ? key : path + "." + key);
  return v.get<double>();
}

NodeIndex node_ref(const Instance& in, const json& obj, const std::string& key,
                   const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_string())
    throw ParseError("expected a node id string", 0, path + "." + key);
  auto idx = in.find_node(v.get<std::string>());
  if (!idx)
    throw ParseError("unknown node '" + v.get<std::string>() + "'", 0,
                     path + "." + key);
  return *idx;
}

}  // namespace

Instance load_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), line_of(text, e.byte));
  }

  Instance in;
  const json& nodes = field(doc, "nodes", "");
  if (!nodes.is_array()) throw ParseError("expected an array", 0, "nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].is_string())
      throw ParseError("expected a string", 0, "nodes[" + std::to_string(i) + "]");
    in.nodes.push_back(nodes[i].get<std::string>());
  }

  const json& links = field(doc, "links", "");
  if (!links.is_array()) throw ParseError("expected an array", 0, "links");
  for (std::size_t l = 0; l < links.size(); ++l) {
    std::string path = "links[" + std::to_string(l) + "]";
    Link e;
    e.tail = node_ref(in, links[l], "tail", path);
    e.head = node_ref(in, links[l], "head", path);
    e.capacity = number(links[l], "capacity", path);
    in.links.push_back(e);
  }

  const json& demands = field(doc, "demands", "");
  if (!demands.is_array()) throw ParseError("expected an array", 0, "demands");
  for (std::size_t k = 0; k < demands.size(); ++k) {
    std::string path = "demands[" + std::to_string(k) + "]";
    Demand d;
    d.origin = node_ref(in, demands[k], "origin", path);
    d.destination = node_ref(in, demands[k], "destination", path);
    d.bandwidth = number(demands[k], "bandwidth", path);
    in.demands.push_back(d);
  }

  in.w_min = number(doc, "w_min", "");
  in.w_max = number(doc, "w_max", "");
  in.weight_resolution = number(doc, "weight_resolution", "");

  if (auto report = validate_instance(in); !report.empty())
    throw InvalidInstance(std::move(report));
  return in;
}

std::string save_instance(const Instance& in) {
  json doc;
  doc["nodes"] = in.nodes;
  json links = json::array();
  for (const auto& e : in.links)
    links.push_back({{"tail", in.nodes.at(e.tail)},
                     {"head", in.nodes.at(e.head)},
                     {"capacity", e.capacity}});
  doc["links"] = std::move(links);
  json demands = json::array();
  for (const auto& d : in.demands)
    demands.push_back({{"origin", in.nodes.at(d.origin)},
                       {"destination", in.nodes.at(d.destination)},
                       {"bandwidth", d.bandwidth}});
  doc["demands"] = std::move(demands);
  doc["w_min"] = in.w_min;
  doc["w_max"] = in.w_max;
  doc["weight_resolution"] = in.weight_resolution;
  return doc.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << text;
  if (!f) throw Error("write failed for '" + path + "'");
}

Instance read_instance_file(const std::string& path) {
  return load_instance(read_text_file(path));
}

}  // namespace usp
