#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "usp/error.hpp"

namespace usp {

using NodeIndex = std::size_t;
using LinkIndex = std::size_t;
using DemandIndex = std::size_t;

struct Link {
  NodeIndex tail = 0;
  NodeIndex head = 0;
  double capacity = 0.0;

  friend bool operator==(const Link&, const Link&) = default;
};

struct Demand {
  NodeIndex origin = 0;
  NodeIndex destination = 0;
  double bandwidth = 0.0;

  friend bool operator==(const Demand&, const Demand&) = default;
};

struct InstanceDims {
  std::uint64_t n_nodes = 0;
  std::uint64_t n_links = 0;
  std::uint64_t n_demands = 0;
  std::uint64_t n_origins = 0;

  friend bool operator==(const InstanceDims&, const InstanceDims&) = default;
};

// Problem input: a capacitated digraph, a demand list and the admissible
// link-weight grid {k * weight_resolution : w_min <= k * step <= w_max}.
//
// Plain data. The origin set, per-origin demand lists and destination sets
// are computed on request from `demands`, never cached.
struct Instance {
  std::vector<std::string> nodes;
  std::vector<Link> links;
  std::vector<Demand> demands;
  double w_min = 1.0;
  double w_max = 1.0;
  double weight_resolution = 1.0;

  friend bool operator==(const Instance&, const Instance&) = default;

  InstanceDims dims() const;

  // Distinct demand origins in ascending node order.
  std::vector<NodeIndex> origins() const;
  // Demands originating at `origin`, in demand order.
  std::vector<DemandIndex> demands_from(NodeIndex origin) const;
  // Destinations of demands originating at `origin`, in demand order.
  std::vector<NodeIndex> destinations_from(NodeIndex origin) const;
  // Total bandwidth originating at `origin`.
  double origin_demand(NodeIndex origin) const;

  std::optional<LinkIndex> find_link(NodeIndex tail, NodeIndex head) const;
  std::optional<NodeIndex> find_node(const std::string& id) const;

  // Weight grid bounds in units of weight_resolution.
  std::int64_t w_min_units() const;
  std::int64_t w_max_units() const;

  std::string demand_label(DemandIndex k) const;
  std::string link_label(LinkIndex l) const;
};

// Per-node incoming/outgoing link lists, built once for algorithms that
// walk the graph repeatedly.
class Adjacency {
 public:
  explicit Adjacency(const Instance& instance);

  const std::vector<LinkIndex>& in(NodeIndex node) const { return in_[node]; }
  const std::vector<LinkIndex>& out(NodeIndex node) const {
    return out_[node];
  }

 private:
  std::vector<std::vector<LinkIndex>> in_;
  std::vector<std::vector<LinkIndex>> out_;
};

struct Violation {
  std::string location;
  std::string message;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate_instance(const Instance& instance);

class InvalidInstance : public Error {
 public:
  explicit InvalidInstance(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

// Value `x` expressed as an integer count of `step`, if it lies on the grid.
std::optional<std::int64_t> to_grid_units(double x, double step);

struct GeneratorParams {
  std::size_t n_nodes = 4;
  double avg_out_degree = 2.0;
  std::size_t n_demands = 3;
  std::pair<double, double> capacity_range{5.0, 20.0};
  std::pair<double, double> demand_range{1.0, 5.0};
  double w_min = 1.0;
  double w_max = 10.0;
  double weight_resolution = 1.0;
  std::uint64_t seed = 1;
};

// Hamiltonian-cycle backbone (random node order) plus uniformly drawn extra
// arcs up to round(avg_out_degree * n_nodes) links, and demands over distinct
// OD pairs. Capacities and bandwidths are drawn as integers within their
// ranges so that loads add up exactly. Pure function of `params`.
Instance generate_random_instance(const GeneratorParams& params);

// JSON text with fields nodes, links, demands, w_min, w_max,
// weight_resolution. load_instance throws ParseError on malformed text and
// InvalidInstance when the parsed data violates an invariant.
Instance load_instance(const std::string& text);
std::string save_instance(const Instance& instance);

Instance read_instance_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace usp
