#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "usp/spf.hpp"

namespace usp {

// y^s_l == value for the tree of origin s.
struct CutLiteral {
  NodeIndex origin = 0;
  LinkIndex link = 0;
  bool value = false;

  friend bool operator==(const CutLiteral&, const CutLiteral&) = default;
};

// No-good cut: a forest agreeing with every literal is excluded.
struct Cut {
  std::vector<CutLiteral> literals;

  bool matches(const RoutingForest& forest) const;
};

// Literals fixing every y of every tree in `forest`.
Cut exact_cut(const Instance& instance, const RoutingForest& forest);
// Literals fixing every y of the tree of `origin`.
Cut tree_cut(const Instance& instance, const OriginTree& tree);

struct MasterCandidate {
  RoutingForest forest;
  std::vector<std::vector<NodeIndex>> paths;  // per demand
  double objective = 0.0;
};

struct MasterOptions {
  // Stop once candidates exceed this objective.
  std::optional<double> incumbent_bound;
  // Cap on search nodes (tree expansions plus combinations); 0 = none.
  std::uint64_t node_limit = 0;
};

// Lazily enumerates forests satisfying the origin-based master constraints
// (uniqueness, conservation, flow bounds, capacity) in nondecreasing
// objective. Per-origin trees come from a best-first search over one path per
// demand; trees are then combined through a k-way merge subject to the shared
// capacity. Equal objectives are broken by the tree index vector, so the
// sequence is deterministic.
class MasterSearch {
 public:
  MasterSearch(const Instance& instance, MasterOptions options = {});
  ~MasterSearch();
  MasterSearch(const MasterSearch&) = delete;
  MasterSearch& operator=(const MasterSearch&) = delete;

  // Next candidate not excluded by a cut; nullopt when the stream is empty.
  // Throws ResourceLimit when the node limit is reached.
  std::optional<MasterCandidate> next();

  void add_cut(Cut cut);
  const std::vector<Cut>& cuts() const;

  std::uint64_t nodes_explored() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Convenience: every remaining candidate, in order.
std::vector<MasterCandidate> master_candidates(const Instance& instance,
                                               const std::vector<Cut>& cuts = {},
                                               MasterOptions options = {});

}  // namespace usp
