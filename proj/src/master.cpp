#include "usp/master.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>

namespace usp {

bool Cut::matches(const RoutingForest& forest) const {
  for (const auto& lit : literals) {
    const OriginTree* t = forest.tree_for(lit.origin);
    if (!t || lit.link >= t->used.size()) return false;
    if ((t->used[lit.link] != 0) != lit.value) return false;
  }
  return true;
}

Cut tree_cut(const Instance& instance, const OriginTree& tree) {
  Cut c;
  for (LinkIndex l = 0; l < instance.links.size(); ++l)
    c.literals.push_back({tree.origin, l, tree.used[l] != 0});
  return c;
}

Cut exact_cut(const Instance& instance, const RoutingForest& forest) {
  Cut c;
  for (const auto& t : forest.trees) {
    Cut one = tree_cut(instance, t);
    c.literals.insert(c.literals.end(), one.literals.begin(), one.literals.end());
  }
  return c;
}

namespace {

constexpr double kFlowTol = 1e-9;
constexpr std::size_t kNone = static_cast<std::size_t>(-1);

struct TreeEntry {
  OriginTree tree;
  std::vector<std::vector<NodeIndex>> paths;  // per demand of the origin
  double cost = 0.0;
};

// Best-first enumeration of one origin's trees in nondecreasing load.
class OriginStream {
 public:
  OriginStream(const Instance& instance, const Adjacency& adj, NodeIndex origin,
               std::uint64_t& nodes, std::uint64_t node_limit)
      : inst_(instance), adj_(adj), origin_(origin), demands_(instance.demands_from(origin)),
        nodes_(nodes), node_limit_(node_limit) {
    hops_ = bfs_hops();
    double h = 0.0;
    for (DemandIndex k : demands_) {
      const NodeIndex t = inst_.demands[k].destination;
      if (hops_[t] == kNone) {
        dead_ = true;
        return;
      }
      h += inst_.demands[k].bandwidth * static_cast<double>(hops_[t]);
    }
    State root;
    root.incoming.assign(inst_.nodes.size(), kNone);
    root.flow.assign(inst_.links.size(), 0.0);
    root.f = h;
    push(std::move(root));
  }

  NodeIndex origin() const { return origin_; }

  // Tree i of the stream, generating as needed; nullptr when exhausted.
  const TreeEntry* at(std::size_t i) {
    while (produced_.size() <= i && !dead_) advance();
    return i < produced_.size() ? &produced_[i] : nullptr;
  }

 private:
  struct State {
    std::vector<std::size_t> incoming;  // link into each node, kNone if absent
    std::vector<double> flow;
    std::vector<std::vector<NodeIndex>> paths;
    double g = 0.0;
    double f = 0.0;
    std::uint64_t seq = 0;
  };
  struct Later {
    bool operator()(const State& a, const State& b) const {
      if (a.f != b.f) return a.f > b.f;
      return a.seq > b.seq;
    }
  };

  std::vector<std::size_t> bfs_hops() const {
    std::vector<std::size_t> hops(inst_.nodes.size(), kNone);
    std::queue<NodeIndex> q;
    hops[origin_] = 0;
    q.push(origin_);
    while (!q.empty()) {
      NodeIndex u = q.front();
      q.pop();
      for (LinkIndex l : adj_.out(u)) {
        NodeIndex v = inst_.links[l].head;
        if (hops[v] == kNone) {
          hops[v] = hops[u] + 1;
          q.push(v);
        }
      }
    }
    return hops;
  }

  void push(State s) {
    s.seq = seq_++;
    open_.push(std::move(s));
  }

  bool in_tree(const State& s, NodeIndex v) const {
    return v == origin_ || s.incoming[v] != kNone;
  }

  std::vector<NodeIndex> tree_path(const State& s, NodeIndex v) const {
    std::vector<NodeIndex> p{v};
    while (v != origin_) {
      v = inst_.links[s.incoming[v]].tail;
      p.push_back(v);
    }
    std::reverse(p.begin(), p.end());
    return p;
  }

  // Paths for the next demand that keep in-degree <= 1: the tree path to some
  // tree node v, then fresh nodes only.
  std::vector<std::vector<NodeIndex>> extensions(const State& s, NodeIndex t) const {
    if (in_tree(s, t)) return {tree_path(s, t)};
    std::vector<std::vector<NodeIndex>> out;
    std::vector<char> on(inst_.nodes.size(), 0);
    std::vector<NodeIndex> tail;
    std::function<void(NodeIndex)> dfs = [&](NodeIndex u) {
      for (LinkIndex l : adj_.out(u)) {
        NodeIndex v = inst_.links[l].head;
        if (on[v] || in_tree(s, v)) continue;
        tail.push_back(v);
        if (v == t) {
          out.push_back(tail);
        } else {
          on[v] = 1;
          dfs(v);
          on[v] = 0;
        }
        tail.pop_back();
      }
    };
    for (NodeIndex v = 0; v < inst_.nodes.size(); ++v) {
      if (!in_tree(s, v)) continue;
      const std::size_t before = out.size();
      tail.clear();
      dfs(v);
      if (out.size() == before) continue;
      auto head = tree_path(s, v);
      for (std::size_t i = before; i < out.size(); ++i)
        out[i].insert(out[i].begin(), head.begin(), head.end());
    }
    return out;
  }

  void advance() {
    if (open_.empty()) {
      dead_ = true;
      return;
    }
    if (node_limit_ && nodes_ >= node_limit_)
      throw ResourceLimit("master search reached the node limit");
    ++nodes_;
    State s = open_.top();
    open_.pop();
    const std::size_t j = s.paths.size();
    if (j == demands_.size()) {
      TreeEntry e;
      e.tree.origin = origin_;
      e.tree.used.assign(inst_.links.size(), 0);
      e.tree.flow = s.flow;
      for (NodeIndex v = 0; v < inst_.nodes.size(); ++v)
        if (s.incoming[v] != kNone) e.tree.used[s.incoming[v]] = 1;
      e.paths = std::move(s.paths);
      e.cost = s.g;
      produced_.push_back(std::move(e));
      return;
    }
    const auto& d = inst_.demands[demands_[j]];
    for (auto& p : extensions(s, d.destination)) {
      State c = s;
      bool ok = true;
      for (std::size_t h = 0; h + 1 < p.size() && ok; ++h) {
        const LinkIndex l = *inst_.find_link(p[h], p[h + 1]);
        c.incoming[p[h + 1]] = l;
        c.flow[l] += d.bandwidth;
        ok = c.flow[l] <= inst_.links[l].capacity + kFlowTol;
      }
      if (!ok) continue;
      const double hops = static_cast<double>(p.size() - 1);
      c.g += d.bandwidth * hops;
      c.f += d.bandwidth * (hops - static_cast<double>(hops_[d.destination]));
      c.paths.push_back(std::move(p));
      push(std::move(c));
    }
  }

  const Instance& inst_;
  const Adjacency& adj_;
  NodeIndex origin_;
  std::vector<DemandIndex> demands_;
  std::uint64_t& nodes_;
  std::uint64_t node_limit_;
  std::vector<std::size_t> hops_;
  std::priority_queue<State, std::vector<State>, Later> open_;
  std::uint64_t seq_ = 0;
  std::vector<TreeEntry> produced_;
  bool dead_ = false;
};

struct Combo {
  double cost = 0.0;
  std::vector<std::size_t> index;
};

struct ComboLater {
  bool operator()(const Combo& a, const Combo& b) const {
    if (a.cost != b.cost) return a.cost > b.cost;
    return a.index > b.index;
  }
};

}  // namespace

struct MasterSearch::Impl {
  const Instance& instance;
  MasterOptions options;
  Adjacency adj;
  std::uint64_t nodes = 0;
  std::vector<OriginStream> streams;
  std::priority_queue<Combo, std::vector<Combo>, ComboLater> frontier;
  std::set<std::vector<std::size_t>> seen;
  std::vector<Cut> cuts;
  bool started = false;

  Impl(const Instance& inst, MasterOptions opt)
      : instance(inst), options(opt), adj(inst) {
    for (NodeIndex s : instance.origins())
      streams.emplace_back(instance, adj, s, nodes, options.node_limit);
  }

  void offer(std::vector<std::size_t> index) {
    if (seen.count(index)) return;
    double cost = 0.0;
    for (std::size_t p = 0; p < streams.size(); ++p) {
      const TreeEntry* e = streams[p].at(index[p]);
      if (!e) return;
      cost += e->cost;
    }
    seen.insert(index);
    frontier.push({cost, std::move(index)});
  }

  std::optional<MasterCandidate> next() {
    if (!started) {
      started = true;
      offer(std::vector<std::size_t>(streams.size(), 0));
    }
    while (!frontier.empty()) {
      if (options.node_limit && nodes >= options.node_limit)
        throw ResourceLimit("master search reached the node limit");
      ++nodes;
      Combo c = frontier.top();
      frontier.pop();
      if (options.incumbent_bound && c.cost > *options.incumbent_bound + kFlowTol) {
        frontier = {};
        return std::nullopt;
      }
      for (std::size_t p = 0; p < streams.size(); ++p) {
        auto succ = c.index;
        ++succ[p];
        offer(std::move(succ));
      }
      MasterCandidate cand;
      cand.objective = c.cost;
      cand.paths.resize(instance.demands.size());
      std::vector<double> load(instance.links.size(), 0.0);
      for (std::size_t p = 0; p < streams.size(); ++p) {
        const TreeEntry* e = streams[p].at(c.index[p]);
        cand.forest.trees.push_back(e->tree);
        for (LinkIndex l = 0; l < load.size(); ++l) load[l] += e->tree.flow[l];
        auto ks = instance.demands_from(streams[p].origin());
        for (std::size_t j = 0; j < ks.size(); ++j) cand.paths[ks[j]] = e->paths[j];
      }
      bool fits = true;
      for (LinkIndex l = 0; l < load.size() && fits; ++l)
        fits = load[l] <= instance.links[l].capacity + kFlowTol;
      if (!fits) continue;
      bool excluded = std::any_of(cuts.begin(), cuts.end(),
                                  [&](const Cut& cut) { return cut.matches(cand.forest); });
      if (excluded) continue;
      return cand;
    }
    return std::nullopt;
  }
};

MasterSearch::MasterSearch(const Instance& instance, MasterOptions options)
    : impl_(std::make_unique<Impl>(instance, options)) {}

MasterSearch::~MasterSearch() = default;

std::optional<MasterCandidate> MasterSearch::next() { return impl_->next(); }

void MasterSearch::add_cut(Cut cut) { impl_->cuts.push_back(std::move(cut)); }

const std::vector<Cut>& MasterSearch::cuts() const { return impl_->cuts; }

std::uint64_t MasterSearch::nodes_explored() const { return impl_->nodes; }

std::vector<MasterCandidate> master_candidates(const Instance& instance,
                                               const std::vector<Cut>& cuts,
                                               MasterOptions options) {
  MasterSearch search(instance, options);
  for (const auto& c : cuts) search.add_cut(c);
  std::vector<MasterCandidate> out;
  while (auto c = search.next()) out.push_back(std::move(*c));
  return out;
}

}  // namespace usp
