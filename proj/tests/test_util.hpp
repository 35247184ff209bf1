#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "radiogather/digraph.hpp"
#include "radiogather/engine.hpp"

namespace radiogather::testing {

/// Independent reachability oracle: repeated BFS per node.
inline std::vector<LabelSet> forward_reach(const Digraph& g) {
  std::vector<LabelSet> reach(g.n(), LabelSet(g.n()));
  for (NodeId s = 0; s < g.n(); ++s) {
    std::vector<NodeId> queue{s};
    reach[s].set(s);
    while (!queue.empty()) {
      NodeId v = queue.back();
      queue.pop_back();
      for (NodeId w : g.out_neighbors(v))
        if (!reach[s].test(w)) {
          reach[s].set(w);
          queue.push_back(w);
        }
    }
  }
  return reach;
}

/// Oracle partition: groups of mutually reachable nodes.
inline std::vector<std::vector<NodeId>> mutual_reach_partition(const Digraph& g) {
  const auto reach = forward_reach(g);
  std::vector<int> comp(g.n(), -1);
  std::vector<std::vector<NodeId>> groups;
  for (NodeId v = 0; v < g.n(); ++v) {
    if (comp[v] != -1) continue;
    std::vector<NodeId> group;
    for (NodeId w = v; w < g.n(); ++w)
      if (comp[w] == -1 && reach[v].test(w) && reach[w].test(v)) {
        comp[w] = static_cast<int>(groups.size());
        group.push_back(w);
      }
    groups.push_back(std::move(group));
  }
  return groups;
}

/// Oracle longest path via exhaustive DFS over simple paths (small DAGs only).
inline int longest_path_to(const Digraph& g, NodeId from, NodeId to) {
  if (from == to) return 0;
  int best = -1;
  for (NodeId w : g.out_neighbors(from)) {
    int sub = longest_path_to(g, w, to);
    if (sub >= 0) best = std::max(best, sub + 1);
  }
  return best;
}

/// Uniform random digraph (possibly cyclic) for oracle comparisons.
inline Digraph random_digraph(int n, double p, Seed seed, bool ensure_reachable) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v)
      if (u != v && draw_unit(rng) < p) edges.emplace_back(u, v);
  NodeId t = n - 1;
  Digraph g(n, t, edges);
  if (ensure_reachable && !validate_target_reachable(g)) {
    LabelSet ok = in_graph(g, std::vector<NodeId>{t});
    for (NodeId v = 0; v < n; ++v)
      if (!ok.test(v)) edges.emplace_back(v, t);
    return Digraph(n, t, edges);
  }
  return g;
}

/// Fixed transmission table for exercising the channel semantics directly.
/// entries: step -> list of (node, freq). Every listed node transmits its
/// label-stamped message at that step on that frequency.
class ScriptedFactory final : public ProtocolFactory {
 public:
  using Script = std::map<Step, std::vector<std::pair<NodeId, Freq>>>;

  ScriptedFactory(Script script, int frequencies, bool ack)
      : script_(std::move(script)), frequencies_(frequencies), ack_(ack) {}

  std::string name() const override { return "scripted"; }
  NetworkModel natural_model(int) const override {
    return NetworkModel{frequencies_, true, ack_};
  }
  void validate_model(const NetworkModel&, int) const override {}

  std::unique_ptr<NodeMachine> make_node(int n, NodeId label,
                                         const std::vector<NodeId>&) override;

  const Script& script() const { return script_; }

 private:
  Script script_;
  int frequencies_;
  bool ack_;
};

class ScriptedNode final : public NodeMachine {
 public:
  ScriptedNode(int n, NodeId self, const ScriptedFactory::Script* script)
      : self_(self), script_(script), rumors_(n) {
    rumors_.set(self_);
  }

  Step plan(Step now, std::vector<TxDecision>& out) override {
    auto it = script_->find(now);
    if (it != script_->end())
      for (auto [node, freq] : it->second)
        if (node == self_)
          out.push_back({freq, make_gather(self_, std::make_shared<LabelSet>(rumors_), now)});
    auto next = script_->upper_bound(now);
    return next == script_->end() ? kNeverStep : next->first;
  }

  void observe(Step, std::span<const ReceivedMessage> msgs) override {
    for (const auto& rm : msgs)
      if (rm.msg->rumors) rumors_ |= *rm.msg->rumors;
  }

  NodeView view() const override {
    NodeView v;
    v.rumors = &rumors_;
    v.mode = 1;
    return v;
  }

 private:
  NodeId self_;
  const ScriptedFactory::Script* script_;
  LabelSet rumors_;
};

inline std::unique_ptr<NodeMachine> ScriptedFactory::make_node(int n, NodeId label,
                                                               const std::vector<NodeId>&) {
  auto node = std::make_unique<ScriptedNode>(n, label, &script_);
  return node;
}

}  // namespace radiogather::testing
