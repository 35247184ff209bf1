#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "radiogather/common.hpp"

namespace radiogather {

/// Directed graph over labels 0..n-1 with a designated gathering target.
/// Immutable once built; self-loops are rejected, parallel edges collapse.
class Digraph {
 public:
  Digraph(int n, NodeId target, const std::vector<std::pair<NodeId, NodeId>>& edges);

  int n() const { return n_; }
  NodeId target() const { return target_; }
  std::size_t edge_count() const { return edge_count_; }

  const std::vector<NodeId>& out_neighbors(NodeId v) const { return out_[v]; }
  const std::vector<NodeId>& in_neighbors(NodeId v) const { return in_[v]; }
  bool has_edge(NodeId u, NodeId v) const;

  std::vector<std::pair<NodeId, NodeId>> edges() const;

  /// Plain text format: "n t" on the first line, then "u v" per edge.
  /// Lines starting with '#' are comments.
  std::string to_text() const;
  static Digraph from_text(const std::string& text);
  void save(const std::string& path) const;
  static Digraph load(const std::string& path);

 private:
  int n_;
  NodeId target_;
  std::size_t edge_count_ = 0;
  std::vector<std::vector<NodeId>> out_;
  std::vector<std::vector<NodeId>> in_;
};

/// Partition of the nodes into strongly connected components plus a
/// topological order of the condensation.
struct SccPartition {
  std::vector<int> component_of;            // node -> component id
  std::vector<std::vector<NodeId>> components;  // id -> sorted members
  std::vector<int> condensation_order;      // component ids, topologically sorted

  int size_class(int comp) const;  // smallest j with |comp| <= 2^j
};

/// Longest-path layering of an acyclic digraph toward the target.
/// delta(v) is the length of the longest directed path v -> t;
/// layers[i] = B_i = { v : delta(v) == max_delta - i }.
struct LayerDecomposition {
  std::vector<int> delta;
  std::vector<std::vector<NodeId>> layers;
  int max_delta = 0;

  int layer_of(NodeId v) const { return max_delta - delta[v]; }
};

/// True iff the target is reachable from every node.
bool validate_target_reachable(const Digraph& g);

SccPartition compute_scc(const Digraph& g);

bool is_acyclic(const Digraph& g);

/// All nodes from which some member of `targets` is reachable (members included).
LabelSet in_graph(const Digraph& g, const LabelSet& targets);
LabelSet in_graph(const Digraph& g, const std::vector<NodeId>& targets);

/// Rejects cyclic input with std::invalid_argument.
LayerDecomposition layer_decomposition(const Digraph& g);

}  // namespace radiogather
