#include "radiogather/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace radiogather {

namespace {

using EdgeList = std::vector<std::pair<NodeId, NodeId>>;

Digraph finalize(int n, NodeId target, EdgeList edges) {
  Digraph g(n, target, edges);
  if (validate_target_reachable(g)) return g;
  // fallback: wire every node that cannot reach t straight to t
  LabelSet reaches = in_graph(g, std::vector<NodeId>{target});
  for (NodeId v = 0; v < n; ++v)
    if (!reaches.test(v)) edges.emplace_back(v, target);
  return Digraph(n, target, edges);
}

Digraph gen_star(int n) {
  EdgeList edges;
  NodeId t = n - 1;
  for (NodeId v = 0; v < t; ++v) edges.emplace_back(v, t);
  return Digraph(n, t, edges);
}

Digraph gen_path(int n) {
  EdgeList edges;
  for (NodeId v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
  return Digraph(n, n - 1, edges);
}

Digraph gen_random_dag(int n, double density, Seed seed) {
  if (density < 0.0 || density > 1.0)
    throw std::invalid_argument("random_dag: density must be in [0,1]");
  std::mt19937_64 rng(seed);
  // random topological order; t is the order's last node
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(order[i], order[draw_below(rng, static_cast<std::uint64_t>(i) + 1)]);
  EdgeList edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (draw_unit(rng) < density) edges.emplace_back(order[i], order[j]);
  return finalize(n, order[n - 1], std::move(edges));
}

Digraph gen_layered_dag(int n, int width, Seed seed) {
  if (width <= 0) width = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  std::mt19937_64 rng(seed);
  // consecutive layers of `width` nodes; the last node alone forms the target layer
  std::vector<std::vector<NodeId>> layers;
  NodeId next = 0;
  while (next < n - 1) {
    std::vector<NodeId> layer;
    for (int i = 0; i < width && next < n - 1; ++i) layer.push_back(next++);
    layers.push_back(std::move(layer));
  }
  layers.push_back({static_cast<NodeId>(n - 1)});
  EdgeList edges;
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
    for (NodeId u : layers[i]) {
      bool any = false;
      for (NodeId v : layers[i + 1])
        if (draw_unit(rng) < 0.5) {
          edges.emplace_back(u, v);
          any = true;
        }
      if (!any) {
        NodeId v = layers[i + 1][draw_below(rng, layers[i + 1].size())];
        edges.emplace_back(u, v);
      }
    }
  }
  return finalize(n, n - 1, std::move(edges));
}

Digraph gen_scc_chain(int n, const std::vector<int>& sizes, Seed seed) {
  if (sizes.empty()) throw std::invalid_argument("scc_chain: sizes must be non-empty");
  int total = 0;
  for (int s : sizes) {
    if (s < 1) throw std::invalid_argument("scc_chain: block sizes must be >= 1");
    total += s;
  }
  if (total != n) throw std::invalid_argument("scc_chain: block sizes must sum to n");
  std::mt19937_64 rng(seed);
  EdgeList edges;
  std::vector<std::vector<NodeId>> blocks;
  NodeId next = 0;
  for (int s : sizes) {
    std::vector<NodeId> block;
    for (int i = 0; i < s; ++i) block.push_back(next++);
    // directed cycle makes the block one sc-component; extra chords for variety
    if (block.size() > 1) {
      for (std::size_t i = 0; i < block.size(); ++i)
        edges.emplace_back(block[i], block[(i + 1) % block.size()]);
      for (NodeId u : block)
        for (NodeId v : block)
          if (u != v && draw_unit(rng) < 0.2) edges.emplace_back(u, v);
    }
    blocks.push_back(std::move(block));
  }
  // one forward edge per consecutive block pair keeps the condensation a path
  for (std::size_t i = 0; i + 1 < blocks.size(); ++i) {
    NodeId u = blocks[i][draw_below(rng, blocks[i].size())];
    NodeId v = blocks[i + 1][draw_below(rng, blocks[i + 1].size())];
    edges.emplace_back(u, v);
  }
  return Digraph(n, n - 1, edges);
}

}  // namespace

Digraph generate(const std::string& kind, int n, const GenParams& params, Seed seed) {
  if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
  if (kind == "star") return gen_star(n);
  if (kind == "path") return gen_path(n);
  if (kind == "random_dag") return gen_random_dag(n, params.density, seed);
  if (kind == "layered_dag") return gen_layered_dag(n, params.width, seed);
  if (kind == "scc_chain") {
    if (!params.sizes.empty()) return gen_scc_chain(n, params.sizes, seed);
    // no explicit sizes: draw a random composition of n
    std::mt19937_64 rng(derive_seed(seed, 0x5cc));
    std::vector<int> sizes;
    int left = n;
    while (left > 0) {
      int s = 1 + static_cast<int>(draw_below(rng, std::min<std::uint64_t>(left, 8)));
      sizes.push_back(s);
      left -= s;
    }
    return gen_scc_chain(n, sizes, seed);
  }
  throw std::invalid_argument("generate: unknown kind '" + kind + "'");
}

std::vector<std::string> generator_kinds() {
  return {"star", "path", "random_dag", "layered_dag", "scc_chain"};
}

}  // namespace radiogather
