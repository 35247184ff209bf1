#include "radiogather/digraph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace radiogather {

Digraph::Digraph(int n, NodeId target,
                 const std::vector<std::pair<NodeId, NodeId>>& edges)
    : n_(n), target_(target), out_(n), in_(n) {
  if (n < 1) throw std::invalid_argument("digraph: n must be >= 1");
  if (target < 0 || target >= n) throw std::invalid_argument("digraph: target out of range");
  for (auto [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw std::invalid_argument("digraph: edge endpoint out of range");
    if (u == v) throw std::invalid_argument("digraph: self-loops are rejected");
    out_[u].push_back(v);
  }
  for (auto& adj : out_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  for (NodeId u = 0; u < n_; ++u) {
    edge_count_ += out_[u].size();
    for (NodeId v : out_[u]) in_[v].push_back(u);
  }
  for (auto& adj : in_) std::sort(adj.begin(), adj.end());
}

bool Digraph::has_edge(NodeId u, NodeId v) const {
  const auto& adj = out_[u];
  return std::binary_search(adj.begin(), adj.end(), v);
}

std::vector<std::pair<NodeId, NodeId>> Digraph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> es;
  es.reserve(edge_count_);
  for (NodeId u = 0; u < n_; ++u)
    for (NodeId v : out_[u]) es.emplace_back(u, v);
  return es;
}

std::string Digraph::to_text() const {
  std::ostringstream os;
  os << n_ << ' ' << target_ << '\n';
  for (NodeId u = 0; u < n_; ++u)
    for (NodeId v : out_[u]) os << u << ' ' << v << '\n';
  return os.str();
}

Digraph Digraph::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int n = -1;
  NodeId t = -1;
  std::vector<std::pair<NodeId, NodeId>> edges;
  bool have_header = false;
  while (std::getline(is, line)) {
    auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    long a, b;
    if (!(ls >> a)) continue;
    if (!(ls >> b)) throw std::invalid_argument("graph file: malformed line: " + line);
    if (!have_header) {
      n = static_cast<int>(a);
      t = static_cast<NodeId>(b);
      have_header = true;
    } else {
      edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
    }
  }
  if (!have_header) throw std::invalid_argument("graph file: missing 'n t' header");
  return Digraph(n, t, edges);
}

void Digraph::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << to_text();
}

Digraph Digraph::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return from_text(ss.str());
}

int SccPartition::size_class(int comp) const {
  return log2_ceil(static_cast<std::int64_t>(components[comp].size()));
}

bool validate_target_reachable(const Digraph& g) {
  // reverse reachability search from t
  std::vector<char> seen(g.n(), 0);
  std::deque<NodeId> queue{g.target()};
  seen[g.target()] = 1;
  int count = 0;
  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop_front();
    ++count;
    for (NodeId u : g.in_neighbors(v))
      if (!seen[u]) {
        seen[u] = 1;
        queue.push_back(u);
      }
  }
  return count == g.n();
}

SccPartition compute_scc(const Digraph& g) {
  // iterative Tarjan; components pop in reverse topological order
  const int n = g.n();
  SccPartition part;
  part.component_of.assign(n, -1);

  std::vector<int> index(n, -1), lowlink(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<NodeId> stack;
  int next_index = 0;

  struct Frame {
    NodeId v;
    std::size_t child;
  };
  std::vector<Frame> call;

  for (NodeId root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call.push_back({root, 0});
    while (!call.empty()) {
      auto& fr = call.back();
      NodeId v = fr.v;
      if (fr.child == 0) {
        index[v] = lowlink[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      bool descended = false;
      const auto& adj = g.out_neighbors(v);
      while (fr.child < adj.size()) {
        NodeId w = adj[fr.child++];
        if (index[w] == -1) {
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
      }
      if (descended) continue;
      if (lowlink[v] == index[v]) {
        std::vector<NodeId> comp;
        NodeId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          part.component_of[w] = static_cast<int>(part.components.size());
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        part.components.push_back(std::move(comp));
      }
      call.pop_back();
      if (!call.empty()) {
        NodeId parent = call.back().v;
        lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
      }
    }
  }

  // reverse emission order == topological order of the condensation
  part.condensation_order.resize(part.components.size());
  for (std::size_t i = 0; i < part.components.size(); ++i)
    part.condensation_order[i] = static_cast<int>(part.components.size() - 1 - i);
  return part;
}

bool is_acyclic(const Digraph& g) {
  const auto part = compute_scc(g);
  return part.components.size() == static_cast<std::size_t>(g.n());
}

LabelSet in_graph(const Digraph& g, const LabelSet& targets) {
  LabelSet seen(g.n());
  std::deque<NodeId> queue;
  for (auto v = targets.find_first(); v != LabelSet::npos; v = targets.find_next(v)) {
    seen.set(v);
    queue.push_back(static_cast<NodeId>(v));
  }
  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop_front();
    for (NodeId u : g.in_neighbors(v))
      if (!seen.test(u)) {
        seen.set(u);
        queue.push_back(u);
      }
  }
  return seen;
}

LabelSet in_graph(const Digraph& g, const std::vector<NodeId>& targets) {
  LabelSet t(g.n());
  for (NodeId v : targets) t.set(v);
  return in_graph(g, t);
}

LayerDecomposition layer_decomposition(const Digraph& g) {
  const int n = g.n();
  if (!validate_target_reachable(g))
    throw std::invalid_argument("layer_decomposition: target not reachable from all nodes");
  // Kahn order over out-edges; cycles leave nodes unprocessed.
  std::vector<int> out_deg(n);
  for (NodeId v = 0; v < n; ++v) out_deg[v] = static_cast<int>(g.out_neighbors(v).size());

  LayerDecomposition ld;
  ld.delta.assign(n, 0);
  std::deque<NodeId> queue;
  for (NodeId v = 0; v < n; ++v)
    if (out_deg[v] == 0) queue.push_back(v);
  int processed = 0;
  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop_front();
    ++processed;
    for (NodeId u : g.in_neighbors(v)) {
      ld.delta[u] = std::max(ld.delta[u], ld.delta[v] + 1);
      if (--out_deg[u] == 0) queue.push_back(u);
    }
  }
  if (processed != n) throw std::invalid_argument("layer_decomposition: input graph is cyclic");

  ld.max_delta = 0;
  for (NodeId v = 0; v < n; ++v) ld.max_delta = std::max(ld.max_delta, ld.delta[v]);
  ld.layers.assign(ld.max_delta + 1, {});
  for (NodeId v = 0; v < n; ++v) ld.layers[ld.max_delta - ld.delta[v]].push_back(v);
  return ld;
}

}  // namespace radiogather
