#include "radiogather/gossip.hpp"

#include <algorithm>

namespace radiogather {

Step GossipSubprotocol::next_transmit_offset(NodeId v, int n, int j, Step from) const {
  const Step len = frame_length(j, n);
  for (Step o = from; o < len; ++o)
    if (transmits_at(v, n, j, o)) return o;
  return len;
}

namespace {

class SimpleGossip final : public GossipSubprotocol {
 public:
  std::string name() const override { return "simple"; }

  Step frame_length(int j, int n) const override {
    return (static_cast<Step>(1) << j) * n;
  }

  bool transmits_at(NodeId v, int n, int, Step offset) const override {
    return offset % n == v;
  }

  Step next_transmit_offset(NodeId v, int n, int j, Step from) const override {
    const Step len = frame_length(j, n);
    if (from >= len) return len;
    const Step next = from + (v - from % n + n) % n;
    return next < len ? next : len;
  }
};

class BrokenGossip final : public GossipSubprotocol {
 public:
  explicit BrokenGossip(Seed seed) : seed_(seed) {}

  std::string name() const override { return "broken-half"; }

  Step frame_length(int j, int n) const override {
    return (static_cast<Step>(1) << j) * n;
  }

  bool transmits_at(NodeId v, int n, int, Step offset) const override {
    return offset % n == v;
  }

  Step next_transmit_offset(NodeId v, int n, int j, Step from) const override {
    const Step len = frame_length(j, n);
    if (from >= len) return len;
    const Step next = from + (v - from % n + n) % n;
    return next < len ? next : len;
  }

  bool participates(NodeId v, int j, std::int64_t frame) const override {
    const std::uint64_t h = splitmix64(seed_ ^ splitmix64(static_cast<std::uint64_t>(v) |
                                                          (static_cast<std::uint64_t>(j) << 20) |
                                                          (static_cast<std::uint64_t>(frame) << 28)));
    return (h & 1) == 0;
  }

 private:
  Seed seed_;
};

}  // namespace

std::unique_ptr<GossipSubprotocol> make_simple_gossip() {
  return std::make_unique<SimpleGossip>();
}

std::unique_ptr<GossipSubprotocol> make_broken_gossip(Seed seed) {
  return std::make_unique<BrokenGossip>(seed);
}

std::unique_ptr<GossipSubprotocol> make_gossip(const std::string& name, Seed seed) {
  if (name == "simple") return make_simple_gossip();
  if (name == "broken-half") return make_broken_gossip(seed);
  throw ConfigError("unknown gossip implementation '" + name + "'");
}

bool gossip_frame_complete(const Digraph& g, const std::vector<NodeId>& component,
                           const GossipSubprotocol& gossip, int j) {
  const int n = g.n();
  std::vector<char> member(n, 0);
  for (NodeId v : component) member[v] = 1;
  std::vector<LabelSet> held(n, LabelSet(n));
  for (NodeId v : component) held[v].set(v);

  const Step len = gossip.frame_length(j, n);
  std::vector<NodeId> transmitters;
  std::vector<int> hits(n, 0);
  std::vector<NodeId> cand(n, -1);
  std::vector<std::pair<NodeId, LabelSet>> updates;  // carries pre-step sender state
  for (Step off = 0; off < len; ++off) {
    transmitters.clear();
    for (NodeId v : component)
      if (gossip.participates(v, j, 0) && gossip.transmits_at(v, n, j, off))
        transmitters.push_back(v);
    std::vector<NodeId> touched;
    for (NodeId u : transmitters)
      for (NodeId w : g.out_neighbors(u)) {
        if (!member[w]) continue;
        if (++hits[w] == 1) {
          cand[w] = u;
          touched.push_back(w);
        }
      }
    updates.clear();
    for (NodeId w : touched) {
      if (hits[w] == 1) updates.emplace_back(w, held[cand[w]]);
      hits[w] = 0;
      cand[w] = -1;
    }
    for (auto& [w, got] : updates) held[w] |= got;
  }

  LabelSet all(n);
  for (NodeId v : component) all.set(v);
  return std::all_of(component.begin(), component.end(),
                     [&](NodeId v) { return all.is_subset_of(held[v]); });
}

}  // namespace radiogather
