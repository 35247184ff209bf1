#pragma once

#include <memory>
#include <string>
#include <vector>

#include "radiogather/digraph.hpp"

namespace radiogather {

/// Schedule contract for the gossip sub-protocol run inside the component
/// discovery frames. For size class j: if all nodes of one strongly connected
/// component A with |A| <= 2^j transmit per this schedule from a frame start,
/// aggregating everything they hear, and nothing outside A uses the frame's
/// frequency, then after frame_length(j, n) steps every member holds every
/// member's starting rumor.
class GossipSubprotocol {
 public:
  virtual ~GossipSubprotocol() = default;

  virtual std::string name() const = 0;

  /// T_SCC(j) over label space [n].
  virtual Step frame_length(int j, int n) const = 0;

  /// Whether node v transmits at `offset` steps into a frame of class j.
  virtual bool transmits_at(NodeId v, int n, int j, Step offset) const = 0;

  /// Smallest offset >= from at which v transmits; frame_length if none left.
  virtual Step next_transmit_offset(NodeId v, int n, int j, Step from) const;

  /// A deliberately faulty implementation may sit out whole frames; the
  /// protocol's safety tests must hold regardless.
  virtual bool participates(NodeId /*v*/, int /*j*/, std::int64_t /*frame*/) const {
    return true;
  }
};

/// 2^j full RoundRobin cycles over the label space; each cycle moves every
/// aggregated rumor at least one hop, and a k-node strong component has
/// diameter below k.
std::unique_ptr<GossipSubprotocol> make_simple_gossip();

/// SimpleGossip that deterministically sits out about half of its frames
/// (keyed on node, class, frame, and seed). Breaks liveness, must never
/// break the component-certification safety.
std::unique_ptr<GossipSubprotocol> make_broken_gossip(Seed seed);

/// Registry used by the CLI: "simple" or "broken-half".
std::unique_ptr<GossipSubprotocol> make_gossip(const std::string& name, Seed seed);

/// Contract harness: simulates one isolated frame of class j on the subgraph
/// induced by `component` (every member starts at the frame boundary with its
/// own label as the rumor and aggregates receptions into retransmissions).
/// Returns true iff gossip completed within the frame.
bool gossip_frame_complete(const Digraph& g, const std::vector<NodeId>& component,
                           const GossipSubprotocol& gossip, int j);

}  // namespace radiogather
