#pragma once

#include <memory>

#include "radiogather/acyclic_gather.hpp"
#include "radiogather/gossip.hpp"

namespace radiogather {

/// Gathering protocol for arbitrary digraphs: a component-discovery
/// subroutine gossips on theta' = ceil(log2 n) dedicated frequencies (class j
/// on frequency theta + j, in frames of length T_SCC(j)), while the staged
/// acyclic protocol carries rumors between components on frequencies
/// 0..theta-1. A node alternates even frames (gossip its label) and odd
/// frames (gossip its [v, C~, N^-, N~acy, R] vector), then checks:
///   Test 1: C~(u) == C~(v) for every u in C~(v)
///   Test 2: C~(v) == C~'(v)
///   Test 3: N^-(u) \ N~acy(u) is contained in C~(v) for every u in C~(v)
/// Passing all three certifies C~(v) as the node's strongly connected
/// component; the node then stops gossiping and starts the staged subroutine
/// at the frame boundary, seeded with the union of the gossiped rumor sets.
std::unique_ptr<ProtocolFactory> make_arb_gather(int n, const GatherConfig& cfg,
                                                 std::shared_ptr<const GossipSubprotocol> gossip);

int scc_frequency_count(int n);  // theta'

/// Per-run budget and completion bound: two frames per component's size class
/// plus the staged-protocol allowance over the condensation.
Step arb_gather_budget(int n, const GatherConfig& cfg, const GossipSubprotocol& gossip,
                       const SccPartition& scc);

}  // namespace radiogather
