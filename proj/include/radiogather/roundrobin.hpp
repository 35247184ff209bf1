#pragma once

#include <memory>

#include "radiogather/protocol.hpp"

namespace radiogather {

/// Every node cyclically transmits its full rumor set: node w transmits at
/// step tau iff w == tau mod n, on frequency 0. Collision-free, works on any
/// digraph with the target reachable. O(n^2) completion.
std::unique_ptr<ProtocolFactory> make_roundrobin();

/// Safe step budget: one cycle per hop along any path, n hops at most.
Step roundrobin_budget(int n);

}  // namespace radiogather
