#pragma once

#include <memory>

#include "radiogather/acyclic_gather.hpp"

namespace radiogather {

/// Frequency count for the acknowledgement protocol: ceil(log2 n) + 2.
int kappa_for(int n);

/// Gathering with 1-bit transmission acknowledgements on acyclic digraphs.
/// Sources start active, everyone else dormant. An active node transmits the
/// half-selector rung j schedule on frequency j (j = 0..kappa-2) and
/// RoundRobin on frequency kappa-1, all carrying its full rumor set. An
/// active node goes dormant on an acknowledged step; a node that receives a
/// transmission becomes (or stays) active -- reception is applied after the
/// acknowledgement, so a node can deactivate and reactivate within one step.
std::unique_ptr<ProtocolFactory> make_ack_gather(int n, const GatherConfig& cfg);

/// The claimed completion bound, 4 * c_half * n * ceil(log2 n); used both as
/// the budget and as the acceptance threshold (strict).
Step ack_gather_bound(int n, const GatherConfig& cfg);

/// tau_i = 4 * c_half * (|B_0| + ... + |B_{i-1}|) * ceil(log2 n): the layer
/// dormancy deadlines the analysis checks.
std::vector<Step> ack_layer_deadlines(const std::vector<std::size_t>& layer_sizes, int n,
                                      const GatherConfig& cfg);

}  // namespace radiogather
