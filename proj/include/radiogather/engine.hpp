#pragma once

#include <functional>

#include "radiogather/digraph.hpp"
#include "radiogather/trace.hpp"

namespace radiogather {

enum class RunUntil {
  completion,                        // stop once t holds all n rumors
  completion_and_target_activation,  // additionally wait for t's activation (path analyses)
  budget,                            // run the full step budget regardless
};

struct RunOptions {
  Step max_steps = 0;  // 0: use the factory's natural budget via run_gathering callers
  RunUntil until = RunUntil::completion;
  TraceOptions trace;
  bool discover = true;  // run the RoundRobin label preprocessing when the protocol asks
  std::function<void(Step, Freq, NodeId /*receiver*/, NodeId /*sender*/, const Message&)>
      on_delivery;  // streaming observer; fires for every successful delivery
};

/// Transmitter label of the preprocessing schedule at `step`: one RoundRobin
/// cycle in which each node announces only its own label on frequency 0.
inline NodeId discovery_transmitter(Step step, int n) {
  return static_cast<NodeId>(step % n);
}

struct DiscoveryResult {
  std::vector<std::vector<NodeId>> in_neighbors;  // discovered, sorted
  Trace trace;                                    // the n-step label exchange
};

/// Simulates the n-step preprocessing cycle. RoundRobin is collision-free, so
/// after n steps every node has heard each in-neighbor exactly once.
DiscoveryResult discover_in_neighbors(const Digraph& g, bool record_trace = false);

/// Executes a run: per step, every due node plans its transmissions, the
/// collision rule yields deliveries per frequency, acks follow (when the
/// model has them), and only then do nodes observe. A transmission can
/// therefore never depend on same-step receptions.
Trace run(const Digraph& g, ProtocolFactory& factory, const NetworkModel& model,
          const RunOptions& opts);

}  // namespace radiogather
