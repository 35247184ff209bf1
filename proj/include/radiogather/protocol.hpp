#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "radiogather/message.hpp"
#include "radiogather/model.hpp"

namespace radiogather {

struct TxDecision {
  Freq freq;
  MessagePtr msg;
};

struct ReceivedMessage {
  Freq freq;
  MessagePtr msg;  // sender is inside the message
};

/// State-change record a node reports to the trace.
struct StateEvent {
  enum class Kind : std::uint8_t {
    activated,    // a = activation step alpha, b = step the decision was made
    deactivated,  // ack protocol: moved to dormant
    scc_pass,     // a = size class j, b = double-frame index r; members = C~(v)
    anomaly,      // message arrived after the activity period ended
  };
  Step step;
  NodeId node;
  Kind kind;
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::vector<NodeId> members;
  std::uint64_t rumor_hash = 0;  // scc_pass: hash of the rumor union at switch
};

/// Read-only view of a node used by the engine for termination checks,
/// snapshots, and final-state records.
struct NodeView {
  const LabelSet* rumors = nullptr;  // bookkeeping rumor set
  int mode = 0;                      // protocol-specific; 0 dormant, 1 active, 2 done
  int stage = -1;                    // gather protocols: -1..theta
  Step alpha = -1;                   // activation step, when known
};

/// One node's protocol state machine. The engine drives it with:
///   plan -> (deliveries computed) -> observe -> on_ack -> end_step.
/// Transmissions planned at a step may depend only on what was received
/// strictly before that step; the call order makes a violation impossible.
class NodeMachine {
 public:
  virtual ~NodeMachine() = default;

  /// Appends this step's transmissions and returns the next step at which the
  /// node may transmit assuming it receives no further input (kNeverStep if
  /// only input could rouse it). The engine re-polls earlier on any input.
  virtual Step plan(Step now, std::vector<TxDecision>& out) = 0;

  /// Deliveries for this step; at most one message per frequency in direct
  /// runs, possibly several under the model-reduction wrappers.
  virtual void observe(Step now, std::span<const ReceivedMessage> msgs) = 0;

  /// Called only when this node transmitted and the model has acks.
  virtual void on_ack(Step /*now*/, bool /*delivered*/) {}

  /// Called after observe/on_ack on steps with input, so state transitions
  /// that depend on the whole step can be applied in one place.
  virtual void end_step(Step /*now*/) {}

  virtual NodeView view() const = 0;

  /// Moves any pending state events into `sink`.
  virtual void drain_events(std::vector<StateEvent>& sink) { (void)sink; }
};

/// Instantiates one state machine per node. Ad-hoc discipline: a node gets
/// its own label, n, and (when the protocol opts into the RoundRobin
/// preprocessing) its discovered in-neighbor labels. Never the graph.
class ProtocolFactory {
 public:
  virtual ~ProtocolFactory() = default;

  virtual std::string name() const = 0;
  virtual NetworkModel natural_model(int n) const = 0;
  virtual bool needs_in_neighbors() const { return false; }

  /// Throws ConfigError on a protocol/model mismatch.
  virtual void validate_model(const NetworkModel& model, int n) const = 0;

  virtual std::unique_ptr<NodeMachine> make_node(int n, NodeId label,
                                                 const std::vector<NodeId>& in_neighbors) = 0;

  /// Metadata recorded in traces so analyses are self-contained.
  virtual nlohmann::json params(int n) const;
};

}  // namespace radiogather
