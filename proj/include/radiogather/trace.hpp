#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "radiogather/digraph.hpp"
#include "radiogather/protocol.hpp"

namespace radiogather {

struct TransmitRec {
  Step step;
  Freq freq;
  NodeId sender;
  std::uint32_t payload;  // index into Trace::payloads
};

struct DeliveryRec {
  Step step;
  Freq freq;
  NodeId receiver;
  NodeId sender;
  std::uint32_t payload;
};

struct AckRec {
  Step step;
  NodeId node;
  bool delivered;
};

enum class DeliveryDetail { all, first_pair, none };

/// What a run records. Full detail is the default; the scaling sweeps use the
/// slim settings since only events and completion feed those analyses.
struct TraceOptions {
  bool record_transmits = true;
  DeliveryDetail deliveries = DeliveryDetail::all;
  bool record_acks = true;
  bool full_payload_json = true;             // rumor lists vs count+hash in exports
  std::vector<Step> snapshot_steps;          // state captured before each listed step
};

struct NodeSnapshot {
  int mode = 0;
  int stage = -1;
  Step alpha = -1;
  LabelSet rumors;
};

struct TraceSnapshot {
  Step at;  // state is as of "time at": after all steps < at
  std::vector<NodeSnapshot> nodes;
};

/// Full deterministic record of one run. Records are in execution order; a
/// step with no traffic contributes nothing but is still covered by the dense
/// step range [0, terminal_step].
struct Trace {
  int n = 0;
  NodeId target = -1;
  std::string protocol;
  NetworkModel model;
  Seed seed = 0;
  Step preprocess_steps = 0;
  std::string params_text;  // protocol parameters as JSON (theta, betas, ...)

  std::vector<MessagePtr> payloads;
  std::vector<TransmitRec> transmits;
  std::vector<DeliveryRec> deliveries;
  std::vector<AckRec> acks;
  std::vector<StateEvent> events;
  std::vector<TraceSnapshot> snapshots;

  Step terminal_step = -1;        // last executed step
  Step completion_step = -1;      // first step after which t held all rumors; -1 if never
  bool budget_hit = false;
  long long anomalies = 0;
  std::vector<NodeSnapshot> final_states;
  TraceOptions options;

  bool complete() const { return completion_step >= 0; }

  /// One JSON object per line: header, per-step records, events, snapshots,
  /// terminal summary. Byte-stable given identical inputs.
  std::string to_jsonl() const;
  static Trace from_jsonl(const std::string& text);
  void save(const std::string& path) const;
  static Trace load(const std::string& path);

  /// One-line CSV summary (run id, n, protocol, model, completion, budget).
  static std::string csv_header();
  std::string csv_row(const std::string& run_id) const;
};

/// Per-step outcome view rebuilt from the record, for semantic checks.
/// outcome: 0 = silence, 1 = delivered, 2 = collision (>= 2 transmitters),
/// 3 = reception dropped because the receiver transmitted with srt off.
struct StepOutcome {
  int outcome = 0;
  NodeId sender = -1;
  const Message* msg = nullptr;
};
StepOutcome step_outcome(const Trace& t, const Digraph& g, Step step, Freq freq,
                         NodeId receiver);

/// Deliveries of `t` pulled back through a time map, as canonical tuples
/// (step, freq, sender, receiver, payload fingerprint).
struct DeliveryKey {
  Step step;
  Freq freq;
  NodeId sender;
  NodeId receiver;
  std::uint64_t payload_fp;
  auto operator<=>(const DeliveryKey&) const = default;
};

}  // namespace radiogather
