#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "radiogather/analysis.hpp"
#include "radiogather/arb_gather.hpp"
#include "radiogather/engine.hpp"
#include "radiogather/generators.hpp"
#include "radiogather/transforms.hpp"

namespace radiogather {

/// Model tweaks and reductions applied on top of a protocol's natural model.
struct ModelOverrides {
  int frequencies = 0;   // 0: natural
  int srt = -1;          // -1 natural, else 0/1
  int ack = -1;
  bool single_freq = false;  // apply the time-multiplex reduction
  bool no_srt = false;       // apply the SRT-stripping reduction (implies single_freq)
};

/// A protocol instance ready to run: possibly wrapped, with its model, step
/// budget, and the map from wrapped time back to protocol time.
struct ProtocolSetup {
  std::shared_ptr<ProtocolFactory> factory;
  NetworkModel model;
  Step budget = 0;      // before the budget multiplier
  TimeMap to_inner;     // wrapped (step, freq) -> protocol (step, freq)
  Step scale = 1;       // wrapped steps per protocol step
};

ProtocolSetup build_protocol_setup(const std::string& protocol, int n,
                                   const GatherConfig& cfg, const std::string& gossip_name,
                                   const ModelOverrides& overrides);

std::vector<std::string> protocol_names();

struct RunOutcome {
  Trace trace;
  RunReport report;
};

/// Runs one instance end to end and assembles the per-protocol verdicts:
/// completion, frequency discipline, activation ordering, stage-increment
/// budget and the per-instance completion bound (staged protocol),
/// component-certification safety and the frame budget (component protocol),
/// the claimed bound and the layer dormancy claims (ack protocol).
RunOutcome run_one(const Digraph& g, const std::string& protocol, const GatherConfig& cfg,
                   const std::string& gossip_name, const ModelOverrides& overrides,
                   const TraceOptions& trace_options, double budget_multiplier,
                   Seed graph_seed, bool full_checks);

struct ExperimentSpec {
  std::string protocol = "acyclic-gather";
  std::string gen_kind = "layered_dag";
  GenParams gen_params;
  std::vector<int> ns;
  int seeds_per_n = 5;
  Seed base_seed = 1;
  GatherConfig cfg;
  std::string gossip = "simple";
  ModelOverrides overrides;
  double budget_multiplier = 1.0;
  bool full_checks = false;  // per-run verdict suite (slower; full traces)
};

struct ExperimentResult {
  std::vector<RunReport> rows;  // ordered by (n, seed)
  double slope = 0.0;           // log-log completion vs n over per-n medians
  std::string csv;              // header, rows, trailing "# slope=..." comment
  bool all_pass = true;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

}  // namespace radiogather
