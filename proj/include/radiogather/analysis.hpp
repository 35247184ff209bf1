#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "radiogather/digraph.hpp"
#include "radiogather/trace.hpp"

namespace radiogather {

/// First step after which the target held all n rumors, re-derived from the
/// recorded rumor-carrying deliveries (independent of the engine's own
/// bookkeeping); std::nullopt if the record never completes. Requires full
/// delivery detail. Matches the engine for the protocols whose rumor flow is
/// entirely message-borne (roundrobin, acyclic-gather, ack-gather); the
/// component protocol also moves rumors through its certification vectors,
/// so its runs are reported from the engine's completion field.
std::optional<Step> completion_time(const Trace& t, const Digraph& g);

/// Activation steps per node, from the trace events (-1 when never activated).
std::vector<Step> activation_steps(const Trace& t);

/// First delivery step and carried wake-up recommendation per edge (u, v).
struct FirstContact {
  Step step = kNeverStep;
  Step rws = -1;
};
std::vector<std::map<NodeId, FirstContact>> first_contacts(const Trace& t);

/// Backward-built chain v_0..v_p = t: each predecessor is the in-neighbor
/// whose first message arrived last (largest recommendation, then largest
/// label, breaking ties), ending at a source. Each consecutive pair must
/// satisfy alpha(v_{a+1}) == rws1(v_a, v_{a+1}); a mismatch throws, since it
/// indicates an engine defect rather than a protocol property.
std::vector<NodeId> critical_path(const Trace& t, const Digraph& g);

/// Number of (node, stage-index) increments whose step lies in [lo, hi).
/// A node activated at alpha increments at alpha + beta_j for j = 0..theta,
/// theta + 1 increments in total. Stage boundaries come from the trace params.
long long stage_increments(const Trace& t, Step lo, Step hi);

/// Transmission records whose frequency contradicts the sender's stage (or
/// gossip class); zero on a conforming trace.
long long frequency_discipline_violations(const Trace& t);

/// Activated events of non-source nodes whose in-neighbors had not all
/// delivered by the decision step; zero on a conforming trace.
long long activation_order_violations(const Trace& t, const Digraph& g);

/// scc_pass events whose member list differs from the true component.
long long scc_pass_violations(const Trace& t, const SccPartition& scc);

struct LayerClaimVerdict {
  bool dormancy = true;    // claim (i)
  bool containment = true; // claim (ii)
  Step tau = 0;
};

struct LayerClaimReport {
  std::vector<LayerClaimVerdict> per_layer;
  bool all_pass() const;
};

/// Checks the layered dormancy argument on an acknowledgement-protocol trace:
/// at each deadline tau_i every node of the layers above must be dormant and
/// stay dormant, and every rumor must already sit in layer i or deeper. The
/// trace must carry snapshots at exactly the tau_i steps.
LayerClaimReport check_layer_claim(const Trace& t, const LayerDecomposition& layers,
                                   int c_half);

/// Least-squares slope of log2(y) against log2(x).
double loglog_slope(const std::vector<std::pair<double, double>>& points);

/// Everything a run sweep wants to persist about one run.
struct RunReport {
  std::string run_id;
  std::string protocol;
  std::string model;
  int n = 0;
  Seed seed = 0;
  Step completion_step = -1;
  Step terminal_step = -1;
  Step budget = 0;
  Step bound_value = 0;
  double margin = 0.0;  // (bound - completion) / bound
  bool budget_hit = false;
  long long anomalies = 0;
  long long stage_increment_total = -1;
  std::vector<NodeId> critical_path;
  std::map<std::string, bool> verdicts;

  bool all_verdicts_pass() const;
  std::string to_json_string() const;
  static std::string csv_header();
  std::string csv_row() const;
};

}  // namespace radiogather
