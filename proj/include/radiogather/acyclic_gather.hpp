#pragma once

#include <memory>

#include "radiogather/protocol.hpp"
#include "radiogather/selectors.hpp"

namespace radiogather {

/// Stage count for the staged selector protocol:
/// ceil((log2 n - log2 log2 n) / 2) + 2, at least 2.
int theta_for(int n);

/// Boundaries of the activity stages relative to a node's activation step.
/// beta[0] = 0, beta[j] = sum of selector rung lengths below j for
/// j <= theta-1, and beta[theta] = beta[theta-1] + n (the RoundRobin stage).
/// Stage j for j <= theta-2 runs selector rung j on frequency j; stage
/// theta-1 runs RoundRobin on frequency theta-1.
struct BetaSchedule {
  int theta = 0;
  int n = 0;
  std::vector<Step> beta;  // size theta + 1

  Step at(int j) const { return beta[j]; }
  Step activity_length() const { return beta[theta]; }
  /// Stage index for an offset inside [0, activity_length).
  int stage_of(Step offset) const;
};

BetaSchedule make_beta_schedule(const SelectorLadder& ladder, int theta, int n);

/// Node-local stage machinery shared by the staged protocols: once activated
/// at alpha, the node is active during [alpha, alpha + beta_theta), transmits
/// per the rung-j selector (on global time) during stage j on frequency
/// base_freq + j, per RoundRobin during the last stage, and attaches the
/// recommended wake-up step alpha + beta_{j+1} to every message.
class StagedTransmitter {
 public:
  StagedTransmitter(int n, NodeId self, std::shared_ptr<const SelectorLadder> ladder,
                    std::shared_ptr<const BetaSchedule> beta, Freq base_freq);

  void activate(Step alpha);
  bool activated() const { return alpha_ >= 0; }
  Step alpha() const { return alpha_; }
  int stage_at(Step now) const;  // -1 dormant, theta done

  /// Appends this step's transmission if one is scheduled; returns the wake
  /// hint (next step this machinery could act, kNeverStep when done/dormant).
  Step plan(Step now, std::vector<TxDecision>& out);

  LabelSet& rumors() { return rumors_; }
  const LabelSet& rumors() const { return rumors_; }
  void absorb(const LabelSet& more);

 private:
  std::shared_ptr<const LabelSet> snapshot();

  int n_;
  NodeId self_;
  std::shared_ptr<const SelectorLadder> ladder_;
  std::shared_ptr<const BetaSchedule> beta_;
  Freq base_freq_;
  Step alpha_ = -1;
  LabelSet rumors_;
  std::shared_ptr<const LabelSet> snapshot_;
};

struct GatherConfig {
  int c_strong = 16;
  int c_half = 16;
  int theta_override = 0;   // 0: use theta_for(n)
  int kappa_override = 0;   // 0: use ceil(log2 n) + 2 (ack protocol)
  Seed seed = 1;
  bool strength_bump = false;  // request strength k+1 per rung (no-SRT variant)
  BuildOptions build;
};

/// The staged information-gathering protocol for acyclic digraphs. A source
/// activates at step 0; any other node activates at the recommended wake-up
/// step of the last in-neighbor to first reach it, once all in-neighbors have
/// reached it. Uses theta frequencies. Deadlocks (by design) on cycles.
std::unique_ptr<ProtocolFactory> make_acyclic_gather(int n, const GatherConfig& cfg);

/// Step budget: activity length per critical-path hop, n hops at most.
Step acyclic_gather_budget(int n, const GatherConfig& cfg);

/// The schedule the protocol would use, for analyses and budget formulas.
BetaSchedule acyclic_beta_schedule(int n, const GatherConfig& cfg);

}  // namespace radiogather
