#include "radiogather/acyclic_gather.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace radiogather {

int theta_for(int n) {
  if (n <= 2) return 2;
  const double log_n = std::log2(static_cast<double>(n));
  const double inner = (log_n - std::log2(log_n)) / 2.0;
  int theta = static_cast<int>(std::ceil(inner)) + 2;
  return std::max(theta, 2);
}

int BetaSchedule::stage_of(Step offset) const {
  for (int j = 0; j < theta; ++j)
    if (offset < beta[j + 1]) return j;
  return theta;
}

BetaSchedule make_beta_schedule(const SelectorLadder& ladder, int theta, int n) {
  if (ladder.max_j() < theta - 2)
    throw ConfigError("beta schedule: ladder too short for theta");
  BetaSchedule bs;
  bs.theta = theta;
  bs.n = n;
  bs.beta.assign(theta + 1, 0);
  for (int j = 1; j <= theta - 1; ++j)
    bs.beta[j] = bs.beta[j - 1] + static_cast<Step>(ladder.rung_length(j - 1));
  bs.beta[theta] = bs.beta[theta - 1] + n;
  return bs;
}

StagedTransmitter::StagedTransmitter(int n, NodeId self,
                                     std::shared_ptr<const SelectorLadder> ladder,
                                     std::shared_ptr<const BetaSchedule> beta,
                                     Freq base_freq)
    : n_(n), self_(self), ladder_(std::move(ladder)), beta_(std::move(beta)),
      base_freq_(base_freq), rumors_(n) {
  rumors_.set(self_);
}

void StagedTransmitter::activate(Step alpha) { alpha_ = alpha; }

int StagedTransmitter::stage_at(Step now) const {
  if (alpha_ < 0 || now < alpha_) return -1;
  return beta_->stage_of(now - alpha_);
}

void StagedTransmitter::absorb(const LabelSet& more) {
  if (more.is_subset_of(rumors_)) return;
  rumors_ |= more;
  snapshot_.reset();
}

std::shared_ptr<const LabelSet> StagedTransmitter::snapshot() {
  if (!snapshot_) snapshot_ = std::make_shared<LabelSet>(rumors_);
  return snapshot_;
}

Step StagedTransmitter::plan(Step now, std::vector<TxDecision>& out) {
  if (alpha_ < 0) return kNeverStep;
  if (now < alpha_) return alpha_;
  const Step offset = now - alpha_;
  if (offset >= beta_->activity_length()) return kNeverStep;
  const int j = beta_->stage_of(offset);
  const Step stage_end = alpha_ + beta_->at(j + 1);
  const Step rws = alpha_ + beta_->at(j + 1);
  if (j == beta_->theta - 1) {
    // last stage: RoundRobin on its own frequency
    if (now % n_ == self_)
      out.push_back({base_freq_ + j, make_gather(self_, snapshot(), rws)});
    const Step next_slot = now + 1 + (self_ - (now + 1) % n_ + n_) % n_;
    return std::min(next_slot, stage_end);
  }
  const SelectorFamily& family = ladder_->rung(j);
  if (family.schedule_transmits(self_, now))
    out.push_back({base_freq_ + j, make_gather(self_, snapshot(), rws)});
  const Step next_tx = family.next_transmit_step(self_, now + 1);
  return std::min(next_tx, stage_end);
}

namespace {

class AcyclicGatherNode final : public NodeMachine {
 public:
  AcyclicGatherNode(int n, NodeId self, std::shared_ptr<const SelectorLadder> ladder,
                    std::shared_ptr<const BetaSchedule> beta,
                    const std::vector<NodeId>& in_neighbors)
      : n_(n), self_(self), beta_(beta), core_(n, self, std::move(ladder), beta, 0),
        in_nbrs_(n), first_rws_(n, -1), first_step_(n, kNeverStep) {
    for (NodeId u : in_neighbors) in_nbrs_.set(u);
    remaining_ = static_cast<int>(in_neighbors.size());
    if (remaining_ == 0) {
      core_.activate(0);
      events_.push_back({0, self_, StateEvent::Kind::activated, 0, -1, {}, 0});
    }
  }

  Step plan(Step now, std::vector<TxDecision>& out) override {
    last_seen_ = std::max(last_seen_, now);
    return core_.plan(now, out);
  }

  void observe(Step now, std::span<const ReceivedMessage> msgs) override {
    last_seen_ = std::max(last_seen_, now);
    const bool was_done = core_.stage_at(now) >= beta_->theta;
    for (const auto& rm : msgs) {
      if (rm.msg->kind != Message::Kind::gather || !rm.msg->rumors) continue;
      if (was_done && !rm.msg->rumors->is_subset_of(core_.rumors())) {
        // late novel information: never re-activate, flag the trace instead
        events_.push_back({now, self_, StateEvent::Kind::anomaly, rm.msg->sender, 0, {}, 0});
      }
      core_.absorb(*rm.msg->rumors);
      const NodeId u = rm.msg->sender;
      if (in_nbrs_.test(u) && first_step_[u] == kNeverStep) {
        first_step_[u] = now;
        first_rws_[u] = rm.msg->rws;
        --remaining_;
        if (remaining_ == 0 && !core_.activated()) {
          // the last in-neighbor(s) arrived this step; the largest pending
          // recommendation wins, largest label breaking remaining ties
          Step best_rws = -1;
          NodeId best = -1;
          for (NodeId c = 0; c < n_; ++c) {
            if (!in_nbrs_.test(c) || first_step_[c] != now) continue;
            if (first_rws_[c] > best_rws || (first_rws_[c] == best_rws && c > best)) {
              best_rws = first_rws_[c];
              best = c;
            }
          }
          core_.activate(best_rws);
          events_.push_back({best_rws, self_, StateEvent::Kind::activated, best_rws, now, {}, 0});
        }
      }
    }
  }

  NodeView view() const override {
    NodeView v;
    v.rumors = &core_.rumors();
    const int stage = core_.stage_at(last_seen_);
    v.stage = stage;
    v.mode = stage < 0 ? 0 : (stage >= beta_->theta ? 2 : 1);
    v.alpha = core_.activated() ? core_.alpha() : -1;
    return v;
  }

  void drain_events(std::vector<StateEvent>& sink) override {
    for (auto& ev : events_) sink.push_back(std::move(ev));
    events_.clear();
  }

 private:
  int n_;
  NodeId self_;
  std::shared_ptr<const BetaSchedule> beta_;
  StagedTransmitter core_;
  LabelSet in_nbrs_;
  std::vector<Step> first_rws_;
  std::vector<Step> first_step_;
  int remaining_ = 0;
  Step last_seen_ = 0;
  std::vector<StateEvent> events_;
};

class AcyclicGatherFactory final : public ProtocolFactory {
 public:
  AcyclicGatherFactory(int n, const GatherConfig& cfg) : n_(n), cfg_(cfg) {
    theta_ = cfg.theta_override > 0 ? cfg.theta_override : theta_for(n);
    auto ladder = build_strong_ladder(n, std::max(theta_ - 2, 0), cfg.c_strong,
                                      derive_seed(cfg.seed, 0xacdc), cfg.build,
                                      cfg.strength_bump);
    ladder_ = std::make_shared<SelectorLadder>(std::move(ladder));
    beta_ = std::make_shared<BetaSchedule>(make_beta_schedule(*ladder_, theta_, n));
  }

  std::string name() const override { return "acyclic-gather"; }

  NetworkModel natural_model(int) const override { return NetworkModel{theta_, true, false}; }

  bool needs_in_neighbors() const override { return true; }

  void validate_model(const NetworkModel& model, int) const override {
    if (model.frequencies < theta_)
      throw ConfigError("acyclic-gather: model must provide at least theta=" +
                        std::to_string(theta_) + " frequencies");
  }

  std::unique_ptr<NodeMachine> make_node(int n, NodeId label,
                                         const std::vector<NodeId>& in_neighbors) override {
    if (n != n_) throw ConfigError("acyclic-gather: factory built for a different n");
    return std::make_unique<AcyclicGatherNode>(n, label, ladder_, beta_, in_neighbors);
  }

  nlohmann::json params(int) const override {
    nlohmann::json j{{"protocol", name()}, {"n", n_}, {"theta", theta_},
                     {"c_strong", cfg_.c_strong}, {"log_n", ladder_->log_n},
                     {"beta", beta_->beta}};
    std::vector<std::size_t> lengths;
    for (int r = 0; r <= ladder_->max_j(); ++r) lengths.push_back(ladder_->rung_length(r));
    j["rung_lengths"] = lengths;
    return j;
  }

  const BetaSchedule& beta() const { return *beta_; }

 private:
  int n_;
  GatherConfig cfg_;
  int theta_;
  std::shared_ptr<const SelectorLadder> ladder_;
  std::shared_ptr<const BetaSchedule> beta_;
};

}  // namespace

std::unique_ptr<ProtocolFactory> make_acyclic_gather(int n, const GatherConfig& cfg) {
  return std::make_unique<AcyclicGatherFactory>(n, cfg);
}

BetaSchedule acyclic_beta_schedule(int n, const GatherConfig& cfg) {
  const int theta = cfg.theta_override > 0 ? cfg.theta_override : theta_for(n);
  SelectorLadder shape;  // lengths only; no families needed for the formula
  shape.n = n;
  shape.kind = SelectorKind::strong;
  shape.c = cfg.c_strong;
  shape.log_n = log2_ceil(n);
  shape.rungs.resize(std::max(theta - 1, 1));
  return make_beta_schedule(shape, theta, n);
}

Step acyclic_gather_budget(int n, const GatherConfig& cfg) {
  return acyclic_beta_schedule(n, cfg).activity_length() * (n + 1);
}

}  // namespace radiogather
