#include "radiogather/ack_gather.hpp"

#include <nlohmann/json.hpp>

namespace radiogather {

int kappa_for(int n) { return log2_ceil(n) + 2; }

namespace {

class AckGatherNode final : public NodeMachine {
 public:
  AckGatherNode(int n, NodeId self, int kappa, std::shared_ptr<const SelectorLadder> half,
                const std::vector<NodeId>& in_neighbors)
      : n_(n), self_(self), kappa_(kappa), half_(std::move(half)), rumors_(n) {
    rumors_.set(self_);
    active_ = in_neighbors.empty();
    if (active_)
      events_.push_back({0, self_, StateEvent::Kind::activated, 0, -1, {}, 0});
  }

  Step plan(Step now, std::vector<TxDecision>& out) override {
    if (!active_) return kNeverStep;
    if (!snapshot_) snapshot_ = std::make_shared<LabelSet>(rumors_);
    MessagePtr msg = make_ack_gather(self_, snapshot_);
    for (int j = 0; j + 1 < kappa_; ++j)
      if (half_->rung(j).schedule_transmits(self_, now)) out.push_back({j, msg});
    if (now % n_ == self_) out.push_back({kappa_ - 1, msg});
    // rung 0 is the full set, so an active node acts every step
    return now + 1;
  }

  void observe(Step, std::span<const ReceivedMessage> msgs) override {
    for (const auto& rm : msgs) {
      if (rm.msg->kind != Message::Kind::ack_gather || !rm.msg->rumors) continue;
      got_msg_ = true;
      if (!rm.msg->rumors->is_subset_of(rumors_)) {
        rumors_ |= *rm.msg->rumors;
        snapshot_.reset();
      }
    }
  }

  void on_ack(Step, bool delivered) override {
    if (delivered) got_ack_ = true;
  }

  void end_step(Step now) override {
    // acknowledgement first, reception second: a node that succeeded and
    // heard something in the same step ends it active again
    if (got_ack_ && active_) {
      active_ = false;
      events_.push_back({now, self_, StateEvent::Kind::deactivated, 0, 0, {}, 0});
    }
    if (got_msg_ && !active_) {
      active_ = true;
      events_.push_back({now, self_, StateEvent::Kind::activated, now, now, {}, 0});
    }
    got_ack_ = false;
    got_msg_ = false;
  }

  NodeView view() const override {
    NodeView v;
    v.rumors = &rumors_;
    v.mode = active_ ? 1 : 0;
    v.stage = -1;
    v.alpha = 0;
    return v;
  }

  void drain_events(std::vector<StateEvent>& sink) override {
    for (auto& ev : events_) sink.push_back(std::move(ev));
    events_.clear();
  }

 private:
  int n_;
  NodeId self_;
  int kappa_;
  std::shared_ptr<const SelectorLadder> half_;
  LabelSet rumors_;
  std::shared_ptr<const LabelSet> snapshot_;
  bool active_ = false;
  bool got_ack_ = false;
  bool got_msg_ = false;
  std::vector<StateEvent> events_;
};

class AckGatherFactory final : public ProtocolFactory {
 public:
  AckGatherFactory(int n, const GatherConfig& cfg) : n_(n), cfg_(cfg) {
    kappa_ = cfg.kappa_override > 0 ? cfg.kappa_override : kappa_for(n);
    auto ladder = build_half_ladder(n, std::max(kappa_ - 2, 0), cfg.c_half,
                                    derive_seed(cfg.seed, 0x4a1f), cfg.build);
    half_ = std::make_shared<SelectorLadder>(std::move(ladder));
  }

  std::string name() const override { return "ack-gather"; }

  NetworkModel natural_model(int) const override { return NetworkModel{kappa_, true, true}; }

  bool needs_in_neighbors() const override { return true; }

  void validate_model(const NetworkModel& model, int) const override {
    if (!model.ack)
      throw ConfigError("ack-gather: the model must deliver acknowledgements");
    if (model.frequencies < kappa_)
      throw ConfigError("ack-gather: model must provide kappa=" + std::to_string(kappa_) +
                        " frequencies");
  }

  std::unique_ptr<NodeMachine> make_node(int n, NodeId label,
                                         const std::vector<NodeId>& in_neighbors) override {
    if (n != n_) throw ConfigError("ack-gather: factory built for a different n");
    return std::make_unique<AckGatherNode>(n, label, kappa_, half_, in_neighbors);
  }

  nlohmann::json params(int) const override {
    nlohmann::json j{{"protocol", name()}, {"n", n_}, {"kappa", kappa_},
                     {"c_half", cfg_.c_half}, {"log_n", half_->log_n}};
    std::vector<std::size_t> lengths;
    for (int r = 0; r <= half_->max_j(); ++r) lengths.push_back(half_->rung_length(r));
    j["rung_lengths"] = lengths;
    return j;
  }

 private:
  int n_;
  GatherConfig cfg_;
  int kappa_;
  std::shared_ptr<const SelectorLadder> half_;
};

}  // namespace

std::unique_ptr<ProtocolFactory> make_ack_gather(int n, const GatherConfig& cfg) {
  return std::make_unique<AckGatherFactory>(n, cfg);
}

Step ack_gather_bound(int n, const GatherConfig& cfg) {
  return 4LL * cfg.c_half * n * log2_ceil(n);
}

std::vector<Step> ack_layer_deadlines(const std::vector<std::size_t>& layer_sizes, int n,
                                      const GatherConfig& cfg) {
  std::vector<Step> tau(layer_sizes.size() + 1, 0);
  Step acc = 0;
  for (std::size_t i = 0; i < layer_sizes.size(); ++i) {
    tau[i] = 4LL * cfg.c_half * acc * log2_ceil(n);
    acc += static_cast<Step>(layer_sizes[i]);
  }
  tau[layer_sizes.size()] = 4LL * cfg.c_half * acc * log2_ceil(n);
  return tau;
}

}  // namespace radiogather
