#include "radiogather/transforms.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace radiogather {

namespace {

/// Shared round/segment bookkeeping: the wrapped step index is now / width.
/// Inner input collected during a window is flushed when the window closes,
/// either eagerly (input on the last sub-step) or lazily at the next plan().
class WindowedWrapperNode : public NodeMachine {
 public:
  WindowedWrapperNode(std::unique_ptr<NodeMachine> inner, Step width, bool inner_ack)
      : inner_(std::move(inner)), width_(width), inner_ack_(inner_ack) {}

  void observe(Step now, std::span<const ReceivedMessage> msgs) override {
    buffer_window_ = now / width_;
    for (const auto& rm : msgs) store(rm);
  }

  void on_ack(Step now, bool delivered) override {
    buffer_window_ = now / width_;
    pending_ack_ = true;
    ack_value_ = ack_value_ || delivered;
  }

  void end_step(Step now) override {
    if (now % width_ == width_ - 1) flush(now / width_);
  }

  NodeView view() const override { return inner_->view(); }

  void drain_events(std::vector<StateEvent>& sink) override {
    std::vector<StateEvent> tmp;
    inner_->drain_events(tmp);
    for (auto& ev : tmp) {
      ev.step *= width_;
      sink.push_back(std::move(ev));
    }
  }

 protected:
  /// Subclasses map a received sub-step message into the inner delivery list.
  virtual void store(const ReceivedMessage& rm) = 0;

  void flush_completed(Step current_window) {
    if (buffer_window_ >= 0 && buffer_window_ < current_window) flush(buffer_window_);
  }

  /// Polls the inner protocol for `window` if it is due; returns its
  /// transmissions for the window (may be empty).
  const std::vector<TxDecision>& inner_plan(Step window) {
    inner_decisions_.clear();
    if (inner_wake_ <= window || inner_input_) {
      inner_wake_ = inner_->plan(window, inner_decisions_);
      if (inner_wake_ <= window) inner_wake_ = window + 1;
      inner_input_ = false;
    }
    return inner_decisions_;
  }

  /// Window the inner protocol next needs, given no further input.
  Step inner_target_window(Step current_window) const {
    if (inner_input_) return current_window + 1;
    return inner_wake_;
  }

  bool window_has_input(Step window) const {
    return buffer_window_ == window && (!inner_buffer_.empty() || pending_ack_);
  }

  std::unique_ptr<NodeMachine> inner_;
  Step width_;
  bool inner_ack_;
  std::vector<ReceivedMessage> inner_buffer_;
  Step buffer_window_ = -1;
  bool pending_ack_ = false;
  bool ack_value_ = false;
  Step inner_wake_ = 0;
  bool inner_input_ = false;

 private:
  void flush(Step window) {
    if (!inner_buffer_.empty()) {
      std::stable_sort(inner_buffer_.begin(), inner_buffer_.end(),
                       [](const ReceivedMessage& a, const ReceivedMessage& b) {
                         if (a.freq != b.freq) return a.freq < b.freq;
                         return a.msg->sender < b.msg->sender;
                       });
      inner_->observe(window, inner_buffer_);
      inner_buffer_.clear();
      inner_input_ = true;
    }
    if (inner_ack_ && pending_ack_) {
      inner_->on_ack(window, ack_value_);
      inner_input_ = true;
    }
    if (inner_input_) inner_->end_step(window);
    pending_ack_ = false;
    ack_value_ = false;
    buffer_window_ = -1;
  }

  std::vector<TxDecision> inner_decisions_;
};

/// Replays one inner step across a kappa-step round on a single frequency:
/// the inner frequency-f message goes out at sub-step f.
class MultiplexNode final : public WindowedWrapperNode {
 public:
  MultiplexNode(std::unique_ptr<NodeMachine> inner, int kappa, bool inner_ack)
      : WindowedWrapperNode(std::move(inner), kappa, inner_ack), round_plan_(kappa) {}

  Step plan(Step now, std::vector<TxDecision>& out) override {
    const Step round = now / width_;
    const Freq sub = static_cast<Freq>(now % width_);
    flush_completed(round);
    if (round != planned_round_) {
      for (auto& m : round_plan_) m = nullptr;
      for (const auto& d : inner_plan(round)) {
        if (d.freq < 0 || d.freq >= static_cast<Freq>(round_plan_.size()))
          throw ConfigError("multiplex: inner frequency out of range");
        round_plan_[d.freq] = d.msg;
      }
      planned_round_ = round;
    }
    if (round_plan_[sub]) out.push_back({0, round_plan_[sub]});

    for (Freq f = sub + 1; f < static_cast<Freq>(round_plan_.size()); ++f)
      if (round_plan_[f]) return round * width_ + f;
    if (window_has_input(round)) return (round + 1) * width_;
    const Step target = inner_target_window(round);
    if (target == kNeverStep) return kNeverStep;
    return target * width_;
  }

 protected:
  void store(const ReceivedMessage& rm) override {
    // sub-step index is the inner frequency; recover it from the buffer step
    inner_buffer_.push_back({last_sub_, rm.msg});
  }

  void observe(Step now, std::span<const ReceivedMessage> msgs) override {
    last_sub_ = static_cast<Freq>(now % width_);
    WindowedWrapperNode::observe(now, msgs);
  }

 private:
  std::vector<MessagePtr> round_plan_;
  Step planned_round_ = -1;
  Freq last_sub_ = 0;
};

/// Serializes each inner step over a segment scheduled by a strong
/// (n,2)-selector so nobody must receive while transmitting.
class StripSrtNode final : public WindowedWrapperNode {
 public:
  StripSrtNode(std::unique_ptr<NodeMachine> inner, NodeId self, SelectorFamilyPtr wrap,
               bool inner_ack)
      : WindowedWrapperNode(std::move(inner), static_cast<Step>(wrap->length()), inner_ack),
        self_(self), wrap_(std::move(wrap)) {}

  Step plan(Step now, std::vector<TxDecision>& out) override {
    const Step seg = now / width_;
    const Step sub = now % width_;
    flush_completed(seg);
    if (seg != planned_seg_) {
      seg_msg_ = nullptr;
      const auto& decisions = inner_plan(seg);
      if (!decisions.empty()) {
        if (decisions.size() != 1 || decisions[0].freq != 0)
          throw ConfigError("strip_srt: inner protocol must be single-frequency");
        seg_msg_ = decisions[0].msg;
      }
      planned_seg_ = seg;
    }
    if (seg_msg_ && wrap_->set(static_cast<std::size_t>(sub)).test(self_))
      out.push_back({0, seg_msg_});

    if (seg_msg_) {
      const Step next_tx = wrap_->next_transmit_step(self_, sub + 1);
      if (next_tx != kNeverStep && next_tx < width_) return seg * width_ + next_tx;
    }
    if (window_has_input(seg)) return (seg + 1) * width_;
    const Step target = inner_target_window(seg);
    if (target == kNeverStep) return kNeverStep;
    return target * width_;
  }

 protected:
  void store(const ReceivedMessage& rm) override {
    // several senders can get through within one segment; each sender's
    // message object repeats, so deduplicate by identity
    for (const auto& b : inner_buffer_)
      if (b.msg.get() == rm.msg.get()) return;
    inner_buffer_.push_back({0, rm.msg});
  }

 private:
  NodeId self_;
  SelectorFamilyPtr wrap_;
  MessagePtr seg_msg_;
  Step planned_seg_ = -1;
};

class MultiplexFactory final : public ProtocolFactory {
 public:
  MultiplexFactory(std::shared_ptr<ProtocolFactory> inner, int kappa)
      : inner_(std::move(inner)), kappa_(kappa) {
    if (kappa_ < 1) throw ConfigError("multiplex: kappa must be >= 1");
  }

  std::string name() const override {
    return inner_->name() + "+mux" + std::to_string(kappa_);
  }

  NetworkModel natural_model(int n) const override {
    NetworkModel m = inner_->natural_model(n);
    m.frequencies = 1;
    return m;
  }

  bool needs_in_neighbors() const override { return inner_->needs_in_neighbors(); }

  void validate_model(const NetworkModel& model, int n) const override {
    if (model.frequencies != 1)
      throw ConfigError("multiplex: wrapped protocol runs on a single frequency");
    NetworkModel im = inner_->natural_model(n);
    if (im.frequencies > kappa_)
      throw ConfigError("multiplex: kappa smaller than the inner frequency count");
    im.ack = model.ack;
    inner_->validate_model(im, n);
  }

  std::unique_ptr<NodeMachine> make_node(int n, NodeId label,
                                         const std::vector<NodeId>& in_neighbors) override {
    NetworkModel im = inner_->natural_model(n);
    return std::make_unique<MultiplexNode>(inner_->make_node(n, label, in_neighbors),
                                           kappa_, im.ack);
  }

  nlohmann::json params(int n) const override {
    nlohmann::json j = inner_->params(n);
    j["multiplex_kappa"] = kappa_;
    return j;
  }

 private:
  std::shared_ptr<ProtocolFactory> inner_;
  int kappa_;
};

class StripSrtFactory final : public ProtocolFactory {
 public:
  StripSrtFactory(std::shared_ptr<ProtocolFactory> inner, SelectorFamilyPtr wrap)
      : inner_(std::move(inner)), wrap_(std::move(wrap)) {
    if (!wrap_ || wrap_->kind() != SelectorKind::strong || wrap_->k() < 2)
      throw ConfigError("strip_srt: needs a strong (n,2)-selector");
    if (!wrap_->verified())
      throw ConfigError("strip_srt: the wrap selector must be verified");
  }

  std::string name() const override { return inner_->name() + "+nosrt"; }

  NetworkModel natural_model(int n) const override {
    NetworkModel m = inner_->natural_model(n);
    m.frequencies = 1;
    m.srt = false;
    return m;
  }

  bool needs_in_neighbors() const override { return inner_->needs_in_neighbors(); }

  void validate_model(const NetworkModel& model, int n) const override {
    if (model.frequencies != 1)
      throw ConfigError("strip_srt: wrapped protocol runs on a single frequency");
    NetworkModel im = inner_->natural_model(n);
    if (im.frequencies != 1)
      throw ConfigError("strip_srt: inner protocol must be single-frequency (multiplex first)");
    im.ack = model.ack;
    inner_->validate_model(im, n);
  }

  std::unique_ptr<NodeMachine> make_node(int n, NodeId label,
                                         const std::vector<NodeId>& in_neighbors) override {
    if (wrap_->n() != n) throw ConfigError("strip_srt: selector universe mismatch");
    NetworkModel im = inner_->natural_model(n);
    return std::make_unique<StripSrtNode>(inner_->make_node(n, label, in_neighbors), label,
                                          wrap_, im.ack);
  }

  nlohmann::json params(int n) const override {
    nlohmann::json j = inner_->params(n);
    j["strip_srt_segment"] = wrap_->length();
    return j;
  }

 private:
  std::shared_ptr<ProtocolFactory> inner_;
  SelectorFamilyPtr wrap_;
};

}  // namespace

std::unique_ptr<ProtocolFactory> multiplex_to_single_frequency(
    std::shared_ptr<ProtocolFactory> inner, int kappa) {
  return std::make_unique<MultiplexFactory>(std::move(inner), kappa);
}

std::unique_ptr<ProtocolFactory> strip_srt(std::shared_ptr<ProtocolFactory> inner,
                                           SelectorFamilyPtr wrap) {
  return std::make_unique<StripSrtFactory>(std::move(inner), std::move(wrap));
}

TimeMap identity_time_map() {
  return [](Step s, Freq f) { return std::make_pair(s, f); };
}

TimeMap multiplex_time_map(int kappa) {
  return [kappa](Step s, Freq) {
    return std::make_pair(s / kappa, static_cast<Freq>(s % kappa));
  };
}

TimeMap strip_time_map(std::size_t segment_length) {
  const Step len = static_cast<Step>(segment_length);
  return [len](Step s, Freq) { return std::make_pair(s / len, static_cast<Freq>(0)); };
}

TimeMap compose(TimeMap outer_to_mid, TimeMap mid_to_inner) {
  return [o = std::move(outer_to_mid), i = std::move(mid_to_inner)](Step s, Freq f) {
    auto [ms, mf] = o(s, f);
    return i(ms, mf);
  };
}

std::set<DeliveryKey> delivery_set(const Trace& t, const TimeMap& map) {
  std::set<DeliveryKey> keys;
  for (const auto& d : t.deliveries) {
    auto [step, freq] = map(d.step, d.freq);
    keys.insert({step, freq, d.sender, d.receiver, t.payloads[d.payload]->fingerprint()});
  }
  return keys;
}

EquivalenceVerdict delivery_equivalence(const Trace& t1, const Trace& t2,
                                        const TimeMap& map) {
  const auto base = delivery_set(t1, identity_time_map());
  const auto pulled = delivery_set(t2, map);
  EquivalenceVerdict v;
  for (const auto& k : base)
    if (!pulled.count(k)) {
      if (v.missing == 0) v.first_missing = k;
      ++v.missing;
    }
  for (const auto& k : pulled)
    if (!base.count(k)) ++v.extra;
  v.pass = v.missing == 0;
  v.equal = v.pass && v.extra == 0;
  return v;
}

}  // namespace radiogather
