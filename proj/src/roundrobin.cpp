#include "radiogather/roundrobin.hpp"

#include <nlohmann/json.hpp>

namespace radiogather {

namespace {

class RoundRobinNode final : public NodeMachine {
 public:
  RoundRobinNode(int n, NodeId self) : n_(n), self_(self), rumors_(n) {
    rumors_.set(self_);
  }

  Step plan(Step now, std::vector<TxDecision>& out) override {
    if (now % n_ == self_) {
      if (!snapshot_ || *snapshot_ != rumors_)
        snapshot_ = std::make_shared<LabelSet>(rumors_);
      out.push_back({0, make_gather(self_, snapshot_, -1)});
      return now + n_;
    }
    return now + 1 + (self_ - (now + 1) % n_ + n_) % n_;
  }

  void observe(Step, std::span<const ReceivedMessage> msgs) override {
    for (const auto& rm : msgs)
      if (rm.msg->rumors) rumors_ |= *rm.msg->rumors;
  }

  NodeView view() const override {
    NodeView v;
    v.rumors = &rumors_;
    v.mode = 1;
    v.stage = 0;
    v.alpha = 0;
    return v;
  }

 private:
  int n_;
  NodeId self_;
  LabelSet rumors_;
  std::shared_ptr<const LabelSet> snapshot_;
};

class RoundRobinFactory final : public ProtocolFactory {
 public:
  std::string name() const override { return "roundrobin"; }

  NetworkModel natural_model(int) const override { return NetworkModel{1, true, false}; }

  void validate_model(const NetworkModel& model, int) const override {
    if (model.frequencies < 1) throw ConfigError("roundrobin: needs at least one frequency");
  }

  std::unique_ptr<NodeMachine> make_node(int n, NodeId label,
                                         const std::vector<NodeId>&) override {
    return std::make_unique<RoundRobinNode>(n, label);
  }
};

}  // namespace

std::unique_ptr<ProtocolFactory> make_roundrobin() {
  return std::make_unique<RoundRobinFactory>();
}

Step roundrobin_budget(int n) {
  return static_cast<Step>(n) * (n + 1);
}

}  // namespace radiogather
