#include "radiogather/arb_gather.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

namespace radiogather {

int scc_frequency_count(int n) { return log2_ceil(n); }

namespace {

class ArbGatherNode final : public NodeMachine {
 public:
  ArbGatherNode(int n, NodeId self, int theta, int theta_p,
                std::shared_ptr<const SelectorLadder> ladder,
                std::shared_ptr<const BetaSchedule> beta,
                std::shared_ptr<const GossipSubprotocol> gossip,
                const std::vector<NodeId>& in_neighbors)
      : n_(n), self_(self), theta_(theta), theta_p_(theta_p), gossip_(std::move(gossip)),
        core_(n, self, std::move(ladder), beta, 0),
        in_nbrs_(n), acy_heard_(n), stage_done_(beta->theta) {
    for (NodeId u : in_neighbors) in_nbrs_.set(u);
    cls_.resize(theta_p_);
    for (int j = 0; j < theta_p_; ++j) {
      auto& cs = cls_[j];
      cs.T = gossip_->frame_length(j, n_);
      cs.collected.resize(n_);
      cs.collected.set(self_);
      cs.ctilde.resize(n_);
      cs.acy_snap.resize(n_);
      cs.rumor_snap.resize(n_);
      cs.rumor_snap.set(self_);  // R(v) before time 0: own rumor only
    }
  }

  Step plan(Step now, std::vector<TxDecision>& out) override {
    last_seen_ = std::max(last_seen_, now);
    if (!switched_)
      for (int j = 0; j < theta_p_ && !switched_; ++j) advance_frames(j, now);

    Step wake = core_.plan(now, out);
    if (switched_) return wake;

    for (int j = 0; j < theta_p_; ++j) {
      auto& cs = cls_[j];
      const std::int64_t frame = now / cs.T;
      const Step offset = now % cs.T;
      const Step frame_start = frame * cs.T;
      if (gossip_->participates(self_, j, frame) &&
          gossip_->transmits_at(self_, n_, j, offset)) {
        if (frame % 2 == 0) {
          if (!cs.labels_snapshot)
            cs.labels_snapshot = std::make_shared<LabelSet>(cs.collected);
          out.push_back({theta_ + j,
                         make_gossip_labels(self_, j, frame, cs.labels_snapshot)});
        } else {
          if (!cs.vectors_snapshot) {
            auto vecs = std::make_shared<std::vector<SccVectorPtr>>();
            for (const auto& [u, vec] : cs.vectors) vecs->push_back(vec);
            cs.vectors_snapshot = std::move(vecs);
          }
          out.push_back({theta_ + j,
                         make_gossip_vectors(self_, j, frame, cs.vectors_snapshot)});
        }
      }
      // next slot in this frame, else the boundary
      Step next = cs.T;
      if (gossip_->participates(self_, j, frame))
        next = gossip_->next_transmit_offset(self_, n_, j, offset + 1);
      wake = std::min(wake, frame_start + std::min(next, cs.T));
    }
    return wake;
  }

  void observe(Step now, std::span<const ReceivedMessage> msgs) override {
    last_seen_ = std::max(last_seen_, now);
    for (const auto& rm : msgs) {
      if (rm.freq < theta_) {
        if (rm.msg->kind != Message::Kind::gather || !rm.msg->rumors) continue;
        acy_heard_.set(rm.msg->sender);
        core_.absorb(*rm.msg->rumors);
        continue;
      }
      if (switched_) continue;  // SCC frequencies abandoned
      const int j = rm.freq - theta_;
      if (j < 0 || j >= theta_p_) continue;
      auto& cs = cls_[j];
      const std::int64_t frame = now / cs.T;
      if (rm.msg->gossip_class != j || rm.msg->frame != frame) continue;  // stale tag
      if (frame % 2 == 0) {
        if (rm.msg->kind != Message::Kind::gossip_labels || !rm.msg->labels) continue;
        if (!rm.msg->labels->is_subset_of(cs.collected)) {
          cs.collected |= *rm.msg->labels;
          cs.labels_snapshot.reset();
        }
      } else {
        if (rm.msg->kind != Message::Kind::gossip_vectors || !rm.msg->vectors) continue;
        bool grew = false;
        for (const auto& vec : *rm.msg->vectors)
          grew |= cs.vectors.emplace(vec->origin, vec).second;
        if (grew) cs.vectors_snapshot.reset();
      }
    }
  }

  NodeView view() const override {
    NodeView v;
    v.rumors = &core_.rumors();
    v.alpha = switched_ ? core_.alpha() : -1;
    const int stage = core_.stage_at(last_seen_);
    v.stage = stage;
    v.mode = !switched_ ? 0 : (stage >= 0 && stage >= stage_done_ ? 2 : 1);
    return v;
  }

  void drain_events(std::vector<StateEvent>& sink) override {
    for (auto& ev : events_) sink.push_back(std::move(ev));
    events_.clear();
  }

 private:
  struct ClassState {
    Step T = 0;
    std::int64_t frame = 0;  // frame whose data `collected`/`vectors` hold
    LabelSet collected;
    std::map<NodeId, SccVectorPtr> vectors;
    LabelSet ctilde;
    LabelSet acy_snap;
    LabelSet rumor_snap;
    std::shared_ptr<const LabelSet> labels_snapshot;
    std::shared_ptr<const std::vector<SccVectorPtr>> vectors_snapshot;
  };

  /// Applies every frame transition of class j up to `now`. plan() runs at
  /// every boundary (the wake hint includes them), so snapshots are taken
  /// exactly at frame starts: receptions strictly before the boundary.
  void advance_frames(int j, Step now) {
    auto& cs = cls_[j];
    while (!switched_ && cs.frame < now / cs.T) {
      const Step boundary = (cs.frame + 1) * cs.T;
      if (cs.frame % 2 == 0) {
        // even frame ended: freeze C~ and stage this node's vector
        cs.ctilde = cs.collected;
        auto vec = std::make_shared<SccVector>();
        vec->origin = self_;
        vec->component = cs.ctilde;
        vec->in_neighbors = in_nbrs_;
        vec->acy_heard = cs.acy_snap;
        vec->rumors = cs.rumor_snap;
        cs.vectors.clear();
        cs.vectors.emplace(self_, std::move(vec));
      } else {
        evaluate_tests(j, boundary);
        if (switched_) return;
        // next even frame starts at the boundary: snapshot and reset
        cs.acy_snap = acy_heard_;
        cs.rumor_snap = core_.rumors();
        cs.collected.reset();
        cs.collected.set(self_);
      }
      cs.labels_snapshot.reset();
      cs.vectors_snapshot.reset();
      ++cs.frame;
    }
  }

  void evaluate_tests(int j, Step boundary) {
    auto& cs = cls_[j];
    const LabelSet& comp = cs.ctilde;
    LabelSet cprime(n_);
    for (const auto& [u, vec] : cs.vectors) cprime.set(u);
    cprime.set(self_);
    if (comp != cprime) return;  // Test 2
    LabelSet rumor_union(n_);
    for (auto u = comp.find_first(); u != LabelSet::npos; u = comp.find_next(u)) {
      auto it = cs.vectors.find(static_cast<NodeId>(u));
      if (it == cs.vectors.end()) return;  // missing vector: tests deemed failed
      const SccVector& vec = *it->second;
      if (vec.component != comp) return;  // Test 1
      LabelSet rest = vec.in_neighbors - vec.acy_heard;
      if (!rest.is_subset_of(comp)) return;  // Test 3
      rumor_union |= vec.rumors;
    }
    // all tests passed: certify the component and hand over to the staged
    // subroutine with the union of the gossiped rumor sets
    switched_ = true;
    core_.absorb(rumor_union);
    core_.activate(boundary);
    StateEvent pass;
    pass.step = boundary;
    pass.node = self_;
    pass.kind = StateEvent::Kind::scc_pass;
    pass.a = j;
    pass.b = cs.frame / 2;  // double-frame index r
    for (auto u = comp.find_first(); u != LabelSet::npos; u = comp.find_next(u))
      pass.members.push_back(static_cast<NodeId>(u));
    pass.rumor_hash = hash_label_set(rumor_union);
    events_.push_back(std::move(pass));
    events_.push_back({boundary, self_, StateEvent::Kind::activated, boundary, boundary, {}, 0});
  }

  int n_;
  NodeId self_;
  int theta_, theta_p_;
  std::shared_ptr<const GossipSubprotocol> gossip_;
  StagedTransmitter core_;
  LabelSet in_nbrs_;
  LabelSet acy_heard_;
  bool switched_ = false;
  int stage_done_;  // theta: stage index past the last activity stage
  std::vector<ClassState> cls_;
  Step last_seen_ = 0;
  std::vector<StateEvent> events_;
};

class ArbGatherFactory final : public ProtocolFactory {
 public:
  ArbGatherFactory(int n, const GatherConfig& cfg,
                   std::shared_ptr<const GossipSubprotocol> gossip)
      : n_(n), cfg_(cfg), gossip_(std::move(gossip)) {
    theta_ = cfg.theta_override > 0 ? cfg.theta_override : theta_for(n);
    theta_p_ = scc_frequency_count(n);
    auto ladder = build_strong_ladder(n, std::max(theta_ - 2, 0), cfg.c_strong,
                                      derive_seed(cfg.seed, 0xacdc), cfg.build,
                                      cfg.strength_bump);
    ladder_ = std::make_shared<SelectorLadder>(std::move(ladder));
    beta_ = std::make_shared<BetaSchedule>(make_beta_schedule(*ladder_, theta_, n));
  }

  std::string name() const override { return "arb-gather[" + gossip_->name() + "]"; }

  NetworkModel natural_model(int) const override {
    return NetworkModel{theta_ + theta_p_, true, false};
  }

  bool needs_in_neighbors() const override { return true; }

  void validate_model(const NetworkModel& model, int) const override {
    if (model.frequencies < theta_ + theta_p_)
      throw ConfigError("arb-gather: model must provide theta + theta' = " +
                        std::to_string(theta_ + theta_p_) + " frequencies");
  }

  std::unique_ptr<NodeMachine> make_node(int n, NodeId label,
                                         const std::vector<NodeId>& in_neighbors) override {
    if (n != n_) throw ConfigError("arb-gather: factory built for a different n");
    return std::make_unique<ArbGatherNode>(n, label, theta_, theta_p_, ladder_, beta_,
                                           gossip_, in_neighbors);
  }

  nlohmann::json params(int) const override {
    nlohmann::json j{{"protocol", name()}, {"n", n_}, {"theta", theta_},
                     {"theta_prime", theta_p_}, {"c_strong", cfg_.c_strong},
                     {"beta", beta_->beta}, {"gossip", gossip_->name()}};
    std::vector<Step> frames;
    for (int c = 0; c < theta_p_; ++c) frames.push_back(gossip_->frame_length(c, n_));
    j["t_scc"] = frames;
    return j;
  }

 private:
  int n_;
  GatherConfig cfg_;
  std::shared_ptr<const GossipSubprotocol> gossip_;
  int theta_, theta_p_;
  std::shared_ptr<const SelectorLadder> ladder_;
  std::shared_ptr<const BetaSchedule> beta_;
};

}  // namespace

std::unique_ptr<ProtocolFactory> make_arb_gather(int n, const GatherConfig& cfg,
                                                 std::shared_ptr<const GossipSubprotocol> gossip) {
  return std::make_unique<ArbGatherFactory>(n, cfg, std::move(gossip));
}

Step arb_gather_budget(int n, const GatherConfig& cfg, const GossipSubprotocol& gossip,
                       const SccPartition& scc) {
  Step frames = 0;
  for (std::size_t c = 0; c < scc.components.size(); ++c)
    frames += 2 * gossip.frame_length(scc.size_class(static_cast<int>(c)), n);
  const Step acy = acyclic_beta_schedule(n, cfg).activity_length() *
                   (static_cast<Step>(scc.components.size()) + 1);
  return frames + acy;
}

}  // namespace radiogather
