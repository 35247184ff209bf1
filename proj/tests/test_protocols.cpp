#include <doctest.h>

#include <nlohmann/json.hpp>

#include "radiogather/acyclic_gather.hpp"
#include "radiogather/analysis.hpp"
#include "radiogather/experiment.hpp"
#include "radiogather/roundrobin.hpp"
#include "test_util.hpp"

using namespace radiogather;

namespace {

Trace run_protocol(const Digraph& g, ProtocolFactory& f, Step budget,
                   RunUntil until = RunUntil::completion) {
  RunOptions opts;
  opts.max_steps = budget;
  opts.until = until;
  return run(g, f, f.natural_model(g.n()), opts);
}

/// Delivery-order shuffling wrapper: hands each step's messages to the inner
/// node in a permuted order. Protocol decisions must not depend on it.
class ShuffledNode final : public NodeMachine {
 public:
  ShuffledNode(std::unique_ptr<NodeMachine> inner, Seed seed)
      : inner_(std::move(inner)), seed_(seed) {}

  Step plan(Step now, std::vector<TxDecision>& out) override { return inner_->plan(now, out); }

  void observe(Step now, std::span<const ReceivedMessage> msgs) override {
    std::vector<ReceivedMessage> shuffled(msgs.begin(), msgs.end());
    std::mt19937_64 rng(derive_seed(seed_, static_cast<std::uint64_t>(now)));
    for (std::size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[draw_below(rng, i)]);
    inner_->observe(now, shuffled);
  }

  void on_ack(Step now, bool d) override { inner_->on_ack(now, d); }
  void end_step(Step now) override { inner_->end_step(now); }
  NodeView view() const override { return inner_->view(); }
  void drain_events(std::vector<StateEvent>& sink) override { inner_->drain_events(sink); }

 private:
  std::unique_ptr<NodeMachine> inner_;
  Seed seed_;
};

class ShuffledFactory final : public ProtocolFactory {
 public:
  ShuffledFactory(std::unique_ptr<ProtocolFactory> inner, Seed seed)
      : inner_(std::move(inner)), seed_(seed) {}
  std::string name() const override { return inner_->name(); }
  NetworkModel natural_model(int n) const override { return inner_->natural_model(n); }
  bool needs_in_neighbors() const override { return inner_->needs_in_neighbors(); }
  void validate_model(const NetworkModel& m, int n) const override {
    inner_->validate_model(m, n);
  }
  std::unique_ptr<NodeMachine> make_node(int n, NodeId label,
                                         const std::vector<NodeId>& in_nbrs) override {
    return std::make_unique<ShuffledNode>(inner_->make_node(n, label, in_nbrs),
                                          derive_seed(seed_, label));
  }
  nlohmann::json params(int n) const override { return inner_->params(n); }

 private:
  std::unique_ptr<ProtocolFactory> inner_;
  Seed seed_;
};

}  // namespace

TEST_SUITE("protocols") {

TEST_CASE("roundrobin hand-simulated completions") {
  SUBCASE("path of three") {
    // step 0: 0 -> 1; step 1: 1 transmits {0,1} -> 2 holds everything
    Digraph g(3, 2, {{0, 1}, {1, 2}});
    auto rr = make_roundrobin();
    Trace t = run_protocol(g, *rr, roundrobin_budget(3));
    CHECK(t.completion_step == 1);
    CHECK(t.completion_step <= 5);  // within two cycles
  }
  SUBCASE("star of five completes within one cycle") {
    Digraph g = generate("star", 5, {}, 0);
    auto rr = make_roundrobin();
    Trace t = run_protocol(g, *rr, roundrobin_budget(5));
    CHECK(t.completion_step == 3);  // last source slot
    CHECK(t.completion_step <= 5);
  }
  SUBCASE("depth bound n*(r+1) over random DAGs") {
    for (Seed seed = 0; seed < 12; ++seed) {
      const int n = 8 + static_cast<int>(seed) * 4;
      Digraph g = generate("random_dag", n, GenParams{.density = 0.2}, seed);
      auto ld = layer_decomposition(g);
      auto rr = make_roundrobin();
      Trace t = run_protocol(g, *rr, roundrobin_budget(n));
      REQUIRE(t.complete());
      REQUIRE(t.completion_step <= static_cast<Step>(n) * (ld.max_delta + 1));
    }
  }
}

TEST_CASE("beta schedule arithmetic") {
  GatherConfig cfg;
  cfg.c_strong = 16;
  SUBCASE("theta values") {
    CHECK(theta_for(1) == 2);
    CHECK(theta_for(16) == 3);
    CHECK(theta_for(64) == 4);
    CHECK(theta_for(1024) == 6);
  }
  SUBCASE("boundaries") {
    BetaSchedule bs = acyclic_beta_schedule(16, cfg);
    REQUIRE(bs.theta == 3);
    CHECK(bs.beta[0] == 0);
    CHECK(bs.beta[1] == 16 * 4);              // rung 0
    CHECK(bs.beta[2] == 16 * 4 + 16 * 4 * 4); // + rung 1
    CHECK(bs.beta[3] == bs.beta[2] + 16);     // + RoundRobin stage
    CHECK(bs.stage_of(0) == 0);
    CHECK(bs.stage_of(bs.beta[1]) == 1);
    CHECK(bs.stage_of(bs.activity_length()) == 3);
  }
}

TEST_CASE("acyclic-gather on a single edge") {
  // source activates at 0; rung 0 is the full set, so the first transmission
  // lands at step 0 and the target adopts rws = beta_1
  Digraph g(2, 1, {{0, 1}});
  GatherConfig cfg;
  auto factory = make_acyclic_gather(2, cfg);
  Trace t = run_protocol(g, *factory, acyclic_gather_budget(2, cfg),
                         RunUntil::completion_and_target_activation);
  REQUIRE(t.complete());
  CHECK(t.completion_step == 0);
  const BetaSchedule bs = acyclic_beta_schedule(2, cfg);
  auto alpha = activation_steps(t);
  CHECK(alpha[0] == 0);
  CHECK(alpha[1] == bs.beta[1]);
  CHECK(alpha[1] == 16);  // c_s * ceil(log2 2) with c_s = 16
  auto fc = first_contacts(t);
  CHECK(fc[1].at(0).step == 0);
}

TEST_CASE("acyclic-gather star with three sources") {
  Digraph g = generate("star", 4, {}, 0);
  GatherConfig cfg;
  auto factory = make_acyclic_gather(4, cfg);
  Trace t = run_protocol(g, *factory, acyclic_gather_budget(4, cfg));
  REQUIRE(t.complete());
  // all sources are active from 0; everything arrives within one activity period
  CHECK(t.completion_step <= acyclic_beta_schedule(4, cfg).activity_length());
}

TEST_CASE("acyclic-gather correctness suite on random DAGs") {
  GatherConfig cfg;
  for (Seed seed = 0; seed < 8; ++seed) {
    const int n = 16 + static_cast<int>(seed % 3) * 16;
    Digraph g = generate(seed % 2 ? "random_dag" : "layered_dag", n,
                         GenParams{.density = 0.1, .width = 0}, derive_seed(21, seed));
    cfg.seed = derive_seed(22, n);
    RunOutcome out = run_one(g, "acyclic-gather", cfg, "simple", {}, {}, 1.0, seed, true);
    CAPTURE(n);
    CAPTURE(seed);
    REQUIRE(out.report.verdicts.at("completed"));
    REQUIRE(out.report.verdicts.at("frequency_discipline"));
    REQUIRE(out.report.verdicts.at("activation_order"));
    REQUIRE(out.report.verdicts.at("stage_budget"));
    REQUIRE(out.report.verdicts.at("completion_bound"));
    CHECK(out.trace.anomalies == 0);
  }
}

TEST_CASE("acyclic-gather liveness: every edge delivered within the activity period") {
  GatherConfig cfg;
  cfg.seed = 5;
  Digraph g = generate("layered_dag", 32, GenParams{.width = 4}, 9);
  auto factory = make_acyclic_gather(32, cfg);
  Trace t = run_protocol(g, *factory, acyclic_gather_budget(32, cfg),
                         RunUntil::completion_and_target_activation);
  REQUIRE(t.complete());
  const auto alpha = activation_steps(t);
  const auto fc = first_contacts(t);
  const Step period = acyclic_beta_schedule(32, cfg).activity_length();
  for (auto [u, v] : g.edges()) {
    // u must have reached v no later than u's RoundRobin stage allows
    if (fc[v].count(u) == 0) continue;  // v heard u after the run ended
    const Step first = fc[v].at(u).step;
    REQUIRE(alpha[u] >= 0);
    REQUIRE(first >= alpha[u]);
    REQUIRE(first < alpha[u] + period);
  }
}

TEST_CASE("acyclic-gather deadlocks on cyclic input") {
  Digraph g(3, 2, {{0, 1}, {1, 0}, {1, 2}});
  GatherConfig cfg;
  auto factory = make_acyclic_gather(3, cfg);
  Trace t = run_protocol(g, *factory, 2000);
  CHECK_FALSE(t.complete());
  CHECK(t.budget_hit);
}

TEST_CASE("delivery order within a step is immaterial") {
  GatherConfig cfg;
  cfg.seed = 17;
  Digraph g = generate("random_dag", 24, GenParams{.density = 0.2}, 13);
  std::string plain = [&] {
    auto f = make_acyclic_gather(24, cfg);
    return run_protocol(g, *f, acyclic_gather_budget(24, cfg)).to_jsonl();
  }();
  std::string shuffled = [&] {
    ShuffledFactory f(make_acyclic_gather(24, cfg), 99);
    return run_protocol(g, f, acyclic_gather_budget(24, cfg)).to_jsonl();
  }();
  CHECK(plain == shuffled);
}

TEST_CASE("model validation") {
  GatherConfig cfg;
  auto factory = make_acyclic_gather(16, cfg);
  NetworkModel starved{1, true, false};
  CHECK_THROWS_AS(factory->validate_model(starved, 16), ConfigError);
}

}  // TEST_SUITE
