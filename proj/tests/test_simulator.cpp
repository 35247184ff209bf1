#include <doctest.h>

#include "radiogather/generators.hpp"
#include "radiogather/roundrobin.hpp"
#include "test_util.hpp"

using namespace radiogather;
namespace rt = radiogather::testing;

namespace {

Trace run_script(const Digraph& g, rt::ScriptedFactory::Script script, int freqs, bool srt,
                 bool ack, Step steps) {
  rt::ScriptedFactory factory(std::move(script), freqs, ack);
  RunOptions opts;
  opts.max_steps = steps;
  opts.until = RunUntil::budget;
  return run(g, factory, NetworkModel{freqs, srt, ack}, opts);
}

bool delivered(const Trace& t, Step step, Freq f, NodeId receiver, NodeId sender) {
  for (const auto& d : t.deliveries)
    if (d.step == step && d.freq == f && d.receiver == receiver && d.sender == sender)
      return true;
  return false;
}

int deliveries_to(const Trace& t, Step step, NodeId receiver) {
  int count = 0;
  for (const auto& d : t.deliveries)
    if (d.step == step && d.receiver == receiver) ++count;
  return count;
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("collision rule: 0, 1, 2, 3 transmitters") {
  // nodes 0,1,2 all feed node 3
  Digraph g(4, 3, {{0, 3}, {1, 3}, {2, 3}});
  rt::ScriptedFactory::Script script{
      {0, {}},                                   // silence
      {1, {{0, 0}}},                             // lone transmitter
      {2, {{0, 0}, {1, 0}}},                     // pair collides
      {3, {{0, 0}, {1, 0}, {2, 0}}},             // triple collides
  };
  Trace t = run_script(g, script, 1, true, false, 4);
  CHECK(deliveries_to(t, 0, 3) == 0);
  CHECK(delivered(t, 1, 0, 3, 0));
  CHECK(deliveries_to(t, 2, 3) == 0);
  CHECK(deliveries_to(t, 3, 3) == 0);
  // the rebuilt per-step view agrees: collision vs silence markers
  CHECK(step_outcome(t, g, 0, 0, 3).outcome == 0);
  CHECK(step_outcome(t, g, 1, 0, 3).outcome == 1);
  CHECK(step_outcome(t, g, 2, 0, 3).outcome == 2);
  CHECK(step_outcome(t, g, 3, 0, 3).outcome == 2);
}

TEST_CASE("frequencies are independent") {
  Digraph g(4, 3, {{0, 3}, {1, 3}, {2, 3}});
  // 0 and 1 collide on frequency 0 while 2 gets through on frequency 1
  rt::ScriptedFactory::Script script{{0, {{0, 0}, {1, 0}, {2, 1}}}};
  Trace t = run_script(g, script, 2, true, false, 1);
  CHECK_FALSE(delivered(t, 0, 0, 3, 0));
  CHECK_FALSE(delivered(t, 0, 0, 3, 1));
  CHECK(delivered(t, 0, 1, 3, 2));
}

TEST_CASE("srt=false drops same-frequency receptions at transmitters") {
  // 0 -> 1 while 1 itself transmits
  Digraph g(3, 2, {{0, 1}, {1, 2}});
  rt::ScriptedFactory::Script script{{0, {{0, 0}, {1, 0}}}};
  SUBCASE("with srt the reception goes through") {
    Trace t = run_script(g, script, 1, true, false, 1);
    CHECK(delivered(t, 0, 0, 1, 0));
    CHECK(delivered(t, 0, 0, 2, 1));
  }
  SUBCASE("without srt it is dropped, other frequencies unaffected") {
    Trace t = run_script(g, script, 1, false, false, 1);
    CHECK_FALSE(delivered(t, 0, 0, 1, 0));
    CHECK(delivered(t, 0, 0, 2, 1));  // node 2 only listens
    CHECK(step_outcome(t, g, 0, 0, 1).outcome == 3);
  }
  SUBCASE("a different frequency still reaches the transmitter") {
    rt::ScriptedFactory::Script two_freq{{0, {{0, 1}, {1, 0}}}};
    Trace t = run_script(g, two_freq, 2, false, false, 1);
    CHECK(delivered(t, 0, 1, 1, 0));
  }
}

TEST_CASE("ack bit: set iff some out-neighbor received") {
  Digraph g(4, 3, {{0, 2}, {1, 2}, {2, 3}});
  auto ack_of = [](const Trace& t, Step step, NodeId u) -> int {
    for (const auto& a : t.acks)
      if (a.step == step && a.node == u) return a.delivered ? 1 : 0;
    return -1;  // no ack record: node did not transmit
  };
  SUBCASE("success, collision, and no-out-neighbor cases") {
    rt::ScriptedFactory::Script script{
        {0, {{0, 0}}},          // 0 -> 2 delivered
        {1, {{0, 0}, {1, 0}}},  // collision at 2
        {2, {{3, 0}}},          // 3 has no out-neighbors
    };
    Trace t = run_script(g, script, 1, true, true, 3);
    CHECK(ack_of(t, 0, 0) == 1);
    CHECK(ack_of(t, 1, 0) == 0);
    CHECK(ack_of(t, 1, 1) == 0);
    CHECK(ack_of(t, 2, 3) == 0);
    CHECK(ack_of(t, 0, 1) == -1);
  }
  SUBCASE("ack reflects deliveries on any frequency") {
    rt::ScriptedFactory::Script script{{0, {{2, 0}, {2, 1}}}};
    Trace t = run_script(g, script, 2, true, true, 1);
    CHECK(ack_of(t, 0, 2) == 1);
  }
  SUBCASE("no ack records when the model lacks acks") {
    rt::ScriptedFactory::Script script{{0, {{0, 0}}}};
    Trace t = run_script(g, script, 1, true, false, 1);
    CHECK(t.acks.empty());
  }
}

TEST_CASE("engine completion semantics") {
  SUBCASE("single edge under roundrobin completes at step 0") {
    Digraph g(2, 1, {{0, 1}});
    auto rr = make_roundrobin();
    RunOptions opts;
    opts.max_steps = roundrobin_budget(2);
    Trace t = run(g, *rr, rr->natural_model(2), opts);
    CHECK(t.completion_step == 0);
    CHECK_FALSE(t.budget_hit);
  }
  SUBCASE("n=1 holds its own rumor at step 0") {
    Digraph g(1, 0, {});
    auto rr = make_roundrobin();
    RunOptions opts;
    opts.max_steps = 4;
    Trace t = run(g, *rr, rr->natural_model(1), opts);
    CHECK(t.completion_step == 0);
  }
  SUBCASE("budget exhaustion is reported") {
    Digraph g(4, 3, {{0, 1}, {1, 2}, {2, 3}});
    auto rr = make_roundrobin();
    RunOptions opts;
    opts.max_steps = 1;
    Trace t = run(g, *rr, rr->natural_model(4), opts);
    CHECK(t.completion_step == -1);
    CHECK(t.budget_hit);
  }
  SUBCASE("a run on a graph that cannot gather is refused") {
    Digraph g(2, 0, {});
    auto rr = make_roundrobin();
    RunOptions opts;
    opts.max_steps = 10;
    CHECK_THROWS_AS(run(g, *rr, rr->natural_model(2), opts), ConfigError);
  }
}

TEST_CASE("determinism: identical runs give byte-identical traces") {
  Digraph g = generate("random_dag", 24, GenParams{.density = 0.15}, 11);
  auto once = [&] {
    auto rr = make_roundrobin();
    RunOptions opts;
    opts.max_steps = roundrobin_budget(24);
    return run(g, *rr, rr->natural_model(24), opts).to_jsonl();
  };
  CHECK(once() == once());
}

TEST_CASE("neighbor discovery") {
  SUBCASE("path: knowledge appears slot by slot") {
    Digraph g(3, 2, {{0, 1}, {1, 2}});
    auto res = discover_in_neighbors(g, true);
    CHECK(res.in_neighbors[0].empty());
    CHECK(res.in_neighbors[1] == std::vector<NodeId>{0});
    CHECK(res.in_neighbors[2] == std::vector<NodeId>{1});
    // node 1 heard node 0 at step 0, node 2 heard node 1 at step 1
    REQUIRE(res.trace.deliveries.size() == 2);
    CHECK(res.trace.deliveries[0].step == 0);
    CHECK(res.trace.deliveries[0].receiver == 1);
    CHECK(res.trace.deliveries[1].step == 1);
    CHECK(res.trace.deliveries[1].receiver == 2);
  }
  SUBCASE("a node with five in-neighbors learns all of them in one cycle") {
    Digraph g(6, 5, {{0, 5}, {1, 5}, {2, 5}, {3, 5}, {4, 5}});
    auto res = discover_in_neighbors(g);
    CHECK(res.in_neighbors[5] == std::vector<NodeId>{0, 1, 2, 3, 4});
  }
  SUBCASE("the schedule spans exactly n steps") {
    Digraph g = generate("layered_dag", 8, GenParams{.width = 2}, 1);
    auto res = discover_in_neighbors(g, true);
    CHECK(res.trace.terminal_step == 7);
    for (NodeId v = 0; v < 8; ++v) {
      std::vector<NodeId> expect = g.in_neighbors(v);
      CHECK(res.in_neighbors[v] == expect);
    }
    CHECK(discovery_transmitter(11, 8) == 3);
  }
}

}  // TEST_SUITE
