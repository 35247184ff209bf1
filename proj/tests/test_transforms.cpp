#include <doctest.h>

#include "radiogather/acyclic_gather.hpp"
#include "radiogather/experiment.hpp"
#include "radiogather/roundrobin.hpp"
#include "test_util.hpp"

using namespace radiogather;
namespace rt = radiogather::testing;

TEST_SUITE("transforms") {

TEST_CASE("multiplex timing: inner step 3, frequency 7 lands at outer step 37") {
  // a lone scripted transmitter on frequency 7 of inner step 3
  Digraph g(2, 1, {{0, 1}});
  auto scripted = std::make_shared<rt::ScriptedFactory>(
      rt::ScriptedFactory::Script{{3, {{0, 7}}}}, 10, false);
  auto wrapped = multiplex_to_single_frequency(scripted, 10);
  RunOptions opts;
  opts.max_steps = 40;
  opts.until = RunUntil::budget;
  Trace t = run(g, *wrapped, NetworkModel{1, true, false}, opts);
  REQUIRE(t.transmits.size() == 1);
  CHECK(t.transmits[0].step == 37);
  CHECK(t.transmits[0].freq == 0);
  REQUIRE(t.deliveries.size() == 1);
  CHECK(t.deliveries[0].step == 37);
  auto [is, ifq] = multiplex_time_map(10)(37, 0);
  CHECK(is == 3);
  CHECK(ifq == 7);
}

TEST_CASE("multiplex with kappa=1 is the identity on timing") {
  Digraph g = generate("random_dag", 12, GenParams{.density = 0.2}, 3);
  auto rr = [&] {
    auto f = make_roundrobin();
    RunOptions opts;
    opts.max_steps = roundrobin_budget(12);
    return run(g, *f, NetworkModel{1, true, false}, opts);
  }();
  auto muxed = [&] {
    auto f = multiplex_to_single_frequency(make_roundrobin(), 1);
    RunOptions opts;
    opts.max_steps = roundrobin_budget(12);
    return run(g, *f, NetworkModel{1, true, false}, opts);
  }();
  CHECK(rr.completion_step == muxed.completion_step);
  auto verdict = delivery_equivalence(rr, muxed, identity_time_map());
  CHECK(verdict.pass);
  CHECK(verdict.equal);
}

TEST_CASE("multiplexed acyclic-gather delivers exactly the relaxed-model set") {
  GatherConfig cfg;
  for (Seed seed = 0; seed < 4; ++seed) {
    const int n = 12 + 4 * static_cast<int>(seed);
    Digraph g = generate("random_dag", n, GenParams{.density = 0.15}, derive_seed(31, seed));
    cfg.seed = derive_seed(32, n);
    const int kappa = theta_for(n);

    auto direct = make_acyclic_gather(n, cfg);
    RunOptions opts;
    opts.max_steps = acyclic_gather_budget(n, cfg);
    Trace t_direct = run(g, *direct, direct->natural_model(n), opts);
    REQUIRE(t_direct.complete());

    auto wrapped = multiplex_to_single_frequency(make_acyclic_gather(n, cfg), kappa);
    RunOptions mopts;
    mopts.max_steps = opts.max_steps * kappa;
    Trace t_mux = run(g, *wrapped, NetworkModel{1, true, false}, mopts);
    REQUIRE(t_mux.complete());

    auto verdict = delivery_equivalence(t_direct, t_mux, multiplex_time_map(kappa));
    CAPTURE(n);
    REQUIRE(verdict.pass);
    REQUIRE(verdict.equal);
    // completion lands inside the matching round
    CHECK(t_mux.completion_step / kappa == t_direct.completion_step);
  }
}

TEST_CASE("strip_srt delivers a superset") {
  GatherConfig cfg;
  const int n = 16;
  Digraph g = generate("random_dag", n, GenParams{.density = 0.2}, 41);
  cfg.seed = 42;
  const int kappa = theta_for(n);

  auto direct = make_acyclic_gather(n, cfg);
  RunOptions opts;
  opts.max_steps = acyclic_gather_budget(n, cfg);
  Trace t_direct = run(g, *direct, direct->natural_model(n), opts);
  REQUIRE(t_direct.complete());

  SelectorFamily wrap = build_checked_selector(SelectorKind::strong, n, 2,
                                               16 * 4 * log2_ceil(n), 7);
  REQUIRE(wrap.verified());
  const std::size_t seg = wrap.length();
  auto stripped = strip_srt(
      std::shared_ptr<ProtocolFactory>(
          multiplex_to_single_frequency(make_acyclic_gather(n, cfg), kappa)),
      std::make_shared<const SelectorFamily>(std::move(wrap)));
  RunOptions sopts;
  sopts.max_steps = opts.max_steps * kappa * static_cast<Step>(seg);
  Trace t_strip = run(g, *stripped, NetworkModel{1, false, false}, sopts);
  REQUIRE(t_strip.complete());

  auto map = compose(strip_time_map(seg), multiplex_time_map(kappa));
  auto verdict = delivery_equivalence(t_direct, t_strip, map);
  CHECK(verdict.pass);  // superset direction; equality not required
}

TEST_CASE("strip_srt segment arithmetic") {
  // a silent inner protocol yields a silent wrapped run; a transmitting one
  // spreads each inner step over exactly |wrap| sub-steps
  Digraph g(2, 1, {{0, 1}});
  SelectorFamily wrap = build_checked_selector(SelectorKind::strong, 2, 2, 12, 3);
  const Step seg = static_cast<Step>(wrap.length());
  auto wrap_ptr = std::make_shared<const SelectorFamily>(std::move(wrap));

  SUBCASE("silent inner, silent segments") {
    auto scripted = std::make_shared<rt::ScriptedFactory>(rt::ScriptedFactory::Script{}, 1, false);
    auto stripped = strip_srt(scripted, wrap_ptr);
    RunOptions opts;
    opts.max_steps = seg * 3;
    opts.until = RunUntil::budget;
    Trace t = run(g, *stripped, NetworkModel{1, false, false}, opts);
    CHECK(t.transmits.empty());
  }
  SUBCASE("inner step tau occupies sub-steps of segment tau only") {
    auto scripted = std::make_shared<rt::ScriptedFactory>(
        rt::ScriptedFactory::Script{{2, {{0, 0}}}}, 1, false);
    auto stripped = strip_srt(scripted, wrap_ptr);
    RunOptions opts;
    opts.max_steps = seg * 4;
    opts.until = RunUntil::budget;
    Trace t = run(g, *stripped, NetworkModel{1, false, false}, opts);
    REQUIRE_FALSE(t.transmits.empty());
    const std::int64_t members = wrap_ptr->member_indices(0).size();
    CHECK(std::cmp_equal(t.transmits.size(), members));
    for (const auto& rec : t.transmits) {
      CHECK(rec.step / seg == 2);
      CHECK(wrap_ptr->set(rec.step % seg).test(0));
    }
  }
}

TEST_CASE("delivery_equivalence on a trace and itself") {
  Digraph g = generate("path", 4, {}, 0);
  auto rr = make_roundrobin();
  RunOptions opts;
  opts.max_steps = roundrobin_budget(4);
  Trace t = run(g, *rr, rr->natural_model(4), opts);
  auto verdict = delivery_equivalence(t, t, identity_time_map());
  CHECK(verdict.pass);
  CHECK(verdict.equal);
}

TEST_CASE("strip_srt rejects an unverified or wrong-kind wrap selector") {
  BuildOptions opts;
  opts.force_random = true;
  SelectorFamily raw = build_strong_selector(8, 2, 64, 1, opts);
  CHECK_THROWS_AS(strip_srt(std::shared_ptr<ProtocolFactory>(make_roundrobin()),
                            std::make_shared<const SelectorFamily>(std::move(raw))),
                  ConfigError);
}

}  // TEST_SUITE
