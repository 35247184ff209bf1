#include <doctest.h>

#include "radiogather/generators.hpp"
#include "test_util.hpp"

using namespace radiogather;
namespace rt = radiogather::testing;

TEST_SUITE("digraph") {

TEST_CASE("construction rejects malformed input") {
  CHECK_THROWS_AS(Digraph(3, 0, {{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Digraph(3, 0, {{0, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(Digraph(3, 5, {}), std::invalid_argument);
  Digraph g(3, 2, {{0, 1}, {0, 1}, {1, 2}});
  CHECK(g.edge_count() == 2);  // parallel edges collapse
}

TEST_CASE("validate_target_reachable") {
  CHECK(validate_target_reachable(Digraph(3, 2, {{0, 1}, {1, 2}})));
  CHECK_FALSE(validate_target_reachable(Digraph(2, 0, {})));
  // one-hop star
  Digraph star(5, 4, {{0, 4}, {1, 4}, {2, 4}, {3, 4}});
  CHECK(validate_target_reachable(star));
}

TEST_CASE("compute_scc basic shapes") {
  SUBCASE("acyclic path gives singletons") {
    auto part = compute_scc(Digraph(3, 2, {{0, 1}, {1, 2}}));
    CHECK(part.components.size() == 3);
  }
  SUBCASE("2-cycle plus tail") {
    auto part = compute_scc(Digraph(3, 2, {{0, 1}, {1, 0}, {1, 2}}));
    REQUIRE(part.components.size() == 2);
    const auto& first = part.components[part.condensation_order[0]];
    const auto& second = part.components[part.condensation_order[1]];
    CHECK(first == std::vector<NodeId>{0, 1});
    CHECK(second == std::vector<NodeId>{2});
  }
}

TEST_CASE("compute_scc agrees with the mutual-reachability oracle") {
  int checked = 0;
  for (Seed seed = 0; seed < 220; ++seed) {
    const int n = 2 + static_cast<int>(seed % 11);
    Digraph g = rt::random_digraph(n, 0.25, derive_seed(99, seed), false);
    auto part = compute_scc(g);
    auto oracle = rt::mutual_reach_partition(g);
    auto canon = [](std::vector<std::vector<NodeId>> groups) {
      for (auto& grp : groups) std::sort(grp.begin(), grp.end());
      std::sort(groups.begin(), groups.end());
      return groups;
    };
    REQUIRE(canon(part.components) == canon(oracle));
    // condensation order is a topological order of the condensation DAG
    std::vector<int> pos(part.components.size());
    for (std::size_t i = 0; i < part.condensation_order.size(); ++i)
      pos[part.condensation_order[i]] = static_cast<int>(i);
    for (auto [u, v] : g.edges())
      if (part.component_of[u] != part.component_of[v])
        REQUIRE(pos[part.component_of[u]] < pos[part.component_of[v]]);
    ++checked;
  }
  CHECK(checked == 220);
}

TEST_CASE("in_graph") {
  Digraph path(3, 2, {{0, 1}, {1, 2}});
  CHECK(in_graph(path, std::vector<NodeId>{2}).count() == 3);
  LabelSet just_source = in_graph(path, std::vector<NodeId>{0});
  CHECK(just_source.count() == 1);
  CHECK(just_source.test(0));

  SUBCASE("matches the forward-reachability oracle and is monotone") {
    for (Seed seed = 0; seed < 40; ++seed) {
      Digraph g = generate("random_dag", 10, GenParams{.density = 0.3}, seed);
      const auto reach = rt::forward_reach(g);
      LabelSet a = in_graph(g, std::vector<NodeId>{g.target()});
      for (NodeId u = 0; u < g.n(); ++u)
        REQUIRE(a.test(u) == reach[u].test(g.target()));
      // monotone: A subset of B implies in_graph(A) subset of in_graph(B)
      LabelSet b = in_graph(g, std::vector<NodeId>{0, g.target()});
      REQUIRE(a.is_subset_of(b));
    }
  }
}

TEST_CASE("layer_decomposition") {
  SUBCASE("chain") {
    auto ld = layer_decomposition(Digraph(3, 2, {{0, 1}, {1, 2}}));
    CHECK(ld.delta == std::vector<int>{2, 1, 0});
    CHECK(ld.max_delta == 2);
    CHECK(ld.layers[0] == std::vector<NodeId>{0});
    CHECK(ld.layers[1] == std::vector<NodeId>{1});
    CHECK(ld.layers[2] == std::vector<NodeId>{2});
  }
  SUBCASE("symmetric diamond") {
    auto ld = layer_decomposition(Digraph(4, 3, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}));
    CHECK(ld.delta[0] == 2);
    CHECK(ld.layers[0] == std::vector<NodeId>{0});
    CHECK(ld.layers[1] == std::vector<NodeId>{1, 2});
    CHECK(ld.layers[2] == std::vector<NodeId>{3});
  }
  SUBCASE("rejects cyclic input") {
    CHECK_THROWS_AS(layer_decomposition(Digraph(3, 2, {{0, 1}, {1, 0}, {1, 2}})),
                    std::invalid_argument);
  }
  SUBCASE("matches the exhaustive longest-path oracle") {
    for (Seed seed = 0; seed < 30; ++seed) {
      Digraph g = generate("random_dag", 10, GenParams{.density = 0.3}, seed);
      auto ld = layer_decomposition(g);
      for (NodeId v = 0; v < g.n(); ++v)
        REQUIRE(ld.delta[v] == rt::longest_path_to(g, v, g.target()));
      // every edge drops the longest-path length by at least one
      for (auto [u, v] : g.edges()) REQUIRE(ld.delta[u] >= ld.delta[v] + 1);
      // the top layer has no incoming edges
      for (auto [u, v] : g.edges()) REQUIRE(ld.layer_of(v) != 0);
    }
  }
}

TEST_CASE("generators") {
  SUBCASE("star shape") {
    Digraph g = generate("star", 5, {}, 0);
    CHECK(g.edge_count() == 4);
    CHECK(g.target() == 4);
    for (NodeId v = 0; v < 4; ++v) CHECK(g.has_edge(v, 4));
  }
  SUBCASE("scc_chain blocks match compute_scc") {
    GenParams p;
    p.sizes = {3, 2};
    Digraph g = generate("scc_chain", 5, p, 7);
    auto part = compute_scc(g);
    REQUIRE(part.components.size() == 2);
    CHECK(part.components[part.condensation_order[0]].size() == 3);
    CHECK(part.components[part.condensation_order[1]].size() == 2);
    CHECK_THROWS_AS(generate("scc_chain", 6, p, 7), std::invalid_argument);
  }
  SUBCASE("determinism") {
    Digraph a = generate("random_dag", 64, GenParams{.density = 0.1}, 7);
    Digraph b = generate("random_dag", 64, GenParams{.density = 0.1}, 7);
    CHECK(a.edges() == b.edges());
  }
  SUBCASE("every generated instance reaches the target") {
    for (const auto& kind : generator_kinds())
      for (Seed seed = 0; seed < 10; ++seed) {
        Digraph g = generate(kind, 17, GenParams{.density = 0.15, .width = 4}, seed);
        CAPTURE(kind);
        REQUIRE(validate_target_reachable(g));
      }
  }
  SUBCASE("random dags are acyclic") {
    for (Seed seed = 0; seed < 10; ++seed) {
      CHECK(is_acyclic(generate("random_dag", 24, GenParams{.density = 0.2}, seed)));
      CHECK(is_acyclic(generate("layered_dag", 24, GenParams{.width = 5}, seed)));
    }
  }
}

TEST_CASE("graph text round-trip") {
  Digraph g = generate("layered_dag", 12, GenParams{.width = 3}, 3);
  Digraph back = Digraph::from_text(g.to_text());
  CHECK(back.n() == g.n());
  CHECK(back.target() == g.target());
  CHECK(back.edges() == g.edges());
  // comments and blank lines are tolerated
  Digraph c = Digraph::from_text("# comment\n3 2\n0 1\n\n1 2\n");
  CHECK(c.edge_count() == 2);
}

}  // TEST_SUITE
