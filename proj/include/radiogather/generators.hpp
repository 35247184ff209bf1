#pragma once

#include <string>
#include <vector>

#include "radiogather/digraph.hpp"

namespace radiogather {

/// Parameters for the instance generators. Unused fields are ignored by
/// generators that do not take them.
struct GenParams {
  double density = 0.1;          // random_dag: edge probability per forward pair
  int width = 0;                 // layered_dag: layer width; <= 0 means ceil(sqrt(n))
  std::vector<int> sizes;        // scc_chain: strongly connected block sizes, must sum to n
};

/// Deterministic instance generator. Every output passes
/// validate_target_reachable; any node that cannot reach the target gets a
/// fallback edge v -> t.
///
/// kinds: "star", "path", "random_dag", "layered_dag", "scc_chain".
Digraph generate(const std::string& kind, int n, const GenParams& params, Seed seed);

std::vector<std::string> generator_kinds();

}  // namespace radiogather
