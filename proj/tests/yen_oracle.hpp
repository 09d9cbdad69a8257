#pragma once

// Brute-force k-best over a layered graph, and the random graphs used to
// compare it with yen_k_best.

#include <algorithm>
#include <vector>

#include "morphgen/random.hpp"
#include "morphgen/rescoring.hpp"

namespace morphgen::testing {

inline std::vector<Path> brute_force_paths(const SentenceGraph& g) {
  std::vector<Path> all;
  std::vector<int> choice(g.layers.size(), 0);
  while (true) {
    all.push_back(make_path(g, choice));
    std::size_t i = g.layers.size();
    while (i > 0) {
      --i;
      if (++choice[i] < static_cast<int>(g.layers[i].size())) break;
      choice[i] = 0;
      if (i == 0) {
        i = g.layers.size() + 1;
        break;
      }
    }
    if (i == g.layers.size() + 1 || g.layers.empty()) break;
  }
  std::sort(all.begin(), all.end(), [](const Path& a, const Path& b) {
    if (a.classifier_score != b.classifier_score) return a.classifier_score > b.classifier_score;
    return a.choices < b.choices;
  });
  return all;
}

// 1..8 layers; each layer holds one node or a 3-node choice. Some
// distributions repeat a probability so the tie-break is exercised.
inline SentenceGraph random_graph(Rng& rng) {
  SentenceGraph g;
  const std::size_t layers = 1 + rng.below(8);
  for (std::size_t i = 0; i < layers; ++i) {
    auto& layer = g.layers.emplace_back();
    if (rng.below(4) == 0) {
      layer.push_back({});
      continue;
    }
    std::array<double, 3> p{};
    switch (rng.below(3)) {
      case 0: p = {0.25, 0.25, 0.5}; break;
      case 1: p = {1.0 / 3, 1.0 / 3, 1.0 / 3}; break;
      default: {
        double a = rng.uniform(0.01, 1), b = rng.uniform(0.01, 1), c = rng.uniform(0.01, 1);
        const double s = a + b + c;
        p = {a / s, b / s, c / s};
      }
    }
    std::array<std::size_t, 3> order{0, 1, 2};
    rng.shuffle(std::span<std::size_t>(order));
    for (int c = 0; c < 3; ++c) layer.push_back({-1, c, p[order[static_cast<std::size_t>(c)]]});
  }
  return g;
}

}  // namespace morphgen::testing
