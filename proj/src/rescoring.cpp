#include "morphgen/rescoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "morphgen/error.hpp"
#include "morphgen/text.hpp"

namespace morphgen {

std::string_view to_string(RescoringMode mode) {
  switch (mode) {
    case RescoringMode::NumberOnly: return "number";
    case RescoringMode::Joint: return "joint";
    case RescoringMode::Off: return "off";
  }
  return "?";
}

RescoringMode parse_rescoring_mode(std::string_view name) {
  if (name == "number" || name == "number-only") return RescoringMode::NumberOnly;
  if (name == "joint") return RescoringMode::Joint;
  if (name == "off") return RescoringMode::Off;
  throw UsageError("unknown rescoring mode '" + std::string(name) + "' (expected number, joint or off)");
}

std::size_t SentenceGraph::path_count() const {
  std::size_t n = 1;
  for (const auto& l : layers) {
    if (l.empty()) return 0;
    if (n > std::numeric_limits<std::size_t>::max() / l.size()) return std::numeric_limits<std::size_t>::max();
    n *= l.size();
  }
  return n;
}

SentenceGraph build_graph(std::span<const std::optional<ProbDist>> distributions, Task task) {
  SentenceGraph g;
  for (const auto& d : distributions) {
    auto& layer = g.layers.emplace_back();
    if (!d) {
      layer.push_back({});
      continue;
    }
    for (int c = 0; c < 3; ++c) {
      GraphNode node;
      (task == Task::Gender ? node.gender : node.number) = c;
      node.prob = (*d)[c];
      layer.push_back(node);
    }
  }
  return g;
}

SentenceGraph build_graph(std::span<const TokenPrediction> predictions, RescoringMode mode) {
  SentenceGraph g;
  for (const auto& p : predictions) {
    auto& layer = g.layers.emplace_back();
    const int g_best = p.gender ? p.gender->argmax() : -1;
    const int n_best = p.number ? p.number->argmax() : -1;
    switch (mode) {
      case RescoringMode::Off:
        layer.push_back({g_best, n_best, 1.0});
        break;
      case RescoringMode::NumberOnly:
        if (!p.number) {
          layer.push_back({g_best, -1, 1.0});
        } else {
          for (int c = 0; c < 3; ++c) layer.push_back({g_best, c, (*p.number)[c]});
        }
        break;
      case RescoringMode::Joint:
        for (int gc = 0; gc < (p.gender ? 3 : 1); ++gc) {
          for (int nc = 0; nc < (p.number ? 3 : 1); ++nc) {
            GraphNode node{p.gender ? gc : -1, p.number ? nc : -1, 1.0};
            if (p.gender) node.prob *= (*p.gender)[gc];
            if (p.number) node.prob *= (*p.number)[nc];
            layer.push_back(node);
          }
        }
        break;
    }
  }
  return g;
}

double path_score(const SentenceGraph& graph, std::span<const int> choices) {
  double s = 0;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    s += std::log(graph.layers[i][static_cast<std::size_t>(choices[i])].prob);
  }
  return s;
}

Path make_path(const SentenceGraph& graph, std::vector<int> choices) {
  if (choices.size() != graph.layers.size()) throw DataError("path length differs from the number of layers");
  Path p;
  p.classifier_score = path_score(graph, choices);
  p.combined_score = p.classifier_score;
  p.choices = std::move(choices);
  return p;
}

namespace {

int argmax_node(const std::vector<GraphNode>& layer, const std::vector<char>* excluded) {
  int best = -1;
  for (std::size_t j = 0; j < layer.size(); ++j) {
    if (excluded && (*excluded)[j]) continue;
    if (best < 0 || layer[j].prob > layer[static_cast<std::size_t>(best)].prob) best = static_cast<int>(j);
  }
  return best;
}

// Descending score, then lexicographically smaller choices.
struct PathOrder {
  bool operator()(const Path& a, const Path& b) const {
    if (a.classifier_score != b.classifier_score) return a.classifier_score > b.classifier_score;
    return a.choices < b.choices;
  }
};

}  // namespace

Path best_path(const SentenceGraph& graph) {
  if (graph.layers.empty()) throw DataError("empty sentence graph");
  std::vector<int> choices;
  for (const auto& layer : graph.layers) {
    if (layer.empty()) throw DataError("sentence graph has an empty layer");
    choices.push_back(argmax_node(layer, nullptr));
  }
  return make_path(graph, std::move(choices));
}

std::vector<Path> yen_k_best(const SentenceGraph& graph, std::size_t k) {
  if (k < 1) throw UsageError("K must be at least 1");
  std::vector<Path> a{best_path(graph)};
  std::set<Path, PathOrder> b;
  std::set<std::vector<int>> seen{a.front().choices};
  const std::size_t n = graph.layers.size();

  while (a.size() < k) {
    const Path& last = a.back();
    // Deviate from the last accepted path at every spur layer.
    for (std::size_t i = 0; i < n; ++i) {
      const auto& layer = graph.layers[i];
      std::vector<char> excluded(layer.size(), 0);
      for (const auto& p : a) {
        if (std::equal(p.choices.begin(), p.choices.begin() + static_cast<std::ptrdiff_t>(i), last.choices.begin())) {
          excluded[static_cast<std::size_t>(p.choices[i])] = 1;
        }
      }
      const int spur = argmax_node(layer, &excluded);
      if (spur < 0) continue;
      std::vector<int> choices(last.choices.begin(), last.choices.begin() + static_cast<std::ptrdiff_t>(i));
      choices.push_back(spur);
      for (std::size_t j = i + 1; j < n; ++j) choices.push_back(argmax_node(graph.layers[j], nullptr));
      if (seen.insert(choices).second) b.insert(make_path(graph, std::move(choices)));
    }
    if (b.empty()) break;
    a.push_back(*b.begin());
    b.erase(b.begin());
  }
  return a;
}

std::size_t rescore(std::vector<Path>& paths, const std::vector<std::vector<std::string>>& realized,
                    const NGramModel& lm, double lambda) {
  if (!std::isfinite(lambda)) throw UsageError("lambda must be finite");
  if (paths.empty()) throw DataError("no paths to rescore");
  if (realized.size() != paths.size()) throw DataError("realized sentences do not align with paths");
  std::size_t best = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    auto& p = paths[i];
    p.lm_score = lm.score_sequence(realized[i]);
    p.combined_score = p.classifier_score + lambda * p.lm_score;
    if (p.combined_score > paths[best].combined_score) best = i;
  }
  return best;
}

std::string format_nbest_line(std::size_t sentence_id, std::string_view text, const Path& path) {
  return std::to_string(sentence_id) + " ||| " + std::string(text) + " ||| " +
         text::format_double(path.classifier_score) + " " + text::format_double(path.lm_score) + " " +
         text::format_double(path.combined_score);
}

}  // namespace morphgen
