#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "morphgen/ngram_lm.hpp"
#include "morphgen/prediction.hpp"
#include "morphgen/tagset.hpp"

namespace morphgen {

enum class RescoringMode { NumberOnly, Joint, Off };

std::string_view to_string(RescoringMode mode);
RescoringMode parse_rescoring_mode(std::string_view name);

// Class assignment carried by a node; -1 where the token has no such slot.
struct GraphNode {
  int gender = -1;
  int number = -1;
  double prob = 1.0;
};

// One layer per token. Consecutive layers are completely connected, so the
// weight of an edge is the probability of its head node.
struct SentenceGraph {
  std::vector<std::vector<GraphNode>> layers;

  // Number of distinct paths, saturating at SIZE_MAX.
  std::size_t path_count() const;
};

struct Path {
  std::vector<int> choices;  // node index per layer
  double classifier_score = 0;
  double lm_score = 0;
  double combined_score = 0;
};

// Single-task graph: tokens with a distribution get a 3-node layer.
SentenceGraph build_graph(std::span<const std::optional<ProbDist>> distributions, Task task);

// Pipeline graph. NumberOnly: number layers of 3 nodes, gender fixed to its
// argmax. Joint: gender x number layers of up to 9 nodes. Off: every layer
// holds just the per-task argmax.
SentenceGraph build_graph(std::span<const TokenPrediction> predictions, RescoringMode mode);

// Classifier score of a node choice: left-to-right sum of ln(prob).
double path_score(const SentenceGraph& graph, std::span<const int> choices);
Path make_path(const SentenceGraph& graph, std::vector<int> choices);

// Per-layer argmax; lowest node index wins ties.
Path best_path(const SentenceGraph& graph);

// Yen's k shortest paths over -ln(prob) costs. Paths come out by descending
// classifier score, ties by lexicographically smaller choice vector; fewer
// than K when the graph runs out. Throws UsageError when K < 1.
std::vector<Path> yen_k_best(const SentenceGraph& graph, std::size_t k);

// Index of the path maximizing classifier_score + lambda * lm_score, ties to
// the lower index. Fills lm_score and combined_score of every path.
std::size_t rescore(std::vector<Path>& paths, const std::vector<std::vector<std::string>>& realized,
                    const NGramModel& lm, double lambda);

// `sentence_id ||| text ||| classifier_score lm_score combined_score`
std::string format_nbest_line(std::size_t sentence_id, std::string_view text, const Path& path);

}  // namespace morphgen
