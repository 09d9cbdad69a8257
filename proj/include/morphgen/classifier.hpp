#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "morphgen/corpus.hpp"
#include "morphgen/network.hpp"
#include "morphgen/prediction.hpp"

namespace morphgen {

// Small-corpus settings: number uses window 9 / filter 7 / 7000
// words, gender window 7 / filter 5 / 9000 words.
Hyperparameters default_hyperparameters(Task task);

struct Model {
  Task task = Task::Number;
  Hyperparameters hyper;
  std::uint64_t vocab_hash = 0;
  Parameters<float> params;

  friend bool operator==(const Model&, const Model&) = default;
};

// Uniform(-0.08, 0.08) weights, zero biases, forget-gate bias 1.
Model init_model(Task task, const Hyperparameters& hyper, std::uint64_t vocab_hash);

ProbDist forward(const Model& model, const Window& window);

// Gradient of the cross-entropy loss for one example.
Gradients<float> backward(const Model& model, const Window& window, const ClassLabel& gold);

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0;
  double train_accuracy = 0;
  double heldout_accuracy = 0;    // NaN without a held-out set
  double selection_accuracy = 0;  // NaN without a selection set
};

struct TrainResult {
  Model model;
  std::vector<EpochStats> epochs;
  std::size_t best_epoch = 0;  // epoch whose parameters `model` holds
};

// Mini-batch SGD or Adam. With a selection set the returned model is the one
// from the epoch with the best accuracy on it (earliest on ties); without one
// it is the last epoch. When `log` is set, writes one
// `epoch TAB loss TAB train_acc TAB heldout_acc` line per epoch.
TrainResult train(std::span<const LabeledExample> train_set, std::span<const LabeledExample> heldout,
                  Task task, const Hyperparameters& hyper, std::uint64_t vocab_hash, std::ostream* log = nullptr,
                  std::span<const LabeledExample> selection = {});

double accuracy(const Model& model, std::span<const LabeledExample> examples);

// Binary container: "MORPHGEN" magic, u32 version, task, hyperparameters,
// vocabulary hash, then each tensor as a u64 element count followed by
// little-endian float32 values.
void save_model(std::ostream& out, const Model& model);
void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(std::istream& in, std::string_view source = "<stream>");
Model load_model(const std::filesystem::path& path);

// A model paired with the vocabulary it was trained on.
class TaskClassifier {
 public:
  // Throws DataError when the vocabulary hash differs from the model's.
  TaskClassifier(Model model, const Vocabulary& vocab);

  const Model& model() const { return model_; }
  const Vocabulary& vocab() const { return *vocab_; }
  Task task() const { return model_.task; }
  ProbDist classify(const Sentence& simplified, std::size_t position) const;

 private:
  Model model_;
  const Vocabulary* vocab_;
};

// Distributions for every token with the matching slot; either classifier
// may be null, leaving that task empty.
std::vector<TokenPrediction> predict_sentence(const TaskClassifier* gender, const TaskClassifier* number,
                                              const Sentence& simplified);

}  // namespace morphgen
