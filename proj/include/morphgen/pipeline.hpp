#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "morphgen/classifier.hpp"
#include "morphgen/config.hpp"
#include "morphgen/fullform.hpp"
#include "morphgen/ngram_lm.hpp"
#include "morphgen/rescoring.hpp"
#include "morphgen/rules.hpp"

namespace morphgen {

struct PipelineConfig {
  // Relative paths in a config file resolve against the file's directory.
  std::filesystem::path grammar;
  std::filesystem::path lexicon;
  std::filesystem::path slots;  // empty: compiled-in table
  std::filesystem::path work_dir = "work";
  std::filesystem::path corpus_dir;  // empty: <work_dir>/corpus

  Scheme scheme = Scheme::NumberAndGender;
  Hyperparameters gender = default_hyperparameters(Task::Gender);
  Hyperparameters number = default_hyperparameters(Task::Number);
  std::size_t gender_vocab_limit = 9000;
  std::size_t number_vocab_limit = 7000;

  int lm_order = 3;
  std::size_t k_best = 10;
  double lambda = 0.5;
  bool lambda_from_tuning = false;  // `lambda = tuned`
  std::vector<double> lambda_grid{0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0};
  RescoringMode rescoring = RescoringMode::NumberOnly;
  std::uint64_t seed = 42;

  std::size_t synthetic_train = 10000;
  std::size_t synthetic_heldout = 1000;
  std::size_t synthetic_dev = 500;

  static PipelineConfig from(const KeyValueConfig& kv, const std::filesystem::path& base_dir);
  static PipelineConfig load(const std::filesystem::path& path);

  // Overrides the seed everywhere it is used.
  void set_seed(std::uint64_t s);

  Hyperparameters& hyper(Task t) { return t == Task::Gender ? gender : number; }
  const Hyperparameters& hyper(Task t) const { return t == Task::Gender ? gender : number; }
  std::size_t vocab_limit(Task t) const { return t == Task::Gender ? gender_vocab_limit : number_vocab_limit; }

  const SlotTable& slot_table() const;

  std::filesystem::path corpus_path(std::string_view split, std::string_view kind) const;
  std::filesystem::path vocab_path(Task t) const;
  std::filesystem::path dataset_path(Task t, std::string_view split) const;
  std::filesystem::path model_path(Task t) const;
  std::filesystem::path train_log_path(Task t) const;
  std::filesystem::path lm_path() const;
  std::filesystem::path priors_path() const;
  std::filesystem::path tuned_lambda_path() const;

 private:
  std::optional<SlotTable> table_;
};

// ---- stages ----

// Writes train/heldout/dev splits under corpus_dir: `<split>.tagged` (full
// tags), `<split>.simplified` and `<split>.txt` (reference surface text).
void cmd_synthesize_corpus(const PipelineConfig& cfg, std::ostream& log);

// Vocabularies, cached datasets (train, heldout, dev), LM and inflection priors from the training
// split.
void cmd_prepare(const PipelineConfig& cfg, std::ostream& log);

// Trains one classifier, keeping the epoch that scores best on the dev split.
// Throws UsageError for epochs < 1.
TrainResult cmd_train(const PipelineConfig& cfg, Task task, std::ostream& log);

// Loaded models, vocabularies, LM and lexicon.
struct Resources {
  Vocabulary gender_vocab;
  Vocabulary number_vocab;
  std::optional<TaskClassifier> gender;
  std::optional<TaskClassifier> number;
  NGramModel lm;
  Lexicon lexicon;

  static std::unique_ptr<Resources> load(const PipelineConfig& cfg, bool with_models = true);
};

using SentencePredictions = std::vector<TokenPrediction>;

std::vector<SentencePredictions> predict_corpus(const Resources& res, const Corpus& simplified);

// Probability 1 on the gold class of every classifiable token.
std::vector<SentencePredictions> oracle_predictions(const Corpus& full);

// `sentence_id TAB token_id TAB task TAB p0,p1,p2`, one line per distribution.
void write_predictions(std::ostream& out, const std::vector<SentencePredictions>& preds);
std::vector<SentencePredictions> read_predictions(std::istream& in, const Corpus& simplified,
                                                  std::string_view source = "<stream>");

// Drops distributions for slots that the input already specifies (anything
// other than the G / N placeholders).
SentencePredictions mask_predictions(const Sentence& simplified, const SentencePredictions& preds);

struct DecodeSettings {
  RescoringMode mode = RescoringMode::NumberOnly;
  std::size_t k = 10;
  double lambda = 0.5;
};

struct DecodedSentence {
  std::vector<std::string> tokens;  // final surface tokens, lowercase
  Sentence tags;                    // chosen full tags
  std::vector<Path> candidates;
  std::vector<std::vector<std::string>> candidate_tokens;
  std::vector<Sentence> candidate_tags;
  std::size_t chosen = 0;
  RuleReport rules;
  std::size_t lemma_fallbacks = 0;
};

DecodedSentence decode_sentence(const Sentence& simplified, const SentencePredictions& preds, const Lexicon& lexicon,
                                const NGramModel* lm, const DecodeSettings& settings);

struct GenerateOptions {
  std::filesystem::path input;             // simplified tagged text
  std::filesystem::path output;            // surface text; empty = log stream
  std::filesystem::path tags_output;       // chosen full tags (optional)
  std::filesystem::path nbest_output;      // n-best list (optional)
  std::filesystem::path predictions_input; // reuse classifier output (optional)
  std::filesystem::path rules_output;      // rule applications TSV (optional)
  std::filesystem::path trace_dir;         // per-stage files (optional)
  bool fail_fast = false;
  bool oracle = false;                     // input is a full corpus; use gold classes
};

struct GenerateSummary {
  std::size_t sentences = 0;
  std::size_t failed = 0;
  std::size_t lemma_fallbacks = 0;
  std::map<std::string, std::size_t> rule_counts;
};

GenerateSummary cmd_generate(const PipelineConfig& cfg, const GenerateOptions& opts, std::ostream& out,
                             std::ostream& err);

// ---- evaluation ----

struct TaskScore {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::array<std::array<std::size_t, 3>, 3> confusion{};  // [gold][predicted]
  double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 1.0; }
};

struct EvaluationReport {
  TaskScore gender;
  TaskScore number;
  std::optional<TaskScore> oracle_gender;
  std::optional<TaskScore> oracle_number;
  std::size_t tokens = 0;
  std::size_t recovered = 0;
  std::map<std::string, std::size_t> rule_counts;

  double recovery() const { return tokens ? static_cast<double>(recovered) / static_cast<double>(tokens) : 1.0; }
  void write(std::ostream& out) const;
};

// Classification accuracy of hypothesis tags against the full reference,
// over tokens where needs_classification holds. `nbest` adds the oracle.
void score_tags(EvaluationReport& report, const Corpus& hypothesis, const Corpus& reference,
                const std::vector<std::vector<Sentence>>* nbest = nullptr);
void score_text(EvaluationReport& report, const std::vector<std::vector<std::string>>& hypothesis,
                const std::vector<std::vector<std::string>>& reference);

struct EvaluateOptions {
  std::filesystem::path hypothesis_tags;
  std::filesystem::path reference_tags;
  std::filesystem::path nbest_tags;      // optional, from --trace
  std::filesystem::path hypothesis_text; // optional
  std::filesystem::path reference_text;  // optional
  std::filesystem::path rules_trace;     // optional
};

EvaluationReport cmd_evaluate(const PipelineConfig& cfg, const EvaluateOptions& opts);

struct LambdaPoint {
  double lambda = 0;
  double number_accuracy = 0;
  double gender_accuracy = 0;
};

// Grid search on the dev split; writes the winner (ties: smaller lambda).
double cmd_tune_lambda(const PipelineConfig& cfg, std::ostream& log, std::vector<LambdaPoint>* curve = nullptr);

// Reads the tuned value when the config asks for it.
double effective_lambda(const PipelineConfig& cfg);

// Text helpers shared by the CLI and tests.
std::vector<std::vector<std::string>> read_token_lines(const std::filesystem::path& path);
std::vector<std::vector<Sentence>> read_nbest_tags(const std::filesystem::path& path, std::size_t sentences,
                                                   const SlotTable& table);

}  // namespace morphgen
