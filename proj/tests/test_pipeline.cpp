#include <gtest/gtest.h>

#include <sstream>

#include "morphgen/error.hpp"
#include "morphgen/pipeline.hpp"
#include "morphgen/text.hpp"
#include "test_util.hpp"

namespace morphgen {
namespace {

namespace fs = std::filesystem;

Sentence sent(const std::string& line) {
  std::istringstream in(line);
  return read_corpus(in).at(0);
}

KeyValueConfig kv_of(const std::string& text) {
  std::istringstream in(text);
  return KeyValueConfig::parse(in, "test.cfg");
}

// Tiny networks over a few hundred synthetic sentences.
PipelineConfig small_config(const fs::path& work, std::uint64_t seed = 7) {
  const auto root = testing::source_dir();
  std::ostringstream cfg;
  cfg << "grammar = " << (root / "data/grammar.cfg").string() << "\n"
      << "lexicon = " << (root / "data/lexicon.tsv").string() << "\n"
      << "work_dir = " << work.string() << "\n"
      << "seed = " << seed << "\n"
      << "synthetic.train = 300\nsynthetic.heldout = 40\nsynthetic.dev = 40\n"
      << "lambda = 0.3\n";
  for (const char* t : {"gender", "number"}) {
    cfg << t << ".window = 5\n" << t << ".filter = 3\n" << t << ".embedding = 8\n"
        << t << ".filters = 6\n" << t << ".lstm = 5\n" << t << ".epochs = 2\n" << t << ".vocab = 300\n";
  }
  return PipelineConfig::from(kv_of(cfg.str()), work);
}

TEST(Config, DefaultsAndRelativePaths) {
  auto c = PipelineConfig::from(kv_of("grammar = g.cfg\nwork_dir = out\nlambda = tuned\nseed = 9\n"), "/base/dir");
  EXPECT_EQ(c.grammar, fs::path("/base/dir/g.cfg"));
  EXPECT_EQ(c.work_dir, fs::path("/base/dir/out"));
  EXPECT_TRUE(c.lambda_from_tuning);
  EXPECT_EQ(c.scheme, Scheme::NumberAndGender);
  EXPECT_EQ(c.rescoring, RescoringMode::NumberOnly);
  EXPECT_EQ(c.number.rng_seed, 9u);
  EXPECT_EQ(c.gender.rng_seed, 9u);
  EXPECT_EQ(c.number.window_length, 9u);
  EXPECT_EQ(c.gender.window_length, 7u);
  EXPECT_EQ(c.number.vocab_size, 7002u);
  EXPECT_EQ(c.number.optimizer, Optimizer::Sgd);
  EXPECT_EQ(PipelineConfig::from(kv_of("gender.optimizer = adam\n"), ".").gender.optimizer, Optimizer::Adam);
  EXPECT_EQ(c.corpus_path("dev", "tagged"), fs::path("/base/dir/out/corpus/dev.tagged"));
}

TEST(Config, Errors) {
  EXPECT_THROW(PipelineConfig::from(kv_of("lamda = 0.5\n"), "."), UsageError);
  EXPECT_THROW(PipelineConfig::from(kv_of("lm.order = 0\n"), "."), UsageError);
  EXPECT_THROW(PipelineConfig::from(kv_of("k_best = 0\n"), "."), UsageError);
  EXPECT_THROW(PipelineConfig::from(kv_of("number.window = 4\n"), "."), UsageError);
  EXPECT_THROW(PipelineConfig::from(kv_of("scheme = plural\n"), "."), Error);
  EXPECT_THROW(PipelineConfig::from(kv_of("gender.optimizer = rmsprop\n"), "."), UsageError);
  try {
    PipelineConfig::from(kv_of("lamda = 0.5\n"), ".");
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("lamda"), std::string::npos);
  }
}

TEST(Config, ShippedDefaultLoads) {
  auto c = PipelineConfig::load(testing::source_dir() / "configs/default.cfg");
  EXPECT_TRUE(fs::exists(c.grammar));
  EXPECT_TRUE(fs::exists(c.lexicon));
  EXPECT_EQ(c.k_best, 10u);
  EXPECT_EQ(c.seed, 42u);
}

TEST(Predictions, MaskKeepsOnlyPlaceholders) {
  auto s = sent("el[DA0MN0] casa[NCGN000] de[SPS00]");
  SentencePredictions p(3);
  for (auto& t : p) {
    t.gender = ProbDist{{0.2, 0.7, 0.1}};
    t.number = ProbDist{{0.6, 0.3, 0.1}};
  }
  auto m = mask_predictions(s, p);
  EXPECT_FALSE(m[0].gender.has_value());
  EXPECT_TRUE(m[0].number.has_value());
  EXPECT_TRUE(m[1].gender.has_value());
  EXPECT_TRUE(m[1].number.has_value());
  EXPECT_FALSE(m[2].gender.has_value());
  EXPECT_FALSE(m[2].number.has_value());
  EXPECT_THROW(mask_predictions(s, SentencePredictions(2)), DataError);
}

TEST(Predictions, WriteReadRoundTrip) {
  Corpus c{sent("el[DA0GN0] casa[NCGN000] .[Fp]"), sent("uno[DI0GN0] .[Fp]")};
  std::vector<SentencePredictions> p{SentencePredictions(3), SentencePredictions(2)};
  p[0][1].gender = ProbDist{{0.1, 0.8, 0.1}};
  p[0][1].number = ProbDist{{1.0 / 3, 0.5, 1.0 / 6}};
  p[1][0].number = ProbDist{{0.25, 0.75, 0}};
  std::stringstream s;
  write_predictions(s, p);
  auto back = read_predictions(s, c);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0][1].gender->probs, p[0][1].gender->probs);
  EXPECT_EQ(back[0][1].number->probs, p[0][1].number->probs);
  EXPECT_EQ(back[1][0].number->probs, p[1][0].number->probs);
  EXPECT_FALSE(back[1][0].gender.has_value());
  std::istringstream bad("5\t0\tnumber\t0.1,0.2,0.7\n");
  EXPECT_THROW(read_predictions(bad, c), ParseError);
  std::istringstream short_probs("0\t0\tnumber\t0.1,0.9\n");
  EXPECT_THROW(read_predictions(short_probs, c), ParseError);
}

TEST(Predictions, OracleIsOneHotOnGold) {
  auto full = sent("el[DA0FP0] casa[NCFP000] verde[AQ0CP0] de[SPS00]");
  auto p = oracle_predictions({full});
  ASSERT_EQ(p[0].size(), 4u);
  EXPECT_EQ(p[0][0].gender->argmax(), 1);
  EXPECT_EQ(p[0][0].number->argmax(), 1);
  EXPECT_EQ(p[0][2].gender->argmax(), 2);
  EXPECT_EQ(p[0][2].gender->probs[2], 1.0);
  EXPECT_FALSE(p[0][3].gender.has_value());
}

TEST(Evaluate, ScoresAgainstReference) {
  Corpus ref{sent("el[DA0FP0] casa[NCFP000] verde[AQ0CP0] .[Fp]")};
  EvaluationReport same;
  score_tags(same, ref, ref);
  EXPECT_EQ(same.number.accuracy(), 1.0);
  EXPECT_EQ(same.gender.accuracy(), 1.0);
  EXPECT_EQ(same.number.total, 3u);

  // Singular everywhere: none of the three plural positions is right.
  Corpus hyp{sent("el[DA0FS0] casa[NCFS000] verde[AQ0CS0] .[Fp]")};
  EvaluationReport r;
  score_tags(r, hyp, ref);
  EXPECT_EQ(r.number.correct, 0u);
  EXPECT_EQ(r.number.confusion[1][0], 3u);
  EXPECT_EQ(r.gender.accuracy(), 1.0);

  // A failed sentence (empty hypothesis) counts as wrong, not skipped.
  EvaluationReport f;
  score_tags(f, Corpus{Sentence{}}, ref);
  EXPECT_EQ(f.number.total, 3u);
  EXPECT_EQ(f.number.correct, 0u);

  EXPECT_THROW(score_tags(r, Corpus{}, ref), DataError);
  Corpus other_lemma{sent("un[DA0FP0] casa[NCFP000] verde[AQ0CP0] .[Fp]")};
  EXPECT_THROW(score_tags(r, other_lemma, ref), DataError);
}

TEST(Evaluate, OracleTakesBestCandidate) {
  Corpus ref{sent("el[DA0FP0] casa[NCFP000] .[Fp]")};
  Corpus hyp{sent("el[DA0FS0] casa[NCFS000] .[Fp]")};
  std::vector<std::vector<Sentence>> nbest{{hyp[0], ref[0]}};
  EvaluationReport r;
  score_tags(r, hyp, ref, &nbest);
  EXPECT_EQ(r.number.accuracy(), 0.0);
  EXPECT_EQ(r.oracle_number->accuracy(), 1.0);
}

TEST(Evaluate, TokenRecovery) {
  EvaluationReport r;
  score_text(r, {{"La", "casa"}, {}}, {{"la", "casa"}, {"x"}});
  EXPECT_EQ(r.tokens, 3u);
  EXPECT_EQ(r.recovered, 2u);
  EXPECT_THROW(score_text(r, {{"a"}}, {{"a", "b"}}), DataError);
}

class SmallPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir("pipeline");
    cfg_ = new PipelineConfig(small_config(dir_->path()));
    std::ostringstream log;
    cmd_synthesize_corpus(*cfg_, log);
    cmd_prepare(*cfg_, log);
    cmd_train(*cfg_, Task::Gender, log);
    cmd_train(*cfg_, Task::Number, log);
  }
  static void TearDownTestSuite() {
    delete cfg_;
    delete dir_;
  }
  static testing::TempDir* dir_;
  static PipelineConfig* cfg_;
};

testing::TempDir* SmallPipeline::dir_ = nullptr;
PipelineConfig* SmallPipeline::cfg_ = nullptr;

TEST_F(SmallPipeline, OracleRoundTripRecoversText) {
  std::ostringstream out, err;
  GenerateOptions opts;
  opts.input = cfg_->corpus_path("heldout", "tagged");
  opts.oracle = true;
  auto summary = cmd_generate(*cfg_, opts, out, err);
  EXPECT_EQ(summary.failed, 0u) << err.str();
  EXPECT_EQ(summary.sentences, 40u);
  std::vector<std::vector<std::string>> hyp;
  std::istringstream lines(out.str());
  for (std::string l; std::getline(lines, l);) hyp.push_back(text::split_whitespace(l));
  EvaluationReport r;
  score_text(r, hyp, read_token_lines(cfg_->corpus_path("heldout", "txt")));
  EXPECT_EQ(r.recovery(), 1.0);
}

TEST_F(SmallPipeline, OffModeIsGreedy) {
  auto res = Resources::load(*cfg_);
  const auto simplified = load_corpus(cfg_->corpus_path("dev", "simplified"));
  const auto preds = predict_corpus(*res, simplified);
  for (std::size_t i = 0; i < simplified.size(); ++i) {
    auto d = decode_sentence(simplified[i], preds[i], res->lexicon, &res->lm, {RescoringMode::Off, 10, 0.3});
    ASSERT_EQ(d.candidates.size(), 1u);
    const auto masked = mask_predictions(simplified[i], preds[i]);
    for (std::size_t t = 0; t < masked.size(); ++t) {
      if (masked[t].number) {
        EXPECT_EQ(extract_label(d.tags[t], Task::Number).index, masked[t].number->argmax());
      }
    }
    // Lambda 0 with K-best keeps the classifier's best path.
    auto k = decode_sentence(simplified[i], preds[i], res->lexicon, &res->lm, {RescoringMode::NumberOnly, 10, 0.0});
    EXPECT_EQ(k.tags, d.tags);
  }
}

TEST_F(SmallPipeline, GenerateWritesTraceFilesAndRejectsBadInput) {
  const auto input = dir_->path() / "mixed.simplified";
  {
    std::ofstream f(input);
    f << "el[DA0GN0] casa[NCGN000] .[Fp]\n"
      << "el[DA0GN0] casa[NCQN000] .[Fp]\n";
  }
  std::ostringstream out, err;
  GenerateOptions opts;
  opts.input = input;
  EXPECT_THROW(cmd_generate(*cfg_, opts, out, err), ParseError);

  {
    std::ofstream f(input);
    f << "el[DA0GN0] casa[NCGN000] .[Fp]\nel[DA0GN0] casa[NCGN000] .[Fp]\n";
  }
  opts.trace_dir = dir_->path() / "trace";
  out.str("");
  auto s = cmd_generate(*cfg_, opts, out, err);
  EXPECT_EQ(s.failed, 0u);
  for (const char* f : {"predictions.tsv", "nbest.txt", "nbest.tags", "rules.tsv", "output.tagged", "output.txt"}) {
    EXPECT_TRUE(fs::exists(opts.trace_dir / f)) << f;
  }
  EXPECT_EQ(testing::slurp(opts.trace_dir / "output.txt"), out.str());
}

TEST_F(SmallPipeline, PredictionsReplayGivesSameOutput) {
  GenerateOptions opts;
  opts.input = cfg_->corpus_path("dev", "simplified");
  opts.trace_dir = dir_->path() / "replay";
  std::ostringstream first, err;
  cmd_generate(*cfg_, opts, first, err);
  GenerateOptions replay;
  replay.input = opts.input;
  replay.predictions_input = opts.trace_dir / "predictions.tsv";
  std::ostringstream second;
  cmd_generate(*cfg_, replay, second, err);
  EXPECT_EQ(first.str(), second.str());
}

TEST_F(SmallPipeline, PrepareIsIdempotent) {
  const auto before = testing::slurp(cfg_->dataset_path(Task::Number, "train"));
  const auto lm = testing::slurp(cfg_->lm_path());
  std::ostringstream log;
  cmd_prepare(*cfg_, log);
  EXPECT_EQ(testing::slurp(cfg_->dataset_path(Task::Number, "train")), before);
  EXPECT_EQ(testing::slurp(cfg_->lm_path()), lm);
}

TEST_F(SmallPipeline, TuneLambdaWritesGridValue) {
  std::ostringstream log;
  std::vector<LambdaPoint> curve;
  const double best = cmd_tune_lambda(*cfg_, log, &curve);
  EXPECT_EQ(curve.size(), cfg_->lambda_grid.size());
  EXPECT_NE(std::find(cfg_->lambda_grid.begin(), cfg_->lambda_grid.end(), best), cfg_->lambda_grid.end());
  auto tuned = *cfg_;
  tuned.lambda_from_tuning = true;
  EXPECT_EQ(effective_lambda(tuned), best);
}

TEST(Pipeline, MissingCorpusNamesThePath) {
  testing::TempDir dir("missing");
  auto cfg = small_config(dir.path());
  std::ostringstream log;
  try {
    cmd_prepare(cfg, log);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("train.tagged"), std::string::npos) << e.what();
    EXPECT_EQ(std::string(e.what()).rfind("prepare: ", 0), 0u) << e.what();
  }
}

TEST(Pipeline, ZeroEpochsIsAUsageError) {
  testing::TempDir dir("epochs");
  auto cfg = small_config(dir.path());
  cfg.number.epochs = 0;
  std::ostringstream log;
  EXPECT_THROW(cmd_train(cfg, Task::Number, log), UsageError);
}

TEST(Pipeline, SynthesizeIsDeterministic) {
  testing::TempDir a("synth-a"), b("synth-b");
  std::ostringstream log;
  cmd_synthesize_corpus(small_config(a.path()), log);
  cmd_synthesize_corpus(small_config(b.path()), log);
  for (const char* f : {"corpus/train.tagged", "corpus/dev.simplified", "corpus/heldout.txt"}) {
    EXPECT_EQ(testing::slurp(a.path() / f), testing::slurp(b.path() / f)) << f;
  }
  testing::TempDir c("synth-c");
  cmd_synthesize_corpus(small_config(c.path(), 8), log);
  EXPECT_NE(testing::slurp(a.path() / "corpus/train.tagged"), testing::slurp(c.path() / "corpus/train.tagged"));
}

}  // namespace
}  // namespace morphgen
