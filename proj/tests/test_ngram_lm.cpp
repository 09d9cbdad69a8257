#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "lm_oracle.hpp"
#include "morphgen/error.hpp"
#include "morphgen/ngram_lm.hpp"
#include "morphgen/random.hpp"

namespace morphgen {
namespace {

using Sentences = NGramModel::Sentences;

Sentences toy_corpus(std::uint64_t seed, std::size_t vocab, std::size_t sentences) {
  Rng rng(seed);
  Sentences out;
  for (std::size_t s = 0; s < sentences; ++s) {
    std::vector<std::string> sent;
    const std::size_t len = 1 + rng.below(8);
    for (std::size_t i = 0; i < len; ++i) {
      // Skewed draws so counts of one and two both occur.
      const std::size_t w = std::min(rng.below(vocab), rng.below(vocab));
      sent.push_back("w" + std::to_string(w));
    }
    out.push_back(sent);
  }
  return out;
}

TEST(NGram, UnigramSymmetryByHand) {
  auto m = NGramModel::train({{"a", "b"}}, 1);
  // Counts a=b=</s>=1: n2 = 0 so the discount falls back to 0.5.
  // p(a) = 0.5/3 + (0.5*3/3) / 4 predictable words.
  const double expected = 0.5 / 3 + 0.5 / 4;
  EXPECT_NEAR(std::exp(m.log_prob({}, "a")), expected, 1e-12);
  EXPECT_DOUBLE_EQ(m.log_prob({}, "a"), m.log_prob({}, "b"));
  EXPECT_NEAR(std::exp(m.log_prob({}, "<unk>")), 0.125, 1e-12);
}

TEST(NGram, Errors) {
  EXPECT_THROW(NGramModel::train({{"a"}}, 0), UsageError);
  EXPECT_THROW(NGramModel::train({}, 2), DataError);
  EXPECT_THROW(NGramModel::train({{}}, 2), DataError);
  EXPECT_THROW(NGramModel::train({{"a", "<s>"}}, 2), DataError);
}

TEST(NGram, MatchesRecursiveOracle) {
  for (int order : {1, 2, 3, 4}) {
    auto corpus = toy_corpus(static_cast<std::uint64_t>(order), 8, 40);
    auto m = NGramModel::train(corpus, order);
    testing::KneserNeyOracle oracle(corpus, order);
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::string> ctx;
      if (rng.below(3) == 0) ctx.push_back("<s>");
      const std::size_t len = rng.below(4);
      for (std::size_t i = 0; i < len; ++i) ctx.push_back("w" + std::to_string(rng.below(9)));  // w8 is unseen
      const std::string w = rng.below(10) == 0 ? "</s>" : "w" + std::to_string(rng.below(8));
      auto ctx_mapped = ctx;
      for (auto& c : ctx_mapped) {
        if (m.id(c) == m.id("<unk>")) c = "<unk>";
      }
      EXPECT_NEAR(std::exp(m.log_prob(ctx, w)), oracle.prob(ctx_mapped, w), 1e-10) << "order " << order;
    }
  }
}

double context_mass(const NGramModel& m, const std::vector<std::uint32_t>& ctx) {
  const auto bos = m.id("<s>");
  double sum = 0;
  for (std::uint32_t w = 0; w < m.vocabulary().size(); ++w) {
    if (w != bos) sum += std::pow(10.0, m.log10_prob(ctx, w));
  }
  return sum;
}

TEST(NGram, EveryContextNormalizes) {
  auto corpus = toy_corpus(3, 20, 300);
  for (int order : {1, 2, 3, 5}) {
    auto m = NGramModel::train(corpus, order);
    Rng rng(static_cast<std::uint64_t>(order));
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::uint32_t> ctx;
      const std::size_t len = rng.below(static_cast<std::size_t>(order));
      for (std::size_t i = 0; i < len; ++i) ctx.push_back(static_cast<std::uint32_t>(rng.below(m.vocabulary().size())));
      EXPECT_NEAR(context_mass(m, ctx), 1.0, 1e-9);
    }
  }
}

TEST(NGram, ScoreSequenceDefinition) {
  auto corpus = toy_corpus(4, 10, 100);
  auto m = NGramModel::train(corpus, 3);
  EXPECT_DOUBLE_EQ(m.score_sequence({}), m.log_prob({"<s>"}, "</s>"));
  std::vector<std::string> s{"w1", "w2", "w3"};
  const double by_hand = m.log_prob({"<s>"}, "w1") + m.log_prob({"<s>", "w1"}, "w2") + m.log_prob({"w1", "w2"}, "w3") +
                         m.log_prob({"w2", "w3"}, "</s>");
  EXPECT_NEAR(m.score_sequence(s), by_hand, 1e-12);
  // OOV scores as <unk>.
  EXPECT_DOUBLE_EQ(m.score_sequence(std::vector<std::string>{"zzz"}),
                   m.score_sequence(std::vector<std::string>{"<unk>"}));
  EXPECT_TRUE(std::isfinite(m.score_sequence(std::vector<std::string>{"zzz", "yyy"})));
}

TEST(NGram, MarkovProperty) {
  auto corpus = toy_corpus(5, 10, 200);
  auto m = NGramModel::train(corpus, 3);
  EXPECT_DOUBLE_EQ(m.log_prob({"w5", "w1", "w2"}, "w3"), m.log_prob({"w0", "w1", "w2"}, "w3"));
}

TEST(NGram, TrainingPerplexityBeatsUniform) {
  auto corpus = toy_corpus(6, 20, 100);
  auto m = NGramModel::train(corpus, 3);
  double lm = 0, uniform = 0;
  const double v = static_cast<double>(m.vocabulary().size() - 1);
  for (const auto& s : corpus) {
    lm += m.score_sequence(s);
    uniform -= static_cast<double>(s.size() + 1) * std::log(v);
  }
  EXPECT_GT(lm, uniform);
}

TEST(NGram, ArpaRoundTripIsExact) {
  auto corpus = toy_corpus(7, 15, 150);
  auto m = NGramModel::train(corpus, 3);
  std::stringstream s;
  m.save_arpa(s);
  auto back = NGramModel::load_arpa(s);
  EXPECT_EQ(back.order(), 3);
  for (int k = 1; k <= 3; ++k) EXPECT_EQ(back.ngram_count(k), m.ngram_count(k));
  for (const auto& sent : corpus) EXPECT_EQ(back.score_sequence(sent), m.score_sequence(sent));
  std::stringstream again;
  back.save_arpa(again);
  EXPECT_EQ(again.str(), s.str());
  std::istringstream bad("\\data\\\nngram 1=2\n\n\\1-grams:\n-1\ta\n\\end\\\n");
  EXPECT_THROW(NGramModel::load_arpa(bad), ParseError);
}

TEST(NGram, AddingASentenceKeepsScoresFinite) {
  auto corpus = toy_corpus(8, 10, 50);
  auto before = NGramModel::train(corpus, 2);
  EXPECT_EQ(before.id("fresh"), before.id("<unk>"));
  corpus.push_back({"fresh", "w1"});
  auto after = NGramModel::train(corpus, 2);
  EXPECT_NE(after.id("fresh"), after.id("<unk>"));
  EXPECT_GT(after.log_prob({"<s>"}, "fresh"), before.log_prob({"<s>"}, "fresh") - 1e9);
  for (const auto& s : corpus) EXPECT_TRUE(std::isfinite(after.score_sequence(s)));
}

}  // namespace
}  // namespace morphgen
