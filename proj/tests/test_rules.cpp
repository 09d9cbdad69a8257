#include <gtest/gtest.h>

#include <sstream>

#include "morphgen/error.hpp"
#include "morphgen/random.hpp"
#include "morphgen/rules.hpp"
#include "morphgen/text.hpp"
#include "rule_table.hpp"
#include "test_util.hpp"

namespace morphgen {
namespace {

std::string syl(std::string_view w) { return text::join(syllabify(w), "-"); }

TEST(Syllabify, Examples) {
  EXPECT_EQ(syl("casa"), "ca-sa");
  EXPECT_EQ(syl("perro"), "pe-rro");
  EXPECT_EQ(syl("calle"), "ca-lle");
  EXPECT_EQ(syl("muchacho"), "mu-cha-cho");
  EXPECT_EQ(syl("hablar"), "ha-blar");
  EXPECT_EQ(syl("atlas"), "a-tlas");  // tl stays together as an onset
  EXPECT_EQ(syl("construir"), "cons-truir");
  EXPECT_EQ(syl("poeta"), "po-e-ta");
  EXPECT_EQ(syl("ciudad"), "ciu-dad");
  EXPECT_EQ(syl("día"), "dí-a");
  EXPECT_EQ(syl("guerra"), "gue-rra");
  EXPECT_EQ(syl("queso"), "que-so");
  EXPECT_EQ(syl("ley"), "ley");
  EXPECT_EQ(syl("haciendo"), "ha-cien-do");
  EXPECT_EQ(syl("examinar"), "e-xa-mi-nar");
  EXPECT_THROW(syllabify("abc1"), DataError);
}

TEST(Stress, Examples) {
  EXPECT_EQ(stressed_syllable("casa"), 0u);
  EXPECT_EQ(stressed_syllable("reloj"), 1u);
  EXPECT_EQ(stressed_syllable("examen"), 1u);
  EXPECT_EQ(stressed_syllable("canción"), 1u);
  EXPECT_EQ(stressed_syllable("árbol"), 0u);
  EXPECT_EQ(stressed_syllable("haciendo"), 1u);
  EXPECT_EQ(stressed_syllable("da"), 0u);
}

TEST(RuleTable, AllCasesPass) {
  const auto cases = testing::load_rule_cases(testing::test_data("rule_cases.tsv"));
  std::size_t clitic = 0;
  for (const auto& c : cases) {
    EXPECT_EQ(testing::run_rule_case(c), c.expected) << c.rule << ": " << c.input;
    clitic += c.rule == "clitic_accentuation";
  }
  EXPECT_GE(cases.size(), 30u);
  EXPECT_GE(clitic, 8u);
}

TEST(Rules, ReportsApplications) {
  std::vector<std::string> t{"padre", "y", "hijo", "diga", "+me"};
  auto r = apply_rules(t);
  EXPECT_EQ(t, (std::vector<std::string>{"padre", "e", "hijo", "dígame"}));
  ASSERT_EQ(r.applied.size(), 2u);
  EXPECT_EQ(r.applied[0].rule, "conjunction");
  EXPECT_EQ(r.applied[0].token_id, 1u);
  EXPECT_EQ(r.applied[1].rule, "clitic_accentuation");
  EXPECT_EQ(r.applied[1].before, "diga +me");
  std::ostringstream out;
  write_rule_trace(out, 4, r);
  EXPECT_EQ(out.str(), "4\t1\tconjunction\ty\te\n4\t3\tclitic_accentuation\tdiga +me\tdígame\n");
}

TEST(Rules, CliticErrorsAndEdges) {
  EXPECT_THROW(clitic_accentuation_rule("diga", {"xx"}), DataError);
  EXPECT_EQ(clitic_accentuation_rule("diga", {}), "diga");
  std::vector<std::string> t{"+se", "fue"};
  accentuation_rule(t);
  EXPECT_EQ(t, (std::vector<std::string>{"se", "fue"}));
  EXPECT_TRUE(is_clitic("Los"));
  EXPECT_FALSE(is_clitic("el"));
}

// Random sequences drawn from words that trigger or almost trigger a rule.
TEST(Rules, IdempotentOnRandomSequences) {
  const std::vector<std::string> pool{"y", "o", "Y", "O", "e", "u", "hijo", "hielo", "ideas", "ocho", "hoy",
                                      "otro", "casa", "diga", "+me", "+lo", "da", "haciendo", "+se", "íntimo",
                                      "hora", "agua", "mirar", "+la"};
  Rng rng(8);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> t;
    const std::size_t n = rng.below(9);
    for (std::size_t i = 0; i < n; ++i) t.push_back(pool[rng.below(pool.size())]);
    auto conj = t;
    conjunction_rule(conj);
    auto conj2 = conj;
    EXPECT_TRUE(conjunction_rule(conj2).applied.empty());
    EXPECT_EQ(conj2, conj);
    auto acc = t;
    accentuation_rule(acc);
    auto acc2 = acc;
    EXPECT_TRUE(accentuation_rule(acc2).applied.empty());
    EXPECT_EQ(acc2, acc);
  }
}

}  // namespace
}  // namespace morphgen
