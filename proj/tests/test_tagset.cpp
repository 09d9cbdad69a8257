#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "morphgen/error.hpp"
#include "morphgen/tagset.hpp"
#include "test_util.hpp"

namespace morphgen {
namespace {

TEST(PosTag, NounSlots) {
  auto t = parse_tagged_token("cuestión[NCFS000]");
  EXPECT_EQ(t.lemma, "cuestión");
  EXPECT_EQ(t.tag.category(), Category::Noun);
  EXPECT_EQ(t.tag.slot(Task::Gender), 2u);
  EXPECT_EQ(t.tag.slot(Task::Number), 3u);
  EXPECT_EQ(t.tag.slot_value(Task::Gender), 'F');
  EXPECT_EQ(t.tag.slot_value(Task::Number), 'S');
}

TEST(PosTag, PrepositionHasNoSlots) {
  auto t = parse_tagged_token("de[SPS00]");
  EXPECT_EQ(t.tag.category(), Category::Preposition);
  EXPECT_FALSE(t.tag.slot(Task::Gender));
  EXPECT_FALSE(t.tag.slot(Task::Number));
}

TEST(PosTag, Rejections) {
  EXPECT_THROW(parse_tagged_token("x[Q]"), ParseError);
  EXPECT_THROW(parse_tagged_token("casa[NCFS000"), ParseError);
  EXPECT_THROW(parse_tagged_token("casaNCFS000]"), ParseError);
  EXPECT_THROW(parse_tagged_token("[NCFS000]"), ParseError);
  EXPECT_THROW(PosTag::parse("N"), ParseError);          // too short
  EXPECT_THROW(PosTag::parse("NCFS0000"), ParseError);   // too long
  EXPECT_THROW(PosTag::parse("NC"), ParseError);         // slot beyond the tag
  EXPECT_THROW(PosTag::parse("NCXS000"), ParseError);    // bad gender letter
}

TEST(PosTag, RoundTrip) {
  for (const char* s : {"decidir[VMIP3S0]", "el[DA0MS0]", "``[Fp]", "se[PP3CN00]", "rápido[AQ0FP0]"}) {
    EXPECT_EQ(format_tagged_token(parse_tagged_token(s)), s);
  }
}

TEST(Simplify, TableExamples) {
  EXPECT_EQ(simplify(PosTag::parse("NCFS000"), Scheme::NumberOnly).str(), "NCFN000");
  EXPECT_EQ(simplify(PosTag::parse("DA0MS0"), Scheme::GenderOnly).str(), "DA0GS0");
  EXPECT_EQ(simplify(PosTag::parse("NCFS000"), Scheme::NumberAndGender).str(), "NCGN000");
  for (auto s : {Scheme::NumberOnly, Scheme::GenderOnly, Scheme::NumberAndGender}) {
    EXPECT_EQ(simplify(PosTag::parse("SPS00"), s).str(), "SPS00");
  }
}

TEST(Simplify, UnspecifiedSlotsStay) {
  EXPECT_EQ(simplify(PosTag::parse("VMN0000"), Scheme::NumberAndGender).str(), "VMN0000");
  EXPECT_EQ(simplify(PosTag::parse("VMIP3S0"), Scheme::NumberAndGender).str(), "VMIP3N0");
  EXPECT_EQ(simplify(PosTag::parse("AQ0CP0"), Scheme::NumberAndGender).str(), "AQ0GN0");
}

TEST(Simplify, Properties) {
  // Every tag shape the lexicon ships.
  std::ifstream in(testing::data_path("lexicon.tsv"));
  std::string line;
  std::size_t checked = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tag = PosTag::parse(line.substr(line.rfind('\t') + 1));
    for (auto s : {Scheme::NumberOnly, Scheme::GenderOnly, Scheme::NumberAndGender}) {
      const auto once = simplify(tag, s);
      EXPECT_EQ(simplify(once, s), once);
      ASSERT_EQ(once.str().size(), tag.str().size());
      for (std::size_t i = 0; i < tag.str().size(); ++i) {
        if (i == tag.slot(Task::Gender) || i == tag.slot(Task::Number)) continue;
        EXPECT_EQ(once.str()[i], tag.str()[i]);
      }
    }
    EXPECT_EQ(simplify(simplify(tag, Scheme::NumberOnly), Scheme::GenderOnly),
              simplify(tag, Scheme::NumberAndGender));
    ++checked;
  }
  EXPECT_GT(checked, 1000u);
}

TEST(NeedsClassification, Examples) {
  EXPECT_TRUE(needs_classification(PosTag::parse("DA0GN0"), Task::Gender));
  EXPECT_FALSE(needs_classification(PosTag::parse("SPS00"), Task::Number));
  EXPECT_TRUE(needs_classification(PosTag::parse("VMN0000"), Task::Number));
  EXPECT_FALSE(needs_classification(PosTag::parse("Fp"), Task::Gender));
}

TEST(SlotTable, ParseAndErrors) {
  std::istringstream good("# c\nN\t2\t3\nS\t-\t-\n");
  auto t = SlotTable::parse(good);
  ASSERT_NE(t.find("NCFS000"), nullptr);
  EXPECT_EQ(t.find("NCFS000")->gender, 2u);
  EXPECT_EQ(t.find("Q"), nullptr);
  std::istringstream bad("N\t2\n");
  EXPECT_THROW(SlotTable::parse(bad), ParseError);
  std::istringstream dup("N\t2\t3\nN\t2\t3\n");
  EXPECT_THROW(SlotTable::parse(dup), ParseError);
}

TEST(SlotTable, BuiltinMatchesShippedFile) {
  const auto file = SlotTable::load(testing::data_path("slots.tsv"));
  ASSERT_EQ(file.schemes().size(), SlotTable::builtin().schemes().size());
  for (std::size_t i = 0; i < file.schemes().size(); ++i) {
    EXPECT_EQ(file.schemes()[i].prefix, SlotTable::builtin().schemes()[i].prefix);
    EXPECT_EQ(file.schemes()[i].gender, SlotTable::builtin().schemes()[i].gender);
    EXPECT_EQ(file.schemes()[i].number, SlotTable::builtin().schemes()[i].number);
  }
}

}  // namespace
}  // namespace morphgen
