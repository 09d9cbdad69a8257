#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "morphgen/corpus.hpp"

namespace morphgen {

// A small probabilistic grammar whose symbols may carry agreement variables,
// e.g. `NP{a} -> DET{a} N{a} ADJ{a} : 2`. A variable named on the left-hand
// side is inherited; variables appearing only on the right are fresh and get
// their gender and number drawn from the priors. `@S` / `@P` after the
// left-hand side restricts a rule to singular / plural bindings. Terminal
// symbols are lexical classes from the `[lexicon]` section.
class Grammar {
 public:
  struct Symbol {
    std::string name;
    std::string var;  // empty when the symbol does not agree
  };
  struct Rule {
    Symbol lhs;
    char number_condition = 0;  // 0, 'S' or 'P'
    std::vector<Symbol> rhs;
    double weight = 1.0;
  };
  struct Form {
    PosTag tag;
    std::string surface;
  };
  struct Entry {
    std::string lemma;
    std::vector<Form> forms;
  };
  struct LexiconLine {
    std::string surface;
    std::string lemma;
    std::string tag;
  };

  static Grammar parse(std::istream& in, std::string_view source = "<stream>",
                       const SlotTable& table = SlotTable::builtin());
  static Grammar load(const std::filesystem::path& path, const SlotTable& table = SlotTable::builtin());

  const std::string& start_symbol() const { return start_; }
  const std::vector<Rule>& rules() const { return rules_; }
  const std::map<std::string, std::vector<Entry>>& lexicon() const { return lexicon_; }
  const std::map<char, double>& gender_prior() const { return gender_prior_; }
  const std::map<char, double>& number_prior() const { return number_prior_; }

  // Every (surface, lemma, tag) triple of the lexicon section, deduplicated,
  // in a stable order.
  std::vector<LexiconLine> lexicon_lines() const;

 private:
  void validate(std::string_view source) const;

  std::string start_ = "S";
  std::vector<Rule> rules_;
  std::map<std::string, std::vector<Entry>> lexicon_;
  std::map<char, double> gender_prior_{{'M', 0.5}, {'F', 0.5}};
  std::map<char, double> number_prior_{{'S', 0.5}, {'P', 0.5}};
};

struct SyntheticCorpus {
  Corpus full;
  // Agreement group of every token (-1 when the token agrees with nothing).
  std::vector<std::vector<int>> groups;
};

// Deterministic per seed.
SyntheticCorpus generate_synthetic_corpus(std::uint64_t seed, std::size_t sentences, const Grammar& grammar);

struct AgreementViolation {
  std::size_t sentence_id;
  std::size_t token_id;
  std::string message;
};

// Every token of an agreement group must share the specified gender (M/F)
// and number (S/P) values; invariant values (C, N, 0) agree with anything.
std::vector<AgreementViolation> check_agreement(const SyntheticCorpus& corpus);

}  // namespace morphgen
