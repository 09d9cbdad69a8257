#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "morphgen/corpus.hpp"
#include "morphgen/rescoring.hpp"

namespace morphgen {

enum class Provenance { Exact, InflectionFallback, LemmaFallback };
std::string_view to_string(Provenance p);

// Counts of slot values per tag category letter, used to order inflection
// fallbacks. File format: `category TAB slot TAB value TAB count`.
class InflectionPriors {
 public:
  static InflectionPriors from_corpus(const Corpus& full);
  static InflectionPriors parse(std::istream& in, std::string_view source = "<stream>");
  static InflectionPriors load(const std::filesystem::path& path);
  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

  void add(char category, Task task, char value, double count);
  double count(char category, Task task, char value) const;

  // The slot alphabet ordered by descending count, ties in alphabet order.
  std::string ordered_values(char category, Task task) const;

  bool empty() const { return counts_.empty(); }

 private:
  std::map<std::pair<char, Task>, std::map<char, double>> counts_;
};

struct GeneratedForm {
  std::string surface;
  Provenance provenance = Provenance::Exact;
};

class Lexicon {
 public:
  // TSV `surface TAB lemma TAB tag`, `#` comments. Conflicting duplicates
  // throw DataError naming both line numbers.
  static Lexicon parse(std::istream& in, std::string_view source = "<stream>",
                       const SlotTable& table = SlotTable::builtin());
  static Lexicon load(const std::filesystem::path& path, const SlotTable& table = SlotTable::builtin());

  std::size_t size() const { return entries_.size(); }
  const std::string* find(std::string_view lemma, const PosTag& tag) const;
  std::vector<PosTag> tags_of(std::string_view lemma) const;

  void set_priors(InflectionPriors priors) { priors_ = std::move(priors); }
  const InflectionPriors& priors() const { return priors_; }

  // Exact lookup, then other number values, other gender values, then both,
  // each in prior order; finally the lemma itself.
  GeneratedForm generate_form(std::string_view lemma, const PosTag& tag) const;

 private:
  struct Entry {
    std::string surface;
    std::size_t line = 0;
  };
  std::unordered_map<std::string, Entry> entries_;  // key: lemma '\t' tag
  std::unordered_map<std::string, std::vector<PosTag>> by_lemma_;
  InflectionPriors priors_;
};

// Per-token class choice; -1 leaves the slot as it is.
struct ClassAssignment {
  int gender = -1;
  int number = -1;
  friend bool operator==(const ClassAssignment&, const ClassAssignment&) = default;
};

std::vector<ClassAssignment> assignments_of(const SentenceGraph& graph, const Path& path);

// Writes a class into the tag slot. M/F/S/P are written as letters; the None
// class writes C (gender) or N (number) over a placeholder and keeps an
// unspecified `0`. Throws DataError when the slot is missing.
PosTag apply_class(const PosTag& tag, Task task, int cls);

// The simplified sentence with every assigned class written into its tag.
Sentence apply_assignments(const Sentence& simplified, std::span<const ClassAssignment> assignments);

struct Realization {
  std::vector<std::string> tokens;  // lowercase; enclitics keep a `+` prefix
  std::vector<Provenance> provenance;
};

Realization realize_path(const Lexicon& lexicon, const Sentence& simplified,
                         std::span<const ClassAssignment> assignments);

// Uppercases the first letter and joins with spaces.
std::string present_sentence(const std::vector<std::string>& tokens);

}  // namespace morphgen
