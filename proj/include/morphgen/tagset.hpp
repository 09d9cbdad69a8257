#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace morphgen {

enum class Category {
  Noun,
  Adjective,
  Verb,
  Determiner,
  Pronoun,
  Preposition,
  Conjunction,
  Punctuation,
  Adverb,
  Other,
};

// The two morphological dimensions the pipeline restores.
enum class Task { Gender, Number };

enum class Scheme { NumberOnly, GenderOnly, NumberAndGender };

inline constexpr char kGenderPlaceholder = 'G';
inline constexpr char kNumberPlaceholder = 'N';
// Slot value meaning "attribute not specified for this form" (e.g. the gender
// slot of a finite verb). Never simplified.
inline constexpr char kUnspecified = '0';

std::string_view to_string(Category c);
std::string_view to_string(Task t);
std::string_view to_string(Scheme s);
Task parse_task(std::string_view name);
Scheme parse_scheme(std::string_view name);

// Positional slot layout for all tags starting with `prefix`.
struct SlotScheme {
  std::string prefix;
  std::optional<std::size_t> gender;
  std::optional<std::size_t> number;

  std::size_t min_length() const;
};

// Data-driven table of slot layouts, looked up by longest matching prefix.
// File format: `PREFIX<TAB>gender_index<TAB>number_index`, `-` for absent,
// `#` starts a comment.
class SlotTable {
 public:
  SlotTable() = default;
  explicit SlotTable(std::vector<SlotScheme> schemes);

  // The table shipped in data/slots.tsv, compiled in.
  static const SlotTable& builtin();
  static SlotTable parse(std::istream& in, std::string_view source = "<stream>");
  static SlotTable load(const std::filesystem::path& path);

  const SlotScheme* find(std::string_view raw_tag) const;
  const std::vector<SlotScheme>& schemes() const { return schemes_; }

 private:
  std::vector<SlotScheme> schemes_;
};

class PosTag {
 public:
  PosTag() = default;

  // Throws ParseError on unknown category letters, bad characters, lengths
  // outside 2..7, tags too short for their slot scheme, or slot characters
  // outside the allowed alphabet.
  static PosTag parse(std::string_view raw, const SlotTable& table = SlotTable::builtin());

  const std::string& str() const { return raw_; }
  Category category() const { return category_; }
  char category_letter() const { return raw_.empty() ? '\0' : raw_[0]; }

  std::optional<std::size_t> slot(Task task) const {
    return task == Task::Gender ? gender_slot_ : number_slot_;
  }
  std::optional<char> slot_value(Task task) const;

  // Copy with the given slot overwritten. Throws DataError when the slot is
  // absent.
  PosTag with_slot(Task task, char value) const;

  friend bool operator==(const PosTag& a, const PosTag& b) { return a.raw_ == b.raw_; }

 private:
  std::string raw_;
  Category category_ = Category::Other;
  std::optional<std::size_t> gender_slot_;
  std::optional<std::size_t> number_slot_;
};

struct TaggedToken {
  std::string surface;
  std::string lemma;
  PosTag tag;

  friend bool operator==(const TaggedToken&, const TaggedToken&) = default;
};

// Parses `lemma[TAG]`. The surface is set to the lemma text.
TaggedToken parse_tagged_token(std::string_view text, const SlotTable& table = SlotTable::builtin());
std::string format_tagged_token(const TaggedToken& token);

// Replaces specified gender values (M, F, C, N) by `G` and specified number
// values (S, P) by `N`. Unspecified (`0`) slots and slot-less tags are left as
// they are, so the operation is idempotent and length preserving.
PosTag simplify(const PosTag& tag, Scheme scheme);

// True iff the category can inflect (determiner, adjective, verb, pronoun,
// noun) and the tag has the slot for `task`.
bool needs_classification(const PosTag& tag, Task task);

// Allowed characters in each slot, in the canonical iteration order used by
// the inflection fallback.
std::string_view gender_alphabet();
std::string_view number_alphabet();

}  // namespace morphgen
