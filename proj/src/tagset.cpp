#include "morphgen/tagset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "morphgen/error.hpp"
#include "morphgen/text.hpp"

namespace morphgen {

namespace {

// Keep in sync with data/slots.tsv.
constexpr std::string_view kBuiltinSlots =
    "N\t2\t3\n"
    "A\t3\t4\n"
    "D\t3\t4\n"
    "P\t3\t4\n"
    "V\t6\t5\n"
    "S\t-\t-\n"
    "C\t-\t-\n"
    "F\t-\t-\n"
    "R\t-\t-\n"
    "I\t-\t-\n"
    "Z\t-\t-\n"
    "W\t-\t-\n";

constexpr std::string_view kGenderAlphabet = "MFCN0";
constexpr std::string_view kNumberAlphabet = "SPN0";

std::optional<Category> category_from_letter(char c) {
  switch (c) {
    case 'N': return Category::Noun;
    case 'A': return Category::Adjective;
    case 'V': return Category::Verb;
    case 'D': return Category::Determiner;
    case 'P': return Category::Pronoun;
    case 'S': return Category::Preposition;
    case 'C': return Category::Conjunction;
    case 'F': return Category::Punctuation;
    case 'R': return Category::Adverb;
    case 'I':
    case 'Z':
    case 'W': return Category::Other;
    default: return std::nullopt;
  }
}

bool inflecting(Category c) {
  return c == Category::Determiner || c == Category::Adjective || c == Category::Verb ||
         c == Category::Pronoun || c == Category::Noun;
}

std::optional<std::size_t> parse_index(std::string_view field, std::string_view source, int line) {
  if (field == "-") return std::nullopt;
  std::size_t value = 0;
  for (char c : field) {
    if (c < '0' || c > '9') {
      throw ParseError(std::string(source) + ":" + std::to_string(line) + ": bad slot index \"" +
                       std::string(field) + "\"");
    }
    value = value * 10 + static_cast<std::size_t>(c - '0');
  }
  if (field.empty()) {
    throw ParseError(std::string(source) + ":" + std::to_string(line) + ": empty slot index");
  }
  return value;
}

}  // namespace

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Noun: return "noun";
    case Category::Adjective: return "adjective";
    case Category::Verb: return "verb";
    case Category::Determiner: return "determiner";
    case Category::Pronoun: return "pronoun";
    case Category::Preposition: return "preposition";
    case Category::Conjunction: return "conjunction";
    case Category::Punctuation: return "punctuation";
    case Category::Adverb: return "adverb";
    case Category::Other: return "other";
  }
  return "other";
}

std::string_view to_string(Task t) { return t == Task::Gender ? "gender" : "number"; }

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::NumberOnly: return "num";
    case Scheme::GenderOnly: return "gen";
    case Scheme::NumberAndGender: return "numgen";
  }
  return "numgen";
}

Task parse_task(std::string_view name) {
  if (name == "gender") return Task::Gender;
  if (name == "number") return Task::Number;
  throw UsageError("unknown task \"" + std::string(name) + "\" (expected gender or number)");
}

Scheme parse_scheme(std::string_view name) {
  if (name == "num" || name == "number") return Scheme::NumberOnly;
  if (name == "gen" || name == "gender") return Scheme::GenderOnly;
  if (name == "numgen" || name == "both") return Scheme::NumberAndGender;
  throw UsageError("unknown simplification scheme \"" + std::string(name) + "\"");
}

std::string_view gender_alphabet() { return kGenderAlphabet; }
std::string_view number_alphabet() { return kNumberAlphabet; }

std::size_t SlotScheme::min_length() const {
  std::size_t n = 1;
  if (gender) n = std::max(n, *gender + 1);
  if (number) n = std::max(n, *number + 1);
  return n;
}

SlotTable::SlotTable(std::vector<SlotScheme> schemes) : schemes_(std::move(schemes)) {
  // Longest prefix first so find() can stop at the first hit.
  std::stable_sort(schemes_.begin(), schemes_.end(), [](const SlotScheme& a, const SlotScheme& b) {
    return a.prefix.size() > b.prefix.size();
  });
}

const SlotTable& SlotTable::builtin() {
  static const SlotTable table = [] {
    std::istringstream in{std::string(kBuiltinSlots)};
    return parse(in, "<builtin slots>");
  }();
  return table;
}

SlotTable SlotTable::parse(std::istream& in, std::string_view source) {
  std::vector<SlotScheme> schemes;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = text::trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    auto fields = text::split_whitespace(body);
    if (fields.size() != 3) {
      throw ParseError(std::string(source) + ":" + std::to_string(lineno) +
                       ": expected PREFIX<TAB>gender<TAB>number");
    }
    if (!category_from_letter(fields[0][0])) {
      throw ParseError(std::string(source) + ":" + std::to_string(lineno) + ": unknown category prefix \"" +
                       fields[0] + "\"");
    }
    SlotScheme s{fields[0], parse_index(fields[1], source, lineno), parse_index(fields[2], source, lineno)};
    for (const auto& existing : schemes) {
      if (existing.prefix == s.prefix) {
        throw ParseError(std::string(source) + ":" + std::to_string(lineno) + ": duplicate prefix \"" +
                         s.prefix + "\"");
      }
    }
    schemes.push_back(std::move(s));
  }
  return SlotTable(std::move(schemes));
}

SlotTable SlotTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open slot table " + path.string());
  return parse(in, path.string());
}

const SlotScheme* SlotTable::find(std::string_view raw_tag) const {
  for (const auto& s : schemes_) {
    if (raw_tag.substr(0, s.prefix.size()) == s.prefix) return &s;
  }
  return nullptr;
}

PosTag PosTag::parse(std::string_view raw, const SlotTable& table) {
  if (raw.size() < 2 || raw.size() > 7) {
    throw ParseError("tag \"" + std::string(raw) + "\" must have 2 to 7 characters");
  }
  for (char c : raw) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    if (!ok) throw ParseError("tag \"" + std::string(raw) + "\" contains an invalid character");
  }
  auto category = category_from_letter(raw[0]);
  if (!category) {
    throw ParseError("tag \"" + std::string(raw) + "\" has unknown category letter '" + raw[0] + "'");
  }
  const SlotScheme* scheme = table.find(raw);
  if (!scheme) {
    throw ParseError("tag \"" + std::string(raw) + "\" has no slot scheme");
  }
  if (raw.size() < scheme->min_length()) {
    throw ParseError("tag \"" + std::string(raw) + "\" is too short for its slot scheme");
  }
  PosTag tag;
  tag.raw_ = std::string(raw);
  tag.category_ = *category;
  tag.gender_slot_ = scheme->gender;
  tag.number_slot_ = scheme->number;
  if (tag.gender_slot_ && std::string_view("MFCNG0").find(raw[*tag.gender_slot_]) == std::string_view::npos) {
    throw ParseError("tag \"" + std::string(raw) + "\" has invalid gender value '" + raw[*tag.gender_slot_] + "'");
  }
  if (tag.number_slot_ && std::string_view("SPN0").find(raw[*tag.number_slot_]) == std::string_view::npos) {
    throw ParseError("tag \"" + std::string(raw) + "\" has invalid number value '" + raw[*tag.number_slot_] + "'");
  }
  return tag;
}

std::optional<char> PosTag::slot_value(Task task) const {
  auto idx = slot(task);
  if (!idx) return std::nullopt;
  return raw_[*idx];
}

PosTag PosTag::with_slot(Task task, char value) const {
  auto idx = slot(task);
  if (!idx) {
    throw DataError("tag " + raw_ + " has no " + std::string(to_string(task)) + " slot");
  }
  PosTag copy = *this;
  copy.raw_[*idx] = value;
  return copy;
}

TaggedToken parse_tagged_token(std::string_view text, const SlotTable& table) {
  const auto open = text.rfind('[');
  if (open == std::string_view::npos || text.back() != ']') {
    throw ParseError("malformed token \"" + std::string(text) + "\" (expected lemma[TAG])");
  }
  if (open == 0) throw ParseError("malformed token \"" + std::string(text) + "\" (empty lemma)");
  const auto lemma = text.substr(0, open);
  const auto raw = text.substr(open + 1, text.size() - open - 2);
  if (raw.empty()) throw ParseError("malformed token \"" + std::string(text) + "\" (empty tag)");
  if (lemma.find(']') != std::string_view::npos) {
    throw ParseError("malformed token \"" + std::string(text) + "\" (stray bracket)");
  }
  if (text::has_uppercase(lemma)) {
    throw ParseError("malformed token \"" + std::string(text) + "\" (lemma must be lowercase)");
  }
  PosTag tag;
  try {
    tag = PosTag::parse(raw, table);
  } catch (const ParseError& e) {
    throw ParseError("token \"" + std::string(text) + "\": " + e.what());
  }
  return TaggedToken{std::string(lemma), std::string(lemma), std::move(tag)};
}

std::string format_tagged_token(const TaggedToken& token) { return token.lemma + "[" + token.tag.str() + "]"; }

PosTag simplify(const PosTag& tag, Scheme scheme) {
  PosTag out = tag;
  const bool gender = scheme != Scheme::NumberOnly;
  const bool number = scheme != Scheme::GenderOnly;
  if (gender) {
    if (auto v = tag.slot_value(Task::Gender); v && *v != kUnspecified) {
      out = out.with_slot(Task::Gender, kGenderPlaceholder);
    }
  }
  if (number) {
    if (auto v = tag.slot_value(Task::Number); v && *v != kUnspecified) {
      out = out.with_slot(Task::Number, kNumberPlaceholder);
    }
  }
  return out;
}

bool needs_classification(const PosTag& tag, Task task) {
  return inflecting(tag.category()) && tag.slot(task).has_value();
}

}  // namespace morphgen
