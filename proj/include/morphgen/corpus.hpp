#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "morphgen/tagset.hpp"

namespace morphgen {

using Sentence = std::vector<TaggedToken>;
using Corpus = std::vector<Sentence>;

// One sentence per line, tokens separated by spaces, each `lemma[TAG]`.
// Blank lines are empty sentences.
Corpus read_corpus(std::istream& in, const SlotTable& table = SlotTable::builtin(),
                   std::string_view source = "<stream>");
Corpus load_corpus(const std::filesystem::path& path, const SlotTable& table = SlotTable::builtin());
void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

Sentence simplify_sentence(const Sentence& sentence, Scheme scheme);
Corpus simplify_corpus(const Corpus& corpus, Scheme scheme);

// The atomic unit the classifier sees: the simplified `lemma[TAG]` string.
std::string window_token(const TaggedToken& token);

class Vocabulary {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  // Keeps the `size_limit` most frequent window tokens of `simplified`,
  // frequency ties broken lexicographically.
  static Vocabulary build(const Corpus& simplified, std::size_t size_limit);

  std::int32_t index(std::string_view token) const;
  const std::string& token(std::int32_t index) const { return tokens_.at(static_cast<std::size_t>(index)); }
  std::size_t size() const { return tokens_.size(); }
  std::size_t size_limit() const { return size_limit_; }
  // FNV-1a over the ordered token list; models record it to detect mismatches.
  std::uint64_t hash() const { return hash_; }

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(std::istream& in, std::string_view source = "<stream>");
  static Vocabulary load(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.size_limit_ == b.size_limit_;
  }

 private:
  Vocabulary(std::vector<std::string> tokens, std::size_t size_limit);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> index_;
  std::size_t size_limit_ = 0;
  std::uint64_t hash_ = 0;
};

// Fixed-length, center-anchored sequence of vocabulary indices.
struct Window {
  std::vector<std::int32_t> indices;

  std::size_t length() const { return indices.size(); }
  std::size_t center() const { return (indices.size() - 1) / 2; }
  friend bool operator==(const Window&, const Window&) = default;
};

Window extract_window(const Sentence& simplified, std::size_t position, std::size_t length,
                      const Vocabulary& vocab);

inline constexpr int kNumClasses = 3;

// Gender classes: M=0, F=1, N=2. Number classes: S=0, P=1, N=2.
struct ClassLabel {
  Task task = Task::Number;
  int index = 2;

  char letter() const;
  static ClassLabel from_letter(Task task, char letter);
  friend bool operator==(const ClassLabel&, const ClassLabel&) = default;
};

char class_letter(Task task, int index);

// Reads the gold class from an unsimplified tag: M/F and S/P map to
// themselves, every other slot value (C, N, 0) to the None class.
ClassLabel extract_label(const TaggedToken& full, Task task);

struct LabeledExample {
  Window window;
  ClassLabel label;
  std::size_t sentence_id = 0;
  std::size_t token_id = 0;
  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

// One example per token passing needs_classification, in corpus order.
// Windows come from `simplified`, labels from `full`.
std::vector<LabeledExample> make_dataset(const Corpus& full, const Corpus& simplified, Task task,
                                         std::size_t window_length, const Vocabulary& vocab);

// Cache format: a `#morphgen-dataset v1 ...` header line, then one record per
// line: `sentence_id TAB token_id TAB label TAB idx1,idx2,...`.
struct DatasetFile {
  Task task = Task::Number;
  std::size_t window_length = 0;
  std::uint64_t vocab_hash = 0;
  std::vector<LabeledExample> examples;
};

void write_dataset(std::ostream& out, const DatasetFile& data);
DatasetFile read_dataset(std::istream& in, std::string_view source = "<stream>");

}  // namespace morphgen
