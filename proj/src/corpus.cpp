#include "morphgen/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "morphgen/error.hpp"
#include "morphgen/text.hpp"

namespace morphgen {

namespace {

constexpr std::string_view kDatasetMagic = "#morphgen-dataset";
constexpr std::string_view kVocabMagic = "#morphgen-vocab";

std::uint64_t fnv1a(const std::vector<std::string>& tokens) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& t : tokens) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xFF;
    h *= 1099511628211ull;
  }
  return h;
}

template <typename T>
T parse_unsigned(std::string_view s, std::string_view what) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("bad " + std::string(what) + " \"" + std::string(s) + "\"");
  }
  return value;
}

std::string header_field(const std::vector<std::string>& fields, std::string_view key) {
  for (const auto& f : fields) {
    if (f.size() > key.size() && f.compare(0, key.size(), key) == 0 && f[key.size()] == '=') {
      return f.substr(key.size() + 1);
    }
  }
  throw ParseError("header is missing \"" + std::string(key) + "\"");
}

}  // namespace

Corpus read_corpus(std::istream& in, const SlotTable& table, std::string_view source) {
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    Sentence sentence;
    for (const auto& item : text::split_whitespace(line)) {
      try {
        sentence.push_back(parse_tagged_token(item, table));
      } catch (const ParseError& e) {
        throw ParseError(std::string(source) + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    corpus.push_back(std::move(sentence));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const SlotTable& table) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus " + path.string());
  return read_corpus(in, table, path.string());
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& sentence : corpus) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      if (i) out << ' ';
      out << format_tagged_token(sentence[i]);
    }
    out << '\n';
  }
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_corpus(out, corpus);
}

Sentence simplify_sentence(const Sentence& sentence, Scheme scheme) {
  Sentence out = sentence;
  for (auto& token : out) token.tag = simplify(token.tag, scheme);
  return out;
}

Corpus simplify_corpus(const Corpus& corpus, Scheme scheme) {
  Corpus out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(simplify_sentence(s, scheme));
  return out;
}

std::string window_token(const TaggedToken& token) { return format_tagged_token(token); }

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::size_t size_limit)
    : tokens_(std::move(tokens)), size_limit_(size_limit) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<std::int32_t>(i)).second) {
      throw DataError("duplicate vocabulary entry \"" + tokens_[i] + "\"");
    }
  }
  hash_ = fnv1a(tokens_);
}

Vocabulary Vocabulary::build(const Corpus& simplified, std::size_t size_limit) {
  if (size_limit < 1) throw UsageError("vocabulary size limit must be at least 1");
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& sentence : simplified) {
    for (const auto& token : sentence) {
      ++counts[window_token(token)];
      ++total;
    }
  }
  if (total == 0) throw DataError("cannot build a vocabulary from an empty corpus");
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens{std::string(kPadToken), std::string(kUnkToken)};
  for (std::size_t i = 0; i < ranked.size() && i < size_limit; ++i) tokens.push_back(ranked[i].first);
  return Vocabulary(std::move(tokens), size_limit);
}

std::int32_t Vocabulary::index(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

void Vocabulary::save(std::ostream& out) const {
  out << kVocabMagic << " v1 size_limit=" << size_limit_ << " size=" << tokens_.size() << '\n';
  for (const auto& t : tokens_) out << t << '\n';
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  save(out);
}

Vocabulary Vocabulary::load(std::istream& in, std::string_view source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(std::string(source) + ": empty vocabulary file");
  auto fields = text::split_whitespace(line);
  if (fields.size() < 2 || fields[0] != kVocabMagic || fields[1] != "v1") {
    throw ParseError(std::string(source) + ": not a morphgen vocabulary (v1)");
  }
  const auto limit = parse_unsigned<std::size_t>(header_field(fields, "size_limit"), "size_limit");
  const auto size = parse_unsigned<std::size_t>(header_field(fields, "size"), "size");
  std::vector<std::string> tokens;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  if (tokens.size() != size || size < 2 || tokens[0] != kPadToken || tokens[1] != kUnkToken) {
    throw ParseError(std::string(source) + ": vocabulary body does not match its header");
  }
  return Vocabulary(std::move(tokens), limit);
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary " + path.string());
  return load(in, path.string());
}

Window extract_window(const Sentence& simplified, std::size_t position, std::size_t length,
                      const Vocabulary& vocab) {
  if (length == 0 || length % 2 == 0) {
    throw UsageError("window length must be odd, got " + std::to_string(length));
  }
  if (position >= simplified.size()) {
    throw UsageError("window position " + std::to_string(position) + " outside sentence of length " +
                     std::to_string(simplified.size()));
  }
  const auto half = static_cast<std::ptrdiff_t>((length - 1) / 2);
  Window w;
  w.indices.resize(length, Vocabulary::kPad);
  for (std::size_t k = 0; k < length; ++k) {
    const auto src = static_cast<std::ptrdiff_t>(position) - half + static_cast<std::ptrdiff_t>(k);
    if (src >= 0 && src < static_cast<std::ptrdiff_t>(simplified.size())) {
      w.indices[k] = vocab.index(window_token(simplified[static_cast<std::size_t>(src)]));
    }
  }
  return w;
}

char class_letter(Task task, int index) {
  static constexpr char kGender[] = {'M', 'F', 'N'};
  static constexpr char kNumber[] = {'S', 'P', 'N'};
  if (index < 0 || index >= kNumClasses) throw DataError("class index out of range");
  return task == Task::Gender ? kGender[index] : kNumber[index];
}

char ClassLabel::letter() const { return class_letter(task, index); }

ClassLabel ClassLabel::from_letter(Task task, char letter) {
  for (int i = 0; i < kNumClasses; ++i) {
    if (class_letter(task, i) == letter) return ClassLabel{task, i};
  }
  throw ParseError(std::string("invalid ") + std::string(to_string(task)) + " class '" + letter + "'");
}

ClassLabel extract_label(const TaggedToken& full, Task task) {
  if (!needs_classification(full.tag, task)) {
    throw DataError("token " + format_tagged_token(full) + " is not classified for " +
                    std::string(to_string(task)));
  }
  const char v = *full.tag.slot_value(task);
  if (task == Task::Gender) {
    if (v == kGenderPlaceholder) {
      throw DataError("token " + format_tagged_token(full) + " is simplified; its gender is unknown");
    }
    if (v == 'M') return {task, 0};
    if (v == 'F') return {task, 1};
    return {task, 2};
  }
  if (v == 'S') return {task, 0};
  if (v == 'P') return {task, 1};
  return {task, 2};
}

std::vector<LabeledExample> make_dataset(const Corpus& full, const Corpus& simplified, Task task,
                                         std::size_t window_length, const Vocabulary& vocab) {
  if (full.size() != simplified.size()) {
    throw DataError("full and simplified corpora differ in sentence count (" + std::to_string(full.size()) +
                    " vs " + std::to_string(simplified.size()) + ")");
  }
  std::vector<LabeledExample> out;
  for (std::size_t s = 0; s < full.size(); ++s) {
    if (full[s].size() != simplified[s].size()) {
      throw DataError("sentence " + std::to_string(s) + ": full and simplified token counts differ");
    }
    for (std::size_t t = 0; t < full[s].size(); ++t) {
      if (!needs_classification(full[s][t].tag, task)) continue;
      out.push_back(LabeledExample{extract_window(simplified[s], t, window_length, vocab),
                                   extract_label(full[s][t], task), s, t});
    }
  }
  return out;
}

void write_dataset(std::ostream& out, const DatasetFile& data) {
  out << kDatasetMagic << " v1 task=" << to_string(data.task) << " window=" << data.window_length
      << " vocab_hash=" << data.vocab_hash << " examples=" << data.examples.size() << '\n';
  for (const auto& ex : data.examples) {
    out << ex.sentence_id << '\t' << ex.token_id << '\t' << ex.label.letter() << '\t';
    for (std::size_t i = 0; i < ex.window.indices.size(); ++i) {
      if (i) out << ',';
      out << ex.window.indices[i];
    }
    out << '\n';
  }
}

DatasetFile read_dataset(std::istream& in, std::string_view source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(std::string(source) + ": empty dataset file");
  auto fields = text::split_whitespace(line);
  if (fields.size() < 2 || fields[0] != kDatasetMagic || fields[1] != "v1") {
    throw ParseError(std::string(source) + ": not a morphgen dataset (v1)");
  }
  DatasetFile data;
  data.task = parse_task(header_field(fields, "task"));
  data.window_length = parse_unsigned<std::size_t>(header_field(fields, "window"), "window");
  data.vocab_hash = parse_unsigned<std::uint64_t>(header_field(fields, "vocab_hash"), "vocab_hash");
  const auto count = parse_unsigned<std::size_t>(header_field(fields, "examples"), "examples");
  data.examples.reserve(count);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string sid, tid, label, idx;
    if (!std::getline(row, sid, '\t') || !std::getline(row, tid, '\t') || !std::getline(row, label, '\t') ||
        !std::getline(row, idx) || label.size() != 1) {
      throw ParseError(std::string(source) + ":" + std::to_string(lineno) + ": malformed dataset record");
    }
    LabeledExample ex;
    ex.sentence_id = parse_unsigned<std::size_t>(sid, "sentence id");
    ex.token_id = parse_unsigned<std::size_t>(tid, "token id");
    ex.label = ClassLabel::from_letter(data.task, label[0]);
    std::size_t start = 0;
    while (start <= idx.size()) {
      auto comma = idx.find(',', start);
      if (comma == std::string::npos) comma = idx.size();
      ex.window.indices.push_back(parse_unsigned<std::int32_t>(std::string_view(idx).substr(start, comma - start),
                                                               "window index"));
      start = comma + 1;
    }
    if (ex.window.length() != data.window_length) {
      throw ParseError(std::string(source) + ":" + std::to_string(lineno) + ": window length mismatch");
    }
    data.examples.push_back(std::move(ex));
  }
  if (data.examples.size() != count) {
    throw ParseError(std::string(source) + ": expected " + std::to_string(count) + " examples, found " +
                     std::to_string(data.examples.size()));
  }
  return data;
}

}  // namespace morphgen
