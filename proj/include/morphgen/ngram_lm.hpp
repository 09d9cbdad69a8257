#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace morphgen {

// Interpolated Kneser-Ney n-gram model, stored ARPA style: every seen k-gram
// keeps its interpolated log10 probability and, when it occurs as a context,
// its log10 back-off weight.
class NGramModel {
 public:
  static constexpr std::string_view kBos = "<s>";
  static constexpr std::string_view kEos = "</s>";
  static constexpr std::string_view kUnk = "<unk>";

  using Sentences = std::vector<std::vector<std::string>>;

  // Throws UsageError when order < 1, DataError on an empty corpus.
  static NGramModel train(const Sentences& corpus, int order);

  int order() const { return order_; }
  // Word list, ids in order. Includes <s>, </s> and <unk>.
  const std::vector<std::string>& vocabulary() const { return words_; }
  std::uint32_t id(std::string_view word) const;  // <unk> when unseen

  // log10 p(word | context); only the last order-1 context ids are used.
  double log10_prob(std::span<const std::uint32_t> context, std::uint32_t word) const;
  // Natural-log conditional probability over strings.
  double log_prob(const std::vector<std::string>& context, std::string_view word) const;

  // Natural-log probability of `<s> tokens </s>`, scoring each token after
  // the sentence start plus the end marker. OOV tokens score as <unk>.
  double score_sequence(std::span<const std::string> tokens) const;

  // Discount used at each order (index 0 = unigrams).
  const std::vector<double>& discounts() const { return discounts_; }
  std::size_t ngram_count(int k) const { return tables_.at(static_cast<std::size_t>(k - 1)).size(); }

  void save_arpa(std::ostream& out) const;
  void save_arpa(const std::filesystem::path& path) const;
  static NGramModel load_arpa(std::istream& in, std::string_view source = "<stream>");
  static NGramModel load_arpa(const std::filesystem::path& path);

 private:
  struct Entry {
    double log10_prob = 0;
    double log10_bow = 0;
  };
  using Key = std::u32string;

  void add_word(const std::string& w);

  int order_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::unordered_map<Key, Entry>> tables_;
  std::vector<double> discounts_;
};

}  // namespace morphgen
