#include "morphgen/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "morphgen/error.hpp"
#include "morphgen/text.hpp"

namespace morphgen {

namespace {

constexpr double kLog10Zero = -99.0;

struct ContextStats {
  double total = 0;           // sum of counts over continuations
  std::size_t distinct = 0;   // continuations with non-zero count
};

}  // namespace

void NGramModel::add_word(const std::string& w) {
  if (ids_.emplace(w, static_cast<std::uint32_t>(words_.size())).second) words_.push_back(w);
}

std::uint32_t NGramModel::id(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? ids_.at(std::string(kUnk)) : it->second;
}

NGramModel NGramModel::train(const Sentences& corpus, int order) {
  if (order < 1) throw UsageError("n-gram order must be at least 1, got " + std::to_string(order));
  bool any = false;
  for (const auto& s : corpus) any = any || !s.empty();
  if (!any) throw DataError("cannot train a language model on an empty corpus");

  NGramModel m;
  m.order_ = order;
  m.add_word(std::string(kUnk));
  m.add_word(std::string(kBos));
  m.add_word(std::string(kEos));
  {
    std::set<std::string> seen;
    for (const auto& s : corpus) {
      for (const auto& w : s) {
        if (w == kBos || w == kEos || w == kUnk) throw DataError("reserved token " + w + " in LM training data");
        seen.insert(w);
      }
    }
    for (const auto& w : seen) m.add_word(w);
  }
  const char32_t bos = m.id(kBos);
  const auto n = static_cast<std::size_t>(order);

  // Raw counts of every k-gram ending at a predicted position.
  std::vector<std::unordered_map<Key, double>> raw(n);
  Key seq;
  for (const auto& s : corpus) {
    seq.clear();
    seq.push_back(bos);
    for (const auto& w : s) seq.push_back(m.id(w));
    seq.push_back(m.id(kEos));
    for (std::size_t i = 1; i < seq.size(); ++i) {
      for (std::size_t k = 1; k <= n && k <= i + 1; ++k) raw[k - 1][seq.substr(i + 1 - k, k)] += 1;
    }
  }

  // Kneser-Ney counts: raw at the top order and for k-grams starting at the
  // sentence boundary, distinct left extensions otherwise.
  std::vector<std::unordered_map<Key, double>> kn(n);
  kn[n - 1] = raw[n - 1];
  for (std::size_t k = n - 1; k >= 1; --k) {
    auto& a = kn[k - 1];
    for (const auto& [g, c] : raw[k - 1]) {
      if (g[0] == bos) a[g] = c;
    }
    for (const auto& [g, c] : raw[k]) {
      Key tail = g.substr(1);
      if (tail[0] != bos) a[tail] += 1;
    }
  }

  m.discounts_.assign(n, 0.5);
  std::vector<std::unordered_map<Key, ContextStats>> ctx(n);
  for (std::size_t k = 1; k <= n; ++k) {
    double n1 = 0, n2 = 0;
    for (const auto& [g, c] : kn[k - 1]) {
      if (c == 1) n1 += 1;
      if (c == 2) n2 += 1;
      auto& st = ctx[k - 1][g.substr(0, k - 1)];
      st.total += c;
      st.distinct += 1;
    }
    const double d = n1 / (n1 + 2 * n2);
    if (d > 0 && d < 1) m.discounts_[k - 1] = d;
  }

  // Probabilities bottom-up, kept linear while building higher orders.
  const double vocab_size = static_cast<double>(m.words_.size() - 1);  // <s> is never predicted
  std::vector<std::unordered_map<Key, double>> prob(n);
  m.tables_.assign(n, {});
  {
    const double d = m.discounts_[0];
    const auto& st = ctx[0][Key()];
    const double gamma = d * static_cast<double>(st.distinct) / st.total;
    for (std::uint32_t w = 0; w < m.words_.size(); ++w) {
      Key g(1, static_cast<char32_t>(w));
      if (static_cast<char32_t>(w) == bos) {
        m.tables_[0][g].log10_prob = kLog10Zero;
        continue;
      }
      auto it = kn[0].find(g);
      const double c = it == kn[0].end() ? 0.0 : it->second;
      const double p = std::max(c - d, 0.0) / st.total + gamma / vocab_size;
      prob[0][g] = p;
      m.tables_[0][g].log10_prob = std::log10(p);
    }
  }
  for (std::size_t k = 2; k <= n; ++k) {
    const double d = m.discounts_[k - 1];
    for (const auto& [g, c] : kn[k - 1]) {
      const Key h = g.substr(0, k - 1);
      const auto& st = ctx[k - 1].at(h);
      const double gamma = d * static_cast<double>(st.distinct) / st.total;
      const double p = (c - d) / st.total + gamma * prob[k - 2].at(g.substr(1));
      prob[k - 1][g] = p;
      m.tables_[k - 1][g].log10_prob = std::log10(p);
    }
    for (const auto& [h, st] : ctx[k - 1]) {
      m.tables_[k - 2].at(h).log10_bow = std::log10(d * static_cast<double>(st.distinct) / st.total);
    }
  }
  return m;
}

double NGramModel::log10_prob(std::span<const std::uint32_t> context, std::uint32_t word) const {
  const std::size_t max_ctx = static_cast<std::size_t>(order_ - 1);
  if (context.size() > max_ctx) context = context.subspan(context.size() - max_ctx);
  Key g;
  for (auto c : context) g.push_back(static_cast<char32_t>(c));
  g.push_back(static_cast<char32_t>(word));
  double bow = 0;
  // Drop the oldest context word until the k-gram is known.
  while (true) {
    const std::size_t k = g.size();
    auto it = tables_[k - 1].find(g);
    if (it != tables_[k - 1].end()) return bow + it->second.log10_prob;
    if (k == 1) return kLog10Zero;  // word outside the vocabulary ids
    auto h = tables_[k - 2].find(g.substr(0, k - 1));
    if (h != tables_[k - 2].end()) bow += h->second.log10_bow;
    g.erase(0, 1);
  }
}

double NGramModel::log_prob(const std::vector<std::string>& context, std::string_view word) const {
  std::vector<std::uint32_t> ids;
  for (const auto& c : context) ids.push_back(id(c));
  return log10_prob(ids, id(word)) * std::numbers::ln10;
}

double NGramModel::score_sequence(std::span<const std::string> tokens) const {
  std::vector<std::uint32_t> seq{id(kBos)};
  for (const auto& t : tokens) seq.push_back(id(t));
  seq.push_back(id(kEos));
  double total = 0;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    total += log10_prob(std::span<const std::uint32_t>(seq.data(), i), seq[i]);
  }
  return total * std::numbers::ln10;
}

// ---- ARPA ----

void NGramModel::save_arpa(std::ostream& out) const {
  out << "\n\\data\\\n";
  for (int k = 1; k <= order_; ++k) out << "ngram " << k << "=" << tables_[static_cast<std::size_t>(k - 1)].size() << "\n";
  for (int k = 1; k <= order_; ++k) {
    const auto& table = tables_[static_cast<std::size_t>(k - 1)];
    // Sorted by word strings so files are stable across runs.
    std::vector<std::pair<std::string, const Entry*>> rows;
    rows.reserve(table.size());
    for (const auto& [g, e] : table) {
      std::string words;
      for (char32_t c : g) {
        if (!words.empty()) words += ' ';
        words += words_[c];
      }
      rows.emplace_back(std::move(words), &e);
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    out << "\n\\" << k << "-grams:\n";
    for (const auto& [words, e] : rows) {
      out << text::format_double(e->log10_prob) << '\t' << words;
      if (k < order_ && e->log10_bow != 0) out << '\t' << text::format_double(e->log10_bow);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
  if (!out) throw DataError("failed to write ARPA model");
}

void NGramModel::save_arpa(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  save_arpa(out);
}

NGramModel NGramModel::load_arpa(std::istream& in, std::string_view source) {
  auto fail = [&](std::size_t line, const std::string& what) -> ParseError {
    return ParseError(std::string(source) + ":" + std::to_string(line) + ": " + what);
  };
  NGramModel m;
  std::vector<std::size_t> declared;
  std::string line;
  std::size_t lineno = 0;
  int section = -1;  // -1 before \data\, 0 in \data\, k in \k-grams:
  bool ended = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = text::trim(line);
    if (t.empty()) continue;
    if (t == "\\data\\") {
      section = 0;
      continue;
    }
    if (t == "\\end\\") {
      ended = true;
      break;
    }
    if (section == -1) continue;  // preamble
    if (t.front() == '\\') {
      int k = 0;
      if (std::sscanf(std::string(t).c_str(), "\\%d-grams:", &k) != 1 || k < 1 ||
          static_cast<std::size_t>(k) > declared.size()) {
        throw fail(lineno, "bad section header");
      }
      section = k;
      if (k == 1) m.tables_.assign(declared.size(), {});
      else if (m.tables_.empty()) throw fail(lineno, "higher-order section before unigrams");
      continue;
    }
    if (section == 0) {
      std::size_t k = 0, count = 0;
      if (std::sscanf(std::string(t).c_str(), "ngram %zu=%zu", &k, &count) != 2 || k != declared.size() + 1) {
        throw fail(lineno, "bad ngram count line");
      }
      declared.push_back(count);
      continue;
    }
    auto fields = text::split_whitespace(t);
    const auto k = static_cast<std::size_t>(section);
    if (fields.size() != k + 1 && fields.size() != k + 2) throw fail(lineno, "wrong number of fields");
    Entry e;
    try {
      e.log10_prob = text::parse_double(fields[0]);
      if (fields.size() == k + 2) e.log10_bow = text::parse_double(fields.back());
    } catch (const Error&) {
      throw fail(lineno, "bad number");
    }
    Key g;
    for (std::size_t i = 1; i <= k; ++i) {
      if (k == 1) m.add_word(fields[i]);
      auto it = m.ids_.find(fields[i]);
      if (it == m.ids_.end()) throw fail(lineno, "word '" + fields[i] + "' missing from the unigram section");
      g.push_back(static_cast<char32_t>(it->second));
    }
    if (!m.tables_[k - 1].emplace(g, e).second) throw fail(lineno, "duplicate n-gram");
  }
  if (!ended) throw ParseError(std::string(source) + ": missing \\end\\ marker");
  if (declared.empty()) throw ParseError(std::string(source) + ": no \\data\\ section");
  for (std::size_t k = 0; k < declared.size(); ++k) {
    if (m.tables_[k].size() != declared[k]) {
      throw ParseError(std::string(source) + ": " + std::to_string(k + 1) + "-gram count differs from header");
    }
  }
  m.order_ = static_cast<int>(declared.size());
  for (auto special : {kUnk, kBos, kEos}) {
    if (!m.ids_.contains(std::string(special))) {
      m.add_word(std::string(special));
      m.tables_[0][Key(1, static_cast<char32_t>(m.ids_.at(std::string(special))))].log10_prob = kLog10Zero;
    }
  }
  m.discounts_.clear();
  return m;
}

NGramModel NGramModel::load_arpa(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open language model " + path.string());
  return load_arpa(in, path.string());
}

}  // namespace morphgen
