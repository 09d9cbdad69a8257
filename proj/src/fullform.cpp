#include "morphgen/fullform.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include "morphgen/error.hpp"
#include "morphgen/text.hpp"

namespace morphgen {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Exact: return "exact";
    case Provenance::InflectionFallback: return "inflection";
    case Provenance::LemmaFallback: return "lemma";
  }
  return "?";
}

// ---- priors ----

void InflectionPriors::add(char category, Task task, char value, double count) {
  counts_[{category, task}][value] += count;
}

double InflectionPriors::count(char category, Task task, char value) const {
  auto it = counts_.find({category, task});
  if (it == counts_.end()) return 0;
  auto v = it->second.find(value);
  return v == it->second.end() ? 0 : v->second;
}

std::string InflectionPriors::ordered_values(char category, Task task) const {
  std::string values(task == Task::Gender ? gender_alphabet() : number_alphabet());
  std::stable_sort(values.begin(), values.end(),
                   [&](char a, char b) { return count(category, task, a) > count(category, task, b); });
  return values;
}

InflectionPriors InflectionPriors::from_corpus(const Corpus& full) {
  InflectionPriors p;
  for (const auto& s : full) {
    for (const auto& t : s) {
      for (Task task : {Task::Gender, Task::Number}) {
        if (auto v = t.tag.slot_value(task)) p.add(t.tag.category_letter(), task, *v, 1);
      }
    }
  }
  return p;
}

InflectionPriors InflectionPriors::parse(std::istream& in, std::string_view source) {
  InflectionPriors p;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fail = [&](const std::string& what) {
      return ParseError(std::string(source) + ":" + std::to_string(lineno) + ": " + what);
    };
    std::vector<std::string> f;
    std::size_t start = 0;
    for (std::size_t tab; (tab = t.find('\t', start)) != std::string_view::npos; start = tab + 1) {
      f.emplace_back(t.substr(start, tab - start));
    }
    f.emplace_back(t.substr(start));
    if (f.size() != 4) throw fail("expected category, slot, value and count");
    if (f[0].size() != 1 || f[2].size() != 1) throw fail("category and value must be single letters");
    Task task;
    try {
      task = parse_task(f[1]);
    } catch (const Error&) {
      throw fail("unknown slot '" + f[1] + "'");
    }
    const auto& alphabet = task == Task::Gender ? gender_alphabet() : number_alphabet();
    if (alphabet.find(f[2][0]) == std::string_view::npos) throw fail("value outside the slot alphabet");
    double count;
    try {
      count = text::parse_double(f[3]);
    } catch (const Error&) {
      throw fail("bad count");
    }
    if (!(count >= 0)) throw fail("negative count");
    p.add(f[0][0], task, f[2][0], count);
  }
  return p;
}

InflectionPriors InflectionPriors::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open priors " + path.string());
  return parse(in, path.string());
}

void InflectionPriors::save(std::ostream& out) const {
  out << "# category\tslot\tvalue\tcount\n";
  for (const auto& [key, values] : counts_) {
    for (const auto& [v, c] : values) {
      out << key.first << '\t' << to_string(key.second) << '\t' << v << '\t' << text::format_double(c) << '\n';
    }
  }
}

void InflectionPriors::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  save(out);
}

// ---- lexicon ----

namespace {

std::string key_of(std::string_view lemma, std::string_view tag) {
  std::string k(lemma);
  k += '\t';
  k += tag;
  return k;
}

}  // namespace

Lexicon Lexicon::parse(std::istream& in, std::string_view source, const SlotTable& table) {
  Lexicon lex;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fail = [&](const std::string& what) {
      return ParseError(std::string(source) + ":" + std::to_string(lineno) + ": " + what);
    };
    const auto a = t.find('\t');
    const auto b = a == std::string_view::npos ? a : t.find('\t', a + 1);
    if (b == std::string_view::npos || t.find('\t', b + 1) != std::string_view::npos) {
      throw fail("expected surface, lemma and tag separated by tabs");
    }
    const std::string surface(t.substr(0, a));
    const std::string lemma(t.substr(a + 1, b - a - 1));
    if (surface.empty() || lemma.empty()) throw fail("empty surface or lemma");
    PosTag tag;
    try {
      tag = PosTag::parse(t.substr(b + 1), table);
    } catch (const ParseError& e) {
      throw fail(e.what());
    }
    auto [it, inserted] = lex.entries_.emplace(key_of(lemma, tag.str()), Entry{surface, lineno});
    if (!inserted) {
      if (it->second.surface != surface) {
        throw DataError(std::string(source) + ": conflicting entries for " + lemma + " " + tag.str() + " at lines " +
                        std::to_string(it->second.line) + " and " + std::to_string(lineno));
      }
      continue;
    }
    lex.by_lemma_[lemma].push_back(tag);
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path, const SlotTable& table) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon " + path.string());
  return parse(in, path.string(), table);
}

const std::string* Lexicon::find(std::string_view lemma, const PosTag& tag) const {
  auto it = entries_.find(key_of(lemma, tag.str()));
  return it == entries_.end() ? nullptr : &it->second.surface;
}

std::vector<PosTag> Lexicon::tags_of(std::string_view lemma) const {
  auto it = by_lemma_.find(std::string(lemma));
  return it == by_lemma_.end() ? std::vector<PosTag>{} : it->second;
}

GeneratedForm Lexicon::generate_form(std::string_view lemma, const PosTag& tag) const {
  if (const auto* s = find(lemma, tag)) return {*s, Provenance::Exact};
  if (by_lemma_.contains(std::string(lemma))) {
    const char cat = tag.category_letter();
    const bool has_g = tag.slot(Task::Gender).has_value();
    const bool has_n = tag.slot(Task::Number).has_value();
    const std::string gs = has_g ? priors_.ordered_values(cat, Task::Gender) : "";
    const std::string ns = has_n ? priors_.ordered_values(cat, Task::Number) : "";
    auto try_tag = [&](const PosTag& t) -> const std::string* { return t == tag ? nullptr : find(lemma, t); };
    for (char n : ns) {
      if (const auto* s = try_tag(tag.with_slot(Task::Number, n))) return {*s, Provenance::InflectionFallback};
    }
    for (char g : gs) {
      if (const auto* s = try_tag(tag.with_slot(Task::Gender, g))) return {*s, Provenance::InflectionFallback};
    }
    for (char g : gs) {
      for (char n : ns) {
        if (const auto* s = try_tag(tag.with_slot(Task::Gender, g).with_slot(Task::Number, n))) {
          return {*s, Provenance::InflectionFallback};
        }
      }
    }
  }
  return {std::string(lemma), Provenance::LemmaFallback};
}

// ---- realization ----

std::vector<ClassAssignment> assignments_of(const SentenceGraph& graph, const Path& path) {
  if (path.choices.size() != graph.layers.size()) throw DataError("path does not match graph");
  std::vector<ClassAssignment> out;
  out.reserve(path.choices.size());
  for (std::size_t i = 0; i < path.choices.size(); ++i) {
    const auto& node = graph.layers[i].at(static_cast<std::size_t>(path.choices[i]));
    out.push_back({node.gender, node.number});
  }
  return out;
}

PosTag apply_class(const PosTag& tag, Task task, int cls) {
  const auto current = tag.slot_value(task);
  if (!current) {
    throw DataError("tag " + tag.str() + " has no " + std::string(to_string(task)) + " slot to write");
  }
  if (cls < 0 || cls > 2) throw DataError("class index out of range");
  if (cls == 2) {
    if (*current == kUnspecified) return tag;
    return tag.with_slot(task, task == Task::Gender ? 'C' : 'N');
  }
  return tag.with_slot(task, class_letter(task, cls));
}

Sentence apply_assignments(const Sentence& simplified, std::span<const ClassAssignment> assignments) {
  if (assignments.size() != simplified.size()) {
    throw DataError("class assignments do not align with the sentence");
  }
  Sentence out = simplified;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& tag = out[i].tag;
    if (assignments[i].gender >= 0) tag = apply_class(tag, Task::Gender, assignments[i].gender);
    if (assignments[i].number >= 0) tag = apply_class(tag, Task::Number, assignments[i].number);
  }
  return out;
}

Realization realize_path(const Lexicon& lexicon, const Sentence& simplified,
                         std::span<const ClassAssignment> assignments) {
  const Sentence full = apply_assignments(simplified, assignments);
  Realization r;
  for (const auto& tok : full) {
    const auto& tag = tok.tag;
    const bool enclitic = tok.lemma.size() > 1 && tok.lemma.front() == '+';
    const std::string_view lemma = enclitic ? std::string_view(tok.lemma).substr(1) : std::string_view(tok.lemma);
    auto form = lexicon.generate_form(lemma, tag);
    r.tokens.push_back(enclitic ? "+" + form.surface : form.surface);
    r.provenance.push_back(form.provenance);
  }
  return r;
}

std::string present_sentence(const std::vector<std::string>& tokens) {
  std::string s = text::join(tokens, " ");
  return text::capitalize_first(s);
}

}  // namespace morphgen
