#include "morphgen/rules.hpp"

#include <array>
#include <ostream>

#include "morphgen/error.hpp"
#include "morphgen/text.hpp"

namespace morphgen {

void write_rule_trace(std::ostream& out, std::size_t sentence_id, const RuleReport& report) {
  for (const auto& a : report.applied) {
    out << sentence_id << '\t' << a.token_id << '\t' << a.rule << '\t' << a.before << '\t' << a.after << '\n';
  }
}

namespace {

bool is_vowel(char32_t c) { return std::u32string_view(U"aeiouáéíóúü").find(c) != std::u32string_view::npos; }

// Lowercase code points of `word` with a leading silent h dropped.
std::u32string sound_start(std::string_view word) {
  std::u32string w = text::decode(text::lowercase(word));
  if (!w.empty() && w[0] == U'h') w.erase(0, 1);
  return w;
}

bool starts_with_i_sound(std::string_view word) {
  const auto w = sound_start(word);
  if (w.empty()) return false;
  if (w[0] == U'í') return true;
  // Unaccented i before another vowel is a glide: hielo, hierba, iodo.
  return w[0] == U'i' && !(w.size() > 1 && is_vowel(w[1]));
}

bool starts_with_o_sound(std::string_view word) {
  const auto w = sound_start(word);
  return !w.empty() && (w[0] == U'o' || w[0] == U'ó');
}

}  // namespace

RuleReport conjunction_rule(std::vector<std::string>& tokens) {
  RuleReport report;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    auto& t = tokens[i];
    std::string after;
    if ((t == "y" || t == "Y") && starts_with_i_sound(tokens[i + 1])) {
      after = t == "y" ? "e" : "E";
    } else if ((t == "o" || t == "O") && starts_with_o_sound(tokens[i + 1])) {
      after = t == "o" ? "u" : "U";
    } else {
      continue;
    }
    report.applied.push_back({i, "conjunction", t, after});
    t = after;
  }
  return report;
}

bool is_clitic(std::string_view word) {
  static constexpr std::array<std::string_view, 11> kClitics = {"me", "te", "se", "le", "les", "lo",
                                                                "los", "la", "las", "nos", "os"};
  const auto lower = text::lowercase(word);
  for (auto c : kClitics) {
    if (lower == c) return true;
  }
  return false;
}

namespace {

char32_t accented(char32_t c) {
  switch (c) {
    case U'a': return U'á';
    case U'e': return U'é';
    case U'i': return U'í';
    case U'o': return U'ó';
    case U'u': return U'ú';
    case U'A': return U'Á';
    case U'E': return U'É';
    case U'I': return U'Í';
    case U'O': return U'Ó';
    case U'U': return U'Ú';
    default: return c;
  }
}

bool has_accent(std::u32string_view w) {
  for (char32_t c : w) {
    if (std::u32string_view(U"áéíóúÁÉÍÓÚ").find(text::to_lower(c)) != std::u32string_view::npos) return true;
  }
  return false;
}

// Puts the accent on the nucleus of `syllable`: the strong vowel of a
// diphthong, else the last vowel (iu, ui).
std::u32string accent_syllable(std::u32string syllable) {
  std::size_t target = std::u32string::npos;
  for (std::size_t i = 0; i < syllable.size(); ++i) {
    const char32_t c = text::to_lower(syllable[i]);
    // u after q/g before e/i is silent.
    if (c == U'u' && i > 0 && i + 1 < syllable.size()) {
      const char32_t prev = text::to_lower(syllable[i - 1]);
      const char32_t next = text::to_lower(syllable[i + 1]);
      if ((prev == U'q' || prev == U'g') && (next == U'e' || next == U'i')) continue;
    }
    if (c == U'a' || c == U'e' || c == U'o') {
      target = i;
      break;
    }
    if (c == U'i' || c == U'u') target = i;
  }
  if (target != std::u32string::npos) syllable[target] = accented(syllable[target]);
  return syllable;
}

}  // namespace

std::string clitic_accentuation_rule(std::string_view verb_form, const std::vector<std::string>& clitics) {
  std::string joined(verb_form);
  for (const auto& c : clitics) {
    if (!is_clitic(c)) throw DataError("\"" + c + "\" is not an enclitic pronoun");
    joined += c;
  }
  if (clitics.empty() || has_accent(text::decode(verb_form))) return joined;

  const std::size_t stress = stressed_syllable(verb_form);
  auto syll = syllabify(joined);
  if (stress + 3 > syll.size()) return joined;
  syll[stress] = text::encode(accent_syllable(text::decode(syll[stress])));
  std::string out;
  for (const auto& s : syll) out += s;
  return out;
}

RuleReport accentuation_rule(std::vector<std::string>& tokens) {
  RuleReport report;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < tokens.size();) {
    if (tokens[i].starts_with('+')) {
      out.push_back(tokens[i++].substr(1));
      continue;
    }
    std::vector<std::string> clitics;
    std::size_t j = i + 1;
    for (; j < tokens.size() && tokens[j].starts_with('+'); ++j) clitics.push_back(tokens[j].substr(1));
    if (clitics.empty()) {
      out.push_back(tokens[i]);
    } else {
      std::string before = tokens[i];
      for (std::size_t k = i + 1; k < j; ++k) before += " " + tokens[k];
      out.push_back(clitic_accentuation_rule(tokens[i], clitics));
      report.applied.push_back({i, "clitic_accentuation", before, out.back()});
    }
    i = j;
  }
  tokens = std::move(out);
  return report;
}

RuleReport apply_rules(std::vector<std::string>& tokens) {
  RuleReport report = conjunction_rule(tokens);
  for (auto& a : accentuation_rule(tokens).applied) report.applied.push_back(std::move(a));
  return report;
}

}  // namespace morphgen
