#include <algorithm>

#include "morphgen/error.hpp"
#include "morphgen/rules.hpp"
#include "morphgen/text.hpp"

namespace morphgen {

namespace {

bool is_letter(char32_t c) {
  if (c >= U'a' && c <= U'z') return true;
  return std::u32string_view(U"áéíóúüñ").find(c) != std::u32string_view::npos;
}

bool is_vowel_letter(char32_t c) { return std::u32string_view(U"aeiouáéíóúü").find(c) != std::u32string_view::npos; }

// Strong vowels, counting accented i/u, which break diphthongs.
bool is_strong(char32_t c) { return std::u32string_view(U"aeoáéóíú").find(c) != std::u32string_view::npos; }

bool is_liquid(char32_t c) { return c == U'r' || c == U'l'; }
bool is_obstruent(char32_t c) { return std::u32string_view(U"pbfcgktd").find(c) != std::u32string_view::npos; }

struct Unit {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool vowel = false;
};

// Splits a lowercase word into consonant units (ch, ll, rr, qu, gu+e/i kept
// whole) and single vowels.
std::vector<Unit> units_of(const std::u32string& w) {
  std::vector<Unit> units;
  for (std::size_t i = 0; i < w.size();) {
    const char32_t c = w[i];
    const char32_t next = i + 1 < w.size() ? w[i + 1] : 0;
    const char32_t after = i + 2 < w.size() ? w[i + 2] : 0;
    if ((c == U'c' && next == U'h') || (c == U'l' && next == U'l') || (c == U'r' && next == U'r')) {
      units.push_back({i, i + 2, false});
      i += 2;
    } else if ((c == U'q' || c == U'g') && next == U'u' &&
               (after == U'e' || after == U'i' || after == U'é' || after == U'í')) {
      units.push_back({i, i + 2, false});
      i += 2;
    } else if (c == U'y') {
      // Vowel only as a word-final glide after a vowel, or alone.
      const bool glide = (i + 1 == w.size() && i > 0 && is_vowel_letter(w[i - 1])) || w.size() == 1;
      units.push_back({i, i + 1, glide});
      ++i;
    } else {
      units.push_back({i, i + 1, is_vowel_letter(c)});
      ++i;
    }
  }
  return units;
}

bool inseparable(const std::u32string& w, const Unit& a, const Unit& b) {
  return a.end - a.begin == 1 && b.end - b.begin == 1 && is_obstruent(w[a.begin]) && is_liquid(w[b.begin]);
}

}  // namespace

std::vector<std::string> syllabify(std::string_view word) {
  const std::u32string original = text::decode(word);
  if (original.empty()) throw DataError("cannot syllabify an empty word");
  std::u32string w;
  for (char32_t c : original) {
    const char32_t l = text::to_lower(c);
    if (!is_letter(l)) throw DataError("cannot syllabify \"" + std::string(word) + "\": non-letter character");
    w.push_back(l);
  }
  const auto units = units_of(w);

  // Start offset (in characters) of each syllable after the first.
  std::vector<std::size_t> cuts;
  std::size_t u = 0;
  while (u < units.size() && !units[u].vowel) ++u;
  while (u < units.size()) {
    // u is a vowel; extend the nucleus across diphthongs.
    std::size_t v = u;
    while (v + 1 < units.size() && units[v + 1].vowel) {
      if (is_strong(w[units[v].begin]) && is_strong(w[units[v + 1].begin])) break;
      ++v;
    }
    if (v + 1 < units.size() && units[v + 1].vowel) {
      cuts.push_back(units[v + 1].begin);  // hiatus
      u = v + 1;
      continue;
    }
    std::size_t c = v + 1;
    while (c < units.size() && !units[c].vowel) ++c;
    if (c == units.size()) break;  // trailing consonants close the last syllable
    const std::size_t n = c - (v + 1);
    std::size_t onset;  // unit index where the next syllable starts
    if (n <= 1) {
      onset = v + 1;
    } else if (inseparable(w, units[c - 2], units[c - 1])) {
      onset = c - 2;
    } else {
      onset = c - 1;
    }
    cuts.push_back(units[onset].begin);
    u = c;
  }

  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t cut : cuts) {
    out.push_back(text::encode(std::u32string_view(original).substr(start, cut - start)));
    start = cut;
  }
  out.push_back(text::encode(std::u32string_view(original).substr(start)));
  return out;
}

std::size_t stressed_syllable(std::string_view word) {
  const auto syll = syllabify(word);
  for (std::size_t i = 0; i < syll.size(); ++i) {
    for (char32_t c : text::decode(text::lowercase(syll[i]))) {
      if (std::u32string_view(U"áéíóú").find(c) != std::u32string_view::npos) return i;
    }
  }
  if (syll.size() == 1) return 0;
  const char32_t last = text::to_lower(text::decode(word).back());
  const bool llana = is_vowel_letter(last) || last == U'n' || last == U's';
  return llana ? syll.size() - 2 : syll.size() - 1;
}

}  // namespace morphgen
