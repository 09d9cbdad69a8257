#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace morphgen {

struct RuleApplication {
  std::size_t token_id = 0;
  std::string rule;
  std::string before;
  std::string after;
};

struct RuleReport {
  std::vector<RuleApplication> applied;
};

// `token_id TAB rule TAB before TAB after` per application.
void write_rule_trace(std::ostream& out, std::size_t sentence_id, const RuleReport& report);

// Spanish syllabification. Throws DataError on non-letters. Concatenating
// the result gives back `word`.
std::vector<std::string> syllabify(std::string_view word);

// Index of the stressed syllable of a standalone word.
std::size_t stressed_syllable(std::string_view word);

// y -> e before an /i/ sound, o -> u before an /o/ sound. Rewrites in place
// and records each change.
RuleReport conjunction_rule(std::vector<std::string>& tokens);

bool is_clitic(std::string_view word);

// Attaches enclitic pronouns to a verb form, writing the acute accent the
// longer word needs. Throws DataError when a clitic is outside the closed
// set {me, te, se, le, les, lo, los, la, las, nos, os}.
std::string clitic_accentuation_rule(std::string_view verb_form, const std::vector<std::string>& clitics);

// Token-level form of the accentuation rule: every token spelled `+clitic`
// is attached to the closest preceding non-clitic token. A leading `+token`
// with nothing to attach to loses its marker.
RuleReport accentuation_rule(std::vector<std::string>& tokens);

// Conjunction rule, then accentuation.
RuleReport apply_rules(std::vector<std::string>& tokens);

}  // namespace morphgen
