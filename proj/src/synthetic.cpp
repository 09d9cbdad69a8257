#include "morphgen/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "morphgen/error.hpp"
#include "morphgen/random.hpp"
#include "morphgen/text.hpp"

namespace morphgen {

namespace {

constexpr int kMaxDepth = 64;

Grammar::Symbol parse_symbol(const std::string& text, std::string_view where) {
  Grammar::Symbol s;
  const auto open = text.find('{');
  if (open == std::string::npos) {
    s.name = text;
  } else {
    if (text.back() != '}' || open == 0 || open + 2 > text.size() - 1) {
      throw ParseError(std::string(where) + ": malformed symbol \"" + text + "\"");
    }
    s.name = text.substr(0, open);
    s.var = text.substr(open + 1, text.size() - open - 2);
  }
  return s;
}

struct Binding {
  char gender;
  char number;
  int group;
};

bool compatible(const Grammar::Form& form, const Binding* binding) {
  if (!binding) return true;
  if (auto g = form.tag.slot_value(Task::Gender)) {
    if (*g != binding->gender && *g != 'C' && *g != 'N' && *g != kUnspecified) return false;
  }
  if (auto n = form.tag.slot_value(Task::Number)) {
    if (*n != binding->number && *n != 'N' && *n != kUnspecified) return false;
  }
  return true;
}

char draw(const std::map<char, double>& prior, Rng& rng) {
  std::vector<char> keys;
  std::vector<double> weights;
  for (const auto& [k, w] : prior) {
    keys.push_back(k);
    weights.push_back(w);
  }
  return keys[rng.weighted(weights)];
}

class Generator {
 public:
  Generator(const Grammar& g, Rng& rng) : grammar_(g), rng_(rng) {
    for (std::size_t i = 0; i < g.rules().size(); ++i) by_lhs_[g.rules()[i].lhs.name].push_back(i);
  }

  void sentence(Sentence& out, std::vector<int>& groups) {
    next_group_ = 0;
    expand(Grammar::Symbol{grammar_.start_symbol(), {}}, nullptr, out, groups, 0);
  }

 private:
  void expand(const Grammar::Symbol& symbol, const Binding* binding, Sentence& out, std::vector<int>& groups,
              int depth) {
    if (depth > kMaxDepth) throw DataError("grammar recursion exceeds depth " + std::to_string(kMaxDepth));
    if (auto lex = grammar_.lexicon().find(symbol.name); lex != grammar_.lexicon().end()) {
      emit(lex->second, symbol.name, binding, out, groups);
      return;
    }
    const auto& candidates = by_lhs_.at(symbol.name);
    std::vector<std::size_t> usable;
    std::vector<double> weights;
    for (auto idx : candidates) {
      const auto& r = grammar_.rules()[idx];
      if (r.number_condition && (!binding || binding->number != r.number_condition)) continue;
      usable.push_back(idx);
      weights.push_back(r.weight);
    }
    if (usable.empty()) {
      throw DataError("no rule for " + symbol.name + " matches the current binding");
    }
    const auto& rule = grammar_.rules()[usable[rng_.weighted(weights)]];
    std::map<std::string, Binding> scope;
    if (!rule.lhs.var.empty() && binding) scope[rule.lhs.var] = *binding;
    for (const auto& child : rule.rhs) {
      const Binding* child_binding = nullptr;
      if (!child.var.empty()) {
        auto it = scope.find(child.var);
        if (it == scope.end()) {
          Binding fresh{draw(grammar_.gender_prior(), rng_), draw(grammar_.number_prior(), rng_), next_group_++};
          it = scope.emplace(child.var, fresh).first;
        }
        child_binding = &it->second;
      }
      expand(child, child_binding, out, groups, depth + 1);
    }
  }

  void emit(const std::vector<Grammar::Entry>& entries, const std::string& cls, const Binding* binding,
            Sentence& out, std::vector<int>& groups) {
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> options;
    for (std::size_t e = 0; e < entries.size(); ++e) {
      std::vector<std::size_t> forms;
      for (std::size_t f = 0; f < entries[e].forms.size(); ++f) {
        if (compatible(entries[e].forms[f], binding)) forms.push_back(f);
      }
      if (!forms.empty()) options.emplace_back(e, std::move(forms));
    }
    if (options.empty()) {
      throw DataError("lexical class " + cls + " has no form for gender " +
                      std::string(1, binding ? binding->gender : '?') + " number " +
                      std::string(1, binding ? binding->number : '?'));
    }
    const auto& [entry_idx, forms] = options[rng_.below(options.size())];
    const auto& entry = entries[entry_idx];
    const auto& form = entry.forms[forms[rng_.below(forms.size())]];
    out.push_back(TaggedToken{form.surface, entry.lemma, form.tag});
    groups.push_back(binding ? binding->group : -1);
  }

  const Grammar& grammar_;
  Rng& rng_;
  std::map<std::string, std::vector<std::size_t>> by_lhs_;
  int next_group_ = 0;
};

}  // namespace

Grammar Grammar::parse(std::istream& in, std::string_view source, const SlotTable& table) {
  Grammar g;
  bool first_rule = true;
  std::string section;
  std::string line;
  int lineno = 0;
  bool custom_gender = false;
  bool custom_number = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = std::string(source) + ":" + std::to_string(lineno);
    auto body = text::trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ParseError(where + ": malformed section header");
      section = std::string(body.substr(1, body.size() - 2));
      if (section != "priors" && section != "rules" && section != "lexicon") {
        throw ParseError(where + ": unknown section [" + section + "]");
      }
      continue;
    }
    auto fields = text::split_whitespace(body);
    if (section == "priors") {
      if (fields.size() != 3 || (fields[0] != "gender" && fields[0] != "number") || fields[1].size() != 1) {
        throw ParseError(where + ": expected `gender|number VALUE WEIGHT`");
      }
      auto& prior = fields[0] == "gender" ? g.gender_prior_ : g.number_prior_;
      auto& custom = fields[0] == "gender" ? custom_gender : custom_number;
      if (!custom) {
        prior.clear();
        custom = true;
      }
      const char value = fields[1][0];
      if (fields[0] == "gender" ? (value != 'M' && value != 'F') : (value != 'S' && value != 'P')) {
        throw ParseError(where + ": prior value must be M/F for gender and S/P for number");
      }
      const double w = text::parse_double(fields[2]);
      if (!(w > 0)) throw ParseError(where + ": prior weight must be positive");
      prior[value] = w;
    } else if (section == "rules") {
      const auto arrow = std::find(fields.begin(), fields.end(), "->");
      const auto colon = std::find(fields.begin(), fields.end(), ":");
      if (arrow == fields.end() || colon == fields.end() || colon < arrow || colon + 2 != fields.end() ||
          arrow == fields.begin() || colon == arrow + 1) {
        throw ParseError(where + ": expected `LHS [@S|@P] -> RHS... : weight`");
      }
      Rule r;
      r.lhs = parse_symbol(fields[0], where);
      if (arrow - fields.begin() == 2) {
        if (fields[1] != "@S" && fields[1] != "@P") throw ParseError(where + ": bad condition " + fields[1]);
        if (r.lhs.var.empty()) throw ParseError(where + ": a number condition needs an agreement variable");
        r.number_condition = fields[1][1];
      } else if (arrow - fields.begin() != 1) {
        throw ParseError(where + ": malformed left-hand side");
      }
      for (auto it = arrow + 1; it != colon; ++it) r.rhs.push_back(parse_symbol(*it, where));
      r.weight = text::parse_double(*(colon + 1));
      if (!(r.weight > 0)) throw ParseError(where + ": rule weight must be positive");
      if (first_rule) {
        g.start_ = r.lhs.name;
        first_rule = false;
      }
      g.rules_.push_back(std::move(r));
    } else if (section == "lexicon") {
      if (fields.size() < 3) throw ParseError(where + ": expected `CLASS lemma TAG=surface...`");
      Entry e;
      e.lemma = fields[1];
      for (std::size_t i = 2; i < fields.size(); ++i) {
        const auto eq = fields[i].find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == fields[i].size()) {
          throw ParseError(where + ": malformed form \"" + fields[i] + "\"");
        }
        try {
          e.forms.push_back(Form{PosTag::parse(fields[i].substr(0, eq), table), fields[i].substr(eq + 1)});
        } catch (const ParseError& err) {
          throw ParseError(where + ": " + err.what());
        }
      }
      g.lexicon_[fields[0]].push_back(std::move(e));
    } else {
      throw ParseError(where + ": content outside of a section");
    }
  }
  g.validate(source);
  return g;
}

Grammar Grammar::load(const std::filesystem::path& path, const SlotTable& table) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open grammar " + path.string());
  return parse(in, path.string(), table);
}

void Grammar::validate(std::string_view source) const {
  const std::string where(source);
  if (rules_.empty()) throw ParseError(where + ": grammar has no rules");
  std::set<std::string> nonterminals;
  for (const auto& r : rules_) nonterminals.insert(r.lhs.name);
  for (const auto& r : rules_) {
    if (lexicon_.count(r.lhs.name)) {
      throw ParseError(where + ": " + r.lhs.name + " is both a rule head and a lexical class");
    }
    for (const auto& s : r.rhs) {
      if (!nonterminals.count(s.name) && !lexicon_.count(s.name)) {
        throw ParseError(where + ": symbol " + s.name + " has neither rules nor lexical entries");
      }
    }
  }
  for (const auto& [cls, entries] : lexicon_) {
    if (entries.empty()) throw ParseError(where + ": lexical class " + cls + " is empty");
  }
}

std::vector<Grammar::LexiconLine> Grammar::lexicon_lines() const {
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  std::vector<LexiconLine> out;
  for (const auto& [cls, entries] : lexicon_) {
    for (const auto& e : entries) {
      for (const auto& f : e.forms) {
        if (seen.emplace(e.lemma, f.tag.str(), f.surface).second) {
          out.push_back(LexiconLine{f.surface, e.lemma, f.tag.str()});
        }
      }
    }
  }
  return out;
}

SyntheticCorpus generate_synthetic_corpus(std::uint64_t seed, std::size_t sentences, const Grammar& grammar) {
  if (sentences < 1) throw UsageError("the synthetic corpus needs at least one sentence");
  Rng rng(seed);
  Generator gen(grammar, rng);
  SyntheticCorpus out;
  out.full.resize(sentences);
  out.groups.resize(sentences);
  for (std::size_t i = 0; i < sentences; ++i) gen.sentence(out.full[i], out.groups[i]);
  return out;
}

std::vector<AgreementViolation> check_agreement(const SyntheticCorpus& corpus) {
  std::vector<AgreementViolation> out;
  for (std::size_t s = 0; s < corpus.full.size(); ++s) {
    std::map<int, std::pair<char, char>> seen;  // group -> (gender, number)
    for (std::size_t t = 0; t < corpus.full[s].size(); ++t) {
      const int group = corpus.groups[s][t];
      if (group < 0) continue;
      auto& [g, n] = seen.try_emplace(group, '\0', '\0').first->second;
      const auto& tag = corpus.full[s][t].tag;
      if (auto v = tag.slot_value(Task::Gender); v && (*v == 'M' || *v == 'F')) {
        if (g && g != *v) out.push_back({s, t, "gender disagrees within group " + std::to_string(group)});
        g = *v;
      }
      if (auto v = tag.slot_value(Task::Number); v && (*v == 'S' || *v == 'P')) {
        if (n && n != *v) out.push_back({s, t, "number disagrees within group " + std::to_string(group)});
        n = *v;
      }
    }
  }
  return out;
}

}  // namespace morphgen
