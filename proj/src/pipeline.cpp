#include "morphgen/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "morphgen/synthetic.hpp"
#include "morphgen/text.hpp"

namespace morphgen {

namespace fs = std::filesystem;

// ---- config ----

namespace {

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_relative() ? (base / p).lexically_normal() : p;
}

std::size_t positive(const KeyValueConfig& kv, const std::string& key, std::size_t fallback) {
  const auto v = kv.get_int(key, static_cast<std::int64_t>(fallback));
  if (v < 0) throw UsageError(kv.source() + ": " + key + " must not be negative");
  return static_cast<std::size_t>(v);
}

void read_hyper(const KeyValueConfig& kv, const std::string& prefix, Hyperparameters& hp, std::size_t& vocab_limit) {
  hp.window_length = positive(kv, prefix + ".window", hp.window_length);
  vocab_limit = positive(kv, prefix + ".vocab", vocab_limit);
  hp.embedding_dim = positive(kv, prefix + ".embedding", hp.embedding_dim);
  hp.conv_filter_size = positive(kv, prefix + ".filter", hp.conv_filter_size);
  hp.conv_filters = positive(kv, prefix + ".filters", hp.conv_filters);
  hp.lstm_units = positive(kv, prefix + ".lstm", hp.lstm_units);
  hp.learning_rate = kv.get_double(prefix + ".learning_rate", hp.learning_rate);
  hp.epochs = positive(kv, prefix + ".epochs", hp.epochs);
  hp.batch_size = positive(kv, prefix + ".batch", hp.batch_size);
  if (auto v = kv.get(prefix + ".optimizer")) {
    if (*v == "sgd") hp.optimizer = Optimizer::Sgd;
    else if (*v == "adam") hp.optimizer = Optimizer::Adam;
    else throw UsageError(kv.source() + ": " + prefix + ".optimizer must be sgd or adam");
  }
  hp.vocab_size = vocab_limit + 2;
  hp.validate();
}

}  // namespace

PipelineConfig PipelineConfig::from(const KeyValueConfig& kv, const fs::path& base) {
  PipelineConfig c;
  if (auto v = kv.get("grammar")) c.grammar = resolve(base, *v);
  if (auto v = kv.get("lexicon")) c.lexicon = resolve(base, *v);
  if (auto v = kv.get("slots")) c.slots = resolve(base, *v);
  c.work_dir = resolve(base, kv.get_string("work_dir", "work"));
  if (auto v = kv.get("corpus_dir")) c.corpus_dir = resolve(base, *v);
  if (auto v = kv.get("scheme")) c.scheme = parse_scheme(*v);
  read_hyper(kv, "gender", c.gender, c.gender_vocab_limit);
  read_hyper(kv, "number", c.number, c.number_vocab_limit);
  c.lm_order = static_cast<int>(kv.get_int("lm.order", c.lm_order));
  if (c.lm_order < 1 || c.lm_order > 5) throw UsageError(kv.source() + ": lm.order must be between 1 and 5");
  c.k_best = positive(kv, "k_best", c.k_best);
  if (c.k_best < 1) throw UsageError(kv.source() + ": k_best must be at least 1");
  if (auto v = kv.get("lambda")) {
    if (*v == "tuned") {
      c.lambda_from_tuning = true;
    } else {
      c.lambda = kv.get_double("lambda", c.lambda);
      if (!std::isfinite(c.lambda)) throw UsageError(kv.source() + ": lambda must be finite");
    }
  }
  if (auto v = kv.get("lambda.grid")) {
    c.lambda_grid.clear();
    std::string item;
    std::istringstream in(*v);
    while (std::getline(in, item, ',')) c.lambda_grid.push_back(text::parse_double(item));
    if (c.lambda_grid.empty()) throw UsageError(kv.source() + ": lambda.grid is empty");
    std::sort(c.lambda_grid.begin(), c.lambda_grid.end());
  }
  if (auto v = kv.get("rescoring")) c.rescoring = parse_rescoring_mode(*v);
  c.set_seed(static_cast<std::uint64_t>(kv.get_int("seed", static_cast<std::int64_t>(c.seed))));
  c.synthetic_train = positive(kv, "synthetic.train", c.synthetic_train);
  c.synthetic_heldout = positive(kv, "synthetic.heldout", c.synthetic_heldout);
  c.synthetic_dev = positive(kv, "synthetic.dev", c.synthetic_dev);
  if (auto unused = kv.unused_keys(); !unused.empty()) {
    throw UsageError(kv.source() + ": unknown config key '" + unused.front() + "'");
  }
  if (!c.slots.empty()) c.table_ = SlotTable::load(c.slots);
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  return from(KeyValueConfig::load(path), path.parent_path());
}

void PipelineConfig::set_seed(std::uint64_t s) {
  seed = s;
  gender.rng_seed = s;
  number.rng_seed = s;
}

const SlotTable& PipelineConfig::slot_table() const { return table_ ? *table_ : SlotTable::builtin(); }

fs::path PipelineConfig::corpus_path(std::string_view split, std::string_view kind) const {
  const fs::path dir = corpus_dir.empty() ? work_dir / "corpus" : corpus_dir;
  return dir / (std::string(split) + "." + std::string(kind));
}
fs::path PipelineConfig::vocab_path(Task t) const { return work_dir / ("vocab." + std::string(to_string(t)) + ".txt"); }
fs::path PipelineConfig::dataset_path(Task t, std::string_view split) const {
  return work_dir / ("dataset." + std::string(to_string(t)) + "." + std::string(split) + ".tsv");
}
fs::path PipelineConfig::model_path(Task t) const { return work_dir / ("model." + std::string(to_string(t)) + ".bin"); }
fs::path PipelineConfig::train_log_path(Task t) const {
  return work_dir / ("train." + std::string(to_string(t)) + ".log");
}
fs::path PipelineConfig::lm_path() const { return work_dir / "lm.arpa"; }
fs::path PipelineConfig::priors_path() const { return work_dir / "priors.tsv"; }
fs::path PipelineConfig::tuned_lambda_path() const { return work_dir / "lambda.tuned"; }

// ---- helpers ----

namespace {

// Re-throws with the stage name prepended, keeping the error category.
template <typename F>
auto staged(std::string_view stage, F&& fn) -> decltype(fn()) {
  const std::string prefix = std::string(stage) + ": ";
  try {
    return fn();
  } catch (const UsageError& e) {
    throw UsageError(prefix + e.what());
  } catch (const ParseError& e) {
    throw ParseError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(prefix + e.what());
  }
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + std::string(what) + " " + path.string());
  return in;
}

std::vector<std::string> lowered(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(text::lowercase(t));
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> read_token_lines(const fs::path& path) {
  auto in = open_in(path, "text");
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(text::split_whitespace(line));
  return out;
}

// ---- synthesize-corpus ----

void cmd_synthesize_corpus(const PipelineConfig& cfg, std::ostream& log) {
  staged("synthesize-corpus", [&] {
    if (cfg.grammar.empty()) throw UsageError("no grammar configured");
    const auto grammar = Grammar::load(cfg.grammar, cfg.slot_table());
    const std::size_t total = cfg.synthetic_train + cfg.synthetic_heldout + cfg.synthetic_dev;
    if (total == 0) throw UsageError("synthetic corpus size is zero");
    auto sc = generate_synthetic_corpus(cfg.seed, total, grammar);
    if (auto v = check_agreement(sc); !v.empty()) {
      throw DataError("generated corpus violates agreement in sentence " + std::to_string(v.front().sentence_id) +
                      ": " + v.front().message);
    }
    const std::array<std::pair<std::string_view, std::size_t>, 3> splits = {
        {{"train", cfg.synthetic_train}, {"heldout", cfg.synthetic_heldout}, {"dev", cfg.synthetic_dev}}};
    std::size_t start = 0;
    for (const auto& [name, count] : splits) {
      Corpus part(sc.full.begin() + static_cast<std::ptrdiff_t>(start),
                  sc.full.begin() + static_cast<std::ptrdiff_t>(start + count));
      start += count;
      auto tagged = open_out(cfg.corpus_path(name, "tagged"));
      write_corpus(tagged, part);
      auto simplified = open_out(cfg.corpus_path(name, "simplified"));
      write_corpus(simplified, simplify_corpus(part, cfg.scheme));
      auto txt = open_out(cfg.corpus_path(name, "txt"));
      for (const auto& s : part) {
        std::vector<std::string> tokens;
        for (const auto& t : s) tokens.push_back(text::lowercase(t.surface));
        apply_rules(tokens);
        txt << text::join(tokens, " ") << '\n';
      }
      log << "synthesize-corpus: " << name << ": " << count << " sentences -> "
          << cfg.corpus_path(name, "tagged").string() << '\n';
    }
  });
}

// ---- prepare ----

void cmd_prepare(const PipelineConfig& cfg, std::ostream& log) {
  staged("prepare", [&] {
    const auto& table = cfg.slot_table();
    const Corpus train = load_corpus(cfg.corpus_path("train", "tagged"), table);
    const Corpus heldout = load_corpus(cfg.corpus_path("heldout", "tagged"), table);
    const Corpus dev = load_corpus(cfg.corpus_path("dev", "tagged"), table);
    const Corpus train_s = simplify_corpus(train, cfg.scheme);
    const Corpus heldout_s = simplify_corpus(heldout, cfg.scheme);
    const Corpus dev_s = simplify_corpus(dev, cfg.scheme);
    fs::create_directories(cfg.work_dir);
    for (Task task : {Task::Gender, Task::Number}) {
      const auto vocab = Vocabulary::build(train_s, cfg.vocab_limit(task));
      vocab.save(cfg.vocab_path(task));
      const auto& hp = cfg.hyper(task);
      for (const auto& [split, full, simp] :
           {std::tuple{"train", &train, &train_s}, std::tuple{"heldout", &heldout, &heldout_s},
            std::tuple{"dev", &dev, &dev_s}}) {
        DatasetFile data{task, hp.window_length, vocab.hash(), make_dataset(*full, *simp, task, hp.window_length, vocab)};
        auto out = open_out(cfg.dataset_path(task, split));
        write_dataset(out, data);
        log << "prepare: " << to_string(task) << " " << split << ": " << data.examples.size() << " examples\n";
      }
      log << "prepare: " << to_string(task) << " vocabulary: " << vocab.size() << " entries\n";
    }
    const auto lm = NGramModel::train(read_token_lines(cfg.corpus_path("train", "txt")), cfg.lm_order);
    lm.save_arpa(cfg.lm_path());
    log << "prepare: language model order " << cfg.lm_order << ", " << lm.vocabulary().size() << " words\n";
    InflectionPriors::from_corpus(train).save(cfg.priors_path());
  });
}

// ---- train ----

TrainResult cmd_train(const PipelineConfig& cfg, Task task, std::ostream& log) {
  return staged("train", [&] {
    Hyperparameters hp = cfg.hyper(task);
    if (hp.epochs < 1) throw UsageError("epochs must be at least 1");
    const auto vocab = Vocabulary::load(cfg.vocab_path(task));
    hp.vocab_size = vocab.size();
    auto read = [&](std::string_view split) {
      auto in = open_in(cfg.dataset_path(task, split), "dataset");
      auto data = read_dataset(in, cfg.dataset_path(task, split).string());
      if (data.task != task || data.vocab_hash != vocab.hash() || data.window_length != hp.window_length) {
        throw DataError(cfg.dataset_path(task, split).string() + " does not match the " +
                        std::string(to_string(task)) + " vocabulary and window; re-run prepare");
      }
      return data;
    };
    const auto train_set = read("train");
    const auto heldout = read("heldout");
    const auto dev = read("dev");
    auto log_file = open_out(cfg.train_log_path(task));
    log << "train: " << to_string(task) << ": " << train_set.examples.size() << " examples, " << hp.epochs
        << " epochs, kernels " << kernels::to_string(kernels::active_isa()) << '\n';
    struct Tee : std::streambuf {
      std::streambuf* a;
      std::streambuf* b;
      Tee(std::streambuf* x, std::streambuf* y) : a(x), b(y) {}
      int overflow(int c) override {
        if (c == EOF) return 0;
        return a->sputc(static_cast<char>(c)) == EOF || b->sputc(static_cast<char>(c)) == EOF ? EOF : c;
      }
      int sync() override { return a->pubsync() | b->pubsync(); }
    } tee(log_file.rdbuf(), log.rdbuf());
    std::ostream both(&tee);
    auto result = train(train_set.examples, heldout.examples, task, hp, vocab.hash(), &both, dev.examples);
    save_model(cfg.model_path(task), result.model);
    return result;
  });
}

// ---- resources and prediction ----

std::unique_ptr<Resources> Resources::load(const PipelineConfig& cfg, bool with_models) {
  return staged("load", [&] {
    if (cfg.lexicon.empty()) throw UsageError("no lexicon configured");
    auto res = std::unique_ptr<Resources>(new Resources{
        Vocabulary::load(cfg.vocab_path(Task::Gender)), Vocabulary::load(cfg.vocab_path(Task::Number)), std::nullopt,
        std::nullopt, NGramModel::load_arpa(cfg.lm_path()), Lexicon::load(cfg.lexicon, cfg.slot_table())});
    if (fs::exists(cfg.priors_path())) res->lexicon.set_priors(InflectionPriors::load(cfg.priors_path()));
    if (with_models) {
      res->gender.emplace(load_model(cfg.model_path(Task::Gender)), res->gender_vocab);
      res->number.emplace(load_model(cfg.model_path(Task::Number)), res->number_vocab);
    }
    return res;
  });
}

std::vector<SentencePredictions> predict_corpus(const Resources& res, const Corpus& simplified) {
  std::vector<SentencePredictions> out;
  out.reserve(simplified.size());
  for (const auto& s : simplified) {
    out.push_back(predict_sentence(res.gender ? &*res.gender : nullptr, res.number ? &*res.number : nullptr, s));
  }
  return out;
}

std::vector<SentencePredictions> oracle_predictions(const Corpus& full) {
  std::vector<SentencePredictions> out;
  for (const auto& s : full) {
    auto& sp = out.emplace_back(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (Task task : {Task::Gender, Task::Number}) {
        if (!needs_classification(s[i].tag, task)) continue;
        ProbDist d;
        d.probs[static_cast<std::size_t>(extract_label(s[i], task).index)] = 1.0;
        (task == Task::Gender ? sp[i].gender : sp[i].number) = d;
      }
    }
  }
  return out;
}

void write_predictions(std::ostream& out, const std::vector<SentencePredictions>& preds) {
  for (std::size_t s = 0; s < preds.size(); ++s) {
    for (std::size_t t = 0; t < preds[s].size(); ++t) {
      for (Task task : {Task::Gender, Task::Number}) {
        const auto& d = task == Task::Gender ? preds[s][t].gender : preds[s][t].number;
        if (!d) continue;
        out << s << '\t' << t << '\t' << to_string(task) << '\t' << text::format_double(d->probs[0]) << ','
            << text::format_double(d->probs[1]) << ',' << text::format_double(d->probs[2]) << '\n';
      }
    }
  }
}

std::vector<SentencePredictions> read_predictions(std::istream& in, const Corpus& simplified,
                                                  std::string_view source) {
  std::vector<SentencePredictions> out;
  for (const auto& s : simplified) out.emplace_back(s.size());
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (text::trim(line).empty()) continue;
    auto fail = [&](const std::string& what) {
      return ParseError(std::string(source) + ":" + std::to_string(lineno) + ": " + what);
    };
    std::istringstream fields(line);
    std::string sid, tid, task_name, probs;
    if (!std::getline(fields, sid, '\t') || !std::getline(fields, tid, '\t') ||
        !std::getline(fields, task_name, '\t') || !std::getline(fields, probs)) {
      throw fail("expected sentence_id, token_id, task and probabilities");
    }
    std::size_t s = 0, t = 0;
    Task task;
    ProbDist d;
    try {
      s = static_cast<std::size_t>(text::parse_double(sid));
      t = static_cast<std::size_t>(text::parse_double(tid));
      task = parse_task(task_name);
      std::istringstream ps(probs);
      std::string p;
      for (std::size_t c = 0; c < 3; ++c) {
        if (!std::getline(ps, p, ',')) throw fail("expected three probabilities");
        d.probs[c] = text::parse_double(p);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw fail(e.what());
    }
    if (s >= out.size() || t >= out[s].size()) throw fail("token position outside the input corpus");
    (task == Task::Gender ? out[s][t].gender : out[s][t].number) = d;
  }
  return out;
}

SentencePredictions mask_predictions(const Sentence& simplified, const SentencePredictions& preds) {
  if (preds.size() != simplified.size()) throw DataError("predictions do not align with the sentence");
  SentencePredictions out = preds;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& tag = simplified[i].tag;
    if (tag.slot_value(Task::Gender) != kGenderPlaceholder) out[i].gender.reset();
    if (tag.slot_value(Task::Number) != kNumberPlaceholder) out[i].number.reset();
  }
  return out;
}

// ---- decoding ----

DecodedSentence decode_sentence(const Sentence& simplified, const SentencePredictions& preds, const Lexicon& lexicon,
                                const NGramModel* lm, const DecodeSettings& settings) {
  DecodedSentence d;
  if (simplified.empty()) return d;
  const auto masked = mask_predictions(simplified, preds);
  const auto graph = build_graph(masked, settings.mode);
  d.candidates = settings.mode == RescoringMode::Off ? std::vector<Path>{best_path(graph)}
                                                     : yen_k_best(graph, settings.k);
  std::vector<RuleReport> reports;
  std::vector<std::size_t> fallbacks;
  for (const auto& path : d.candidates) {
    const auto assign = assignments_of(graph, path);
    d.candidate_tags.push_back(apply_assignments(simplified, assign));
    auto real = realize_path(lexicon, simplified, assign);
    fallbacks.push_back(static_cast<std::size_t>(
        std::count(real.provenance.begin(), real.provenance.end(), Provenance::LemmaFallback)));
    reports.push_back(apply_rules(real.tokens));
    d.candidate_tokens.push_back(lowered(real.tokens));
  }
  if (lm) d.chosen = rescore(d.candidates, d.candidate_tokens, *lm, settings.lambda);
  d.tokens = d.candidate_tokens[d.chosen];
  d.tags = d.candidate_tags[d.chosen];
  d.rules = reports[d.chosen];
  d.lemma_fallbacks = fallbacks[d.chosen];
  return d;
}

namespace {

std::string tags_line(const Sentence& s) {
  std::string line;
  for (const auto& t : s) {
    if (!line.empty()) line += ' ';
    line += format_tagged_token(t);
  }
  return line;
}

}  // namespace

GenerateSummary cmd_generate(const PipelineConfig& cfg, const GenerateOptions& opts, std::ostream& out,
                             std::ostream& err) {
  return staged("generate", [&] {
    if (opts.input.empty()) throw UsageError("no input file given");
    const bool need_models = opts.predictions_input.empty() && !opts.oracle;
    const auto res = Resources::load(cfg, need_models);
    const auto& table = cfg.slot_table();
    Corpus input = load_corpus(opts.input, table);
    Corpus simplified = opts.oracle ? simplify_corpus(input, cfg.scheme) : input;

    std::vector<SentencePredictions> given;
    if (opts.oracle) {
      given = oracle_predictions(input);
    } else if (!opts.predictions_input.empty()) {
      auto in = open_in(opts.predictions_input, "predictions");
      given = read_predictions(in, simplified, opts.predictions_input.string());
    }

    std::ofstream text_file, tags_file, nbest_file, trace_pred, trace_nbest, trace_nbest_tags, trace_rules, trace_tags,
        trace_text;
    if (!opts.output.empty()) text_file = open_out(opts.output);
    std::ostream& text_out = opts.output.empty() ? out : text_file;
    if (!opts.tags_output.empty()) tags_file = open_out(opts.tags_output);
    if (!opts.nbest_output.empty()) nbest_file = open_out(opts.nbest_output);
    std::ofstream rules_file;
    if (!opts.rules_output.empty()) rules_file = open_out(opts.rules_output);
    const bool trace = !opts.trace_dir.empty();
    if (trace) {
      trace_pred = open_out(opts.trace_dir / "predictions.tsv");
      trace_nbest = open_out(opts.trace_dir / "nbest.txt");
      trace_nbest_tags = open_out(opts.trace_dir / "nbest.tags");
      trace_rules = open_out(opts.trace_dir / "rules.tsv");
      trace_tags = open_out(opts.trace_dir / "output.tagged");
      trace_text = open_out(opts.trace_dir / "output.txt");
    }

    const DecodeSettings settings{cfg.rescoring, cfg.k_best, effective_lambda(cfg)};
    GenerateSummary summary;
    std::vector<SentencePredictions> all_preds(simplified.size());
    for (std::size_t sid = 0; sid < simplified.size(); ++sid) {
      ++summary.sentences;
      const auto& s = simplified[sid];
      std::string line, tline;
      try {
        all_preds[sid] =
            given.empty() ? predict_sentence(res->gender ? &*res->gender : nullptr,
                                             res->number ? &*res->number : nullptr, s)
                          : given[sid];
        auto d = decode_sentence(s, all_preds[sid], res->lexicon, &res->lm, settings);
        line = present_sentence(d.tokens);
        tline = tags_line(d.tags);
        summary.lemma_fallbacks += d.lemma_fallbacks;
        for (const auto& a : d.rules.applied) ++summary.rule_counts[a.rule];
        for (std::size_t c = 0; c < d.candidates.size(); ++c) {
          const auto text = text::join(d.candidate_tokens[c], " ");
          if (!opts.nbest_output.empty()) nbest_file << format_nbest_line(sid, text, d.candidates[c]) << '\n';
          if (trace) {
            trace_nbest << format_nbest_line(sid, text, d.candidates[c]) << '\n';
            trace_nbest_tags << format_nbest_line(sid, tags_line(d.candidate_tags[c]), d.candidates[c]) << '\n';
          }
        }
        if (trace) write_rule_trace(trace_rules, sid, d.rules);
        if (!opts.rules_output.empty()) write_rule_trace(rules_file, sid, d.rules);
      } catch (const Error& e) {
        if (opts.fail_fast || dynamic_cast<const UsageError*>(&e)) throw;
        ++summary.failed;
        err << "sentence " << sid << ": " << e.what() << '\n';
        line.clear();
        tline.clear();
      }
      text_out << line << '\n';
      if (!opts.tags_output.empty()) tags_file << tline << '\n';
      if (trace) {
        trace_tags << tline << '\n';
        trace_text << line << '\n';
      }
    }
    if (trace) write_predictions(trace_pred, all_preds);
    text_out.flush();
    return summary;
  });
}

// ---- evaluation ----

void score_tags(EvaluationReport& report, const Corpus& hypothesis, const Corpus& reference,
                const std::vector<std::vector<Sentence>>* nbest) {
  if (hypothesis.size() != reference.size()) {
    throw DataError("hypothesis has " + std::to_string(hypothesis.size()) + " sentences, reference " +
                    std::to_string(reference.size()));
  }
  if (nbest) {
    report.oracle_gender.emplace();
    report.oracle_number.emplace();
  }
  for (std::size_t sid = 0; sid < reference.size(); ++sid) {
    const auto& ref = reference[sid];
    const auto& hyp = hypothesis[sid];
    const bool failed = hyp.empty() && !ref.empty();
    if (!failed && hyp.size() != ref.size()) {
      throw DataError("sentence " + std::to_string(sid) + ": hypothesis has " + std::to_string(hyp.size()) +
                      " tokens, reference " + std::to_string(ref.size()));
    }
    for (std::size_t i = 0; !failed && i < ref.size(); ++i) {
      if (hyp[i].lemma != ref[i].lemma) {
        throw DataError("sentence " + std::to_string(sid) + ", token " + std::to_string(i) + ": lemma '" +
                        hyp[i].lemma + "' differs from reference '" + ref[i].lemma + "'");
      }
    }
    for (Task task : {Task::Gender, Task::Number}) {
      auto& score = task == Task::Gender ? report.gender : report.number;
      for (std::size_t i = 0; i < ref.size(); ++i) {
        if (!needs_classification(ref[i].tag, task)) continue;
        const int gold = extract_label(ref[i], task).index;
        ++score.total;
        if (failed || !hyp[i].tag.slot(task)) continue;
        const char v = *hyp[i].tag.slot_value(task);
        if (v == kGenderPlaceholder && task == Task::Gender) continue;
        const int pred = extract_label(hyp[i], task).index;
        ++score.confusion[static_cast<std::size_t>(gold)][static_cast<std::size_t>(pred)];
        if (pred == gold) ++score.correct;
      }
      if (!nbest) continue;
      auto& oracle = task == Task::Gender ? *report.oracle_gender : *report.oracle_number;
      std::vector<const Sentence*> options;
      if (sid < nbest->size()) {
        for (const auto& c : (*nbest)[sid]) options.push_back(&c);
      }
      if (!failed) options.push_back(&hyp);
      std::size_t best = 0, total = 0;
      for (const auto* cand : options) {
        if (cand->size() != ref.size()) throw DataError("n-best candidate for sentence " + std::to_string(sid) +
                                                        " has the wrong length");
        std::size_t correct = 0;
        total = 0;
        for (std::size_t i = 0; i < ref.size(); ++i) {
          if (!needs_classification(ref[i].tag, task)) continue;
          ++total;
          if ((*cand)[i].tag.slot_value(task) == kGenderPlaceholder && task == Task::Gender) continue;
          if (extract_label((*cand)[i], task).index == extract_label(ref[i], task).index) ++correct;
        }
        best = std::max(best, correct);
      }
      if (options.empty()) {
        for (const auto& t : ref) total += needs_classification(t.tag, task) ? 1 : 0;
      }
      oracle.total += total;
      oracle.correct += best;
    }
  }
}

void score_text(EvaluationReport& report, const std::vector<std::vector<std::string>>& hypothesis,
                const std::vector<std::vector<std::string>>& reference) {
  if (hypothesis.size() != reference.size()) {
    throw DataError("hypothesis text has " + std::to_string(hypothesis.size()) + " lines, reference " +
                    std::to_string(reference.size()));
  }
  for (std::size_t sid = 0; sid < reference.size(); ++sid) {
    const auto& ref = reference[sid];
    const auto& hyp = hypothesis[sid];
    report.tokens += ref.size();
    if (hyp.empty()) continue;  // failed sentence
    if (hyp.size() != ref.size()) {
      throw DataError("sentence " + std::to_string(sid) + ": hypothesis text has " + std::to_string(hyp.size()) +
                      " tokens, reference " + std::to_string(ref.size()));
    }
    for (std::size_t i = 0; i < ref.size(); ++i) {
      if (text::lowercase(hyp[i]) == text::lowercase(ref[i])) ++report.recovered;
    }
  }
}

std::vector<std::vector<Sentence>> read_nbest_tags(const fs::path& path, std::size_t sentences,
                                                   const SlotTable& table) {
  auto in = open_in(path, "n-best tags");
  std::vector<std::vector<Sentence>> out(sentences);
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (text::trim(line).empty()) continue;
    const auto a = line.find(" ||| ");
    const auto b = a == std::string::npos ? a : line.find(" ||| ", a + 5);
    if (b == std::string::npos) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected `id ||| tags ||| scores`");
    }
    const auto sid = static_cast<std::size_t>(text::parse_double(line.substr(0, a)));
    if (sid >= sentences) throw ParseError(path.string() + ":" + std::to_string(lineno) + ": sentence id out of range");
    Sentence s;
    for (const auto& tok : text::split_whitespace(line.substr(a + 5, b - a - 5))) {
      s.push_back(parse_tagged_token(tok, table));
    }
    out[sid].push_back(std::move(s));
  }
  return out;
}

EvaluationReport cmd_evaluate(const PipelineConfig& cfg, const EvaluateOptions& opts) {
  return staged("evaluate", [&] {
    EvaluationReport report;
    const auto& table = cfg.slot_table();
    if (opts.hypothesis_tags.empty() != opts.reference_tags.empty()) {
      throw UsageError("--hypothesis-tags and --reference-tags go together");
    }
    if (!opts.hypothesis_tags.empty()) {
      const Corpus hyp = load_corpus(opts.hypothesis_tags, table);
      const Corpus ref = load_corpus(opts.reference_tags, table);
      std::vector<std::vector<Sentence>> nbest;
      if (!opts.nbest_tags.empty()) nbest = read_nbest_tags(opts.nbest_tags, ref.size(), table);
      score_tags(report, hyp, ref, opts.nbest_tags.empty() ? nullptr : &nbest);
    }
    if (opts.hypothesis_text.empty() != opts.reference_text.empty()) {
      throw UsageError("--hypothesis-text and --reference-text go together");
    }
    if (!opts.hypothesis_text.empty()) {
      score_text(report, read_token_lines(opts.hypothesis_text), read_token_lines(opts.reference_text));
    }
    if (!opts.rules_trace.empty()) {
      auto in = open_in(opts.rules_trace, "rule trace");
      std::string line;
      while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string sid, tid, rule;
        if (std::getline(fields, sid, '\t') && std::getline(fields, tid, '\t') && std::getline(fields, rule, '\t')) {
          ++report.rule_counts[rule];
        }
      }
    }
    return report;
  });
}

void EvaluationReport::write(std::ostream& out) const {
  auto task_block = [&](std::string_view name, const TaskScore& s, const char* letters) {
    out << name << "_accuracy\t" << text::format_double(s.accuracy()) << "\t(" << s.correct << "/" << s.total
        << ")\n";
    out << name << "_confusion\tgold\\pred";
    for (int c = 0; c < 3; ++c) out << '\t' << letters[c];
    out << '\n';
    for (int g = 0; g < 3; ++g) {
      out << name << "_confusion\t" << letters[g];
      for (int p = 0; p < 3; ++p) out << '\t' << s.confusion[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)];
      out << '\n';
    }
  };
  if (gender.total || number.total) {
    task_block("gender", gender, "MFN");
    task_block("number", number, "SPN");
  }
  if (oracle_gender) {
    out << "oracle_gender_accuracy\t" << text::format_double(oracle_gender->accuracy()) << '\n';
    out << "oracle_number_accuracy\t" << text::format_double(oracle_number->accuracy()) << '\n';
  }
  if (tokens) {
    out << "token_recovery\t" << text::format_double(recovery()) << "\t(" << recovered << "/" << tokens << ")\n";
  }
  for (const auto& [rule, n] : rule_counts) out << "rule\t" << rule << '\t' << n << '\n';
}

// ---- lambda tuning ----

double effective_lambda(const PipelineConfig& cfg) {
  if (!cfg.lambda_from_tuning) return cfg.lambda;
  auto in = open_in(cfg.tuned_lambda_path(), "tuned lambda (run tune-lambda first)");
  std::string line;
  std::getline(in, line);
  const double v = text::parse_double(line);
  if (!std::isfinite(v)) throw DataError(cfg.tuned_lambda_path().string() + ": lambda is not finite");
  return v;
}

double cmd_tune_lambda(const PipelineConfig& cfg, std::ostream& log, std::vector<LambdaPoint>* curve) {
  return staged("tune-lambda", [&] {
    const auto res = Resources::load(cfg, true);
    const auto& table = cfg.slot_table();
    const Corpus reference = load_corpus(cfg.corpus_path("dev", "tagged"), table);
    const Corpus simplified = simplify_corpus(reference, cfg.scheme);
    const auto preds = predict_corpus(*res, simplified);
    double best_lambda = cfg.lambda_grid.front();
    double best_acc = -1;
    for (double lambda : cfg.lambda_grid) {
      const DecodeSettings settings{cfg.rescoring, cfg.k_best, lambda};
      Corpus hyp;
      for (std::size_t i = 0; i < simplified.size(); ++i) {
        hyp.push_back(decode_sentence(simplified[i], preds[i], res->lexicon, &res->lm, settings).tags);
      }
      EvaluationReport r;
      score_tags(r, hyp, reference);
      log << "tune-lambda: lambda " << text::format_double(lambda) << "\tnumber "
          << text::format_double(r.number.accuracy()) << "\tgender " << text::format_double(r.gender.accuracy())
          << '\n';
      if (curve) curve->push_back({lambda, r.number.accuracy(), r.gender.accuracy()});
      if (r.number.accuracy() > best_acc) {
        best_acc = r.number.accuracy();
        best_lambda = lambda;
      }
    }
    auto out = open_out(cfg.tuned_lambda_path());
    out << text::format_double(best_lambda) << '\n';
    log << "tune-lambda: best lambda " << text::format_double(best_lambda) << '\n';
    return best_lambda;
  });
}

}  // namespace morphgen
