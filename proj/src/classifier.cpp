#include "morphgen/classifier.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>

#include "morphgen/random.hpp"
#include "morphgen/text.hpp"

namespace morphgen {

void Hyperparameters::validate() const {
  auto fail = [](const std::string& what) { throw UsageError("invalid hyperparameters: " + what); };
  if (window_length == 0 || window_length % 2 == 0) fail("window_length must be odd");
  if (conv_filter_size == 0 || conv_filter_size % 2 == 0) fail("conv_filter_size must be odd");
  if (conv_filter_size > window_length) fail("conv_filter_size exceeds window_length");
  if (vocab_size < 2) fail("vocab_size must cover <pad> and <unk>");
  if (embedding_dim == 0 || conv_filters == 0 || lstm_units == 0) fail("dimensions must be positive");
  if (classes != 3) fail("classes must be 3");
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) fail("learning_rate must be positive");
  if (batch_size == 0) fail("batch_size must be positive");
}

Hyperparameters default_hyperparameters(Task task) {
  Hyperparameters hp;
  if (task == Task::Number) {
    hp.window_length = 9;
    hp.conv_filter_size = 7;
    hp.vocab_size = 7000 + 2;
  } else {
    hp.window_length = 7;
    hp.conv_filter_size = 5;
    hp.vocab_size = 9000 + 2;
  }
  hp.embedding_dim = 128;
  hp.conv_filters = 128;
  hp.lstm_units = 70;
  return hp;
}

namespace {

using Tensor = std::vector<float> Parameters<float>::*;
constexpr std::array<Tensor, 8> kTensors = {
    &Parameters<float>::embedding,      &Parameters<float>::conv_kernel, &Parameters<float>::conv_bias,
    &Parameters<float>::lstm_input,     &Parameters<float>::lstm_recurrent,
    &Parameters<float>::lstm_bias,      &Parameters<float>::dense_weight, &Parameters<float>::dense_bias,
};

// Adam with bias correction. Embedding rows keep their own step counter so a
// row untouched by a batch is neither moved nor decayed (lazy update).
struct AdamState {
  static constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  std::array<std::vector<float>, 8> m, v;
  std::vector<std::uint32_t> row_steps;
  std::uint64_t steps = 0;

  void init(const Parameters<float>& p) {
    for (std::size_t t = 0; t < kTensors.size(); ++t) {
      m[t].assign((p.*kTensors[t]).size(), 0.0f);
      v[t].assign((p.*kTensors[t]).size(), 0.0f);
    }
  }

  static void update(float* p, const float* g, float* m, float* v, std::size_t n, double inv_n, double lr,
                     double step) {
    const float b1 = static_cast<float>(kBeta1), b2 = static_cast<float>(kBeta2);
    const float a = static_cast<float>(lr * std::sqrt(1 - std::pow(kBeta2, step)) / (1 - std::pow(kBeta1, step)));
    const float s = static_cast<float>(inv_n), eps = static_cast<float>(kEps);
    for (std::size_t i = 0; i < n; ++i) {
      const float gi = g[i] * s;
      m[i] = b1 * m[i] + (1 - b1) * gi;
      v[i] = b2 * v[i] + (1 - b2) * gi * gi;
      p[i] -= a * m[i] / (std::sqrt(v[i]) + eps);
    }
  }

  void step(Parameters<float>& p, const Gradients<float>& g, double inv_n, double lr, std::size_t d) {
    ++steps;
    for (std::size_t t = 1; t < kTensors.size(); ++t) {
      auto& w = p.*kTensors[t];
      update(w.data(), (g.d.*kTensors[t]).data(), m[t].data(), v[t].data(), w.size(), inv_n, lr,
             static_cast<double>(steps));
    }
    if (row_steps.empty()) row_steps.assign(p.embedding.size() / d, 0);
    for (auto row : g.touched_rows) {
      const std::size_t off = static_cast<std::size_t>(row) * d;
      update(p.embedding.data() + off, g.d.embedding.data() + off, m[0].data() + off, v[0].data() + off, d, inv_n,
             lr, static_cast<double>(++row_steps[row]));
    }
  }
};

}  // namespace

Model init_model(Task task, const Hyperparameters& hyper, std::uint64_t vocab_hash) {
  hyper.validate();
  Model m;
  m.task = task;
  m.hyper = hyper;
  m.vocab_hash = vocab_hash;
  m.params = Parameters<float>::zeros(hyper);
  Rng rng(hyper.rng_seed);
  for (auto* w : {&m.params.embedding, &m.params.conv_kernel, &m.params.lstm_input, &m.params.lstm_recurrent,
                  &m.params.dense_weight}) {
    for (auto& v : *w) v = static_cast<float>(rng.uniform(-0.08, 0.08));
  }
  const std::size_t h = hyper.lstm_units;
  std::fill_n(m.params.lstm_bias.begin() + static_cast<std::ptrdiff_t>(h), h, 1.0f);
  return m;
}

ProbDist forward(const Model& model, const Window& window) {
  Activations<float> act;
  forward_pass(model.params, model.hyper, window.indices, act);
  return ProbDist{act.probs};
}

Gradients<float> backward(const Model& model, const Window& window, const ClassLabel& gold) {
  Activations<float> act;
  forward_pass(model.params, model.hyper, window.indices, act);
  Gradients<float> grads(model.hyper);
  BackwardWorkspace<float> ws;
  backward_pass(model.params, model.hyper, window.indices, act, gold.index, grads, ws);
  return grads;
}

double accuracy(const Model& model, std::span<const LabeledExample> examples) {
  if (examples.empty()) return std::numeric_limits<double>::quiet_NaN();
  Activations<float> act;
  std::size_t correct = 0;
  for (const auto& ex : examples) {
    forward_pass(model.params, model.hyper, ex.window.indices, act);
    if (ProbDist{act.probs}.argmax() == ex.label.index) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

TrainResult train(std::span<const LabeledExample> train_set, std::span<const LabeledExample> heldout, Task task,
                  const Hyperparameters& hyper, std::uint64_t vocab_hash, std::ostream* log,
                  std::span<const LabeledExample> selection) {
  hyper.validate();
  if (hyper.epochs < 1) throw UsageError("epochs must be at least 1");
  if (train_set.empty()) throw DataError("empty training set");
  for (auto set : {train_set, heldout, selection}) {
    for (const auto& ex : set) {
      if (ex.label.task != task) throw DataError("example label does not match task " + std::string(to_string(task)));
      if (ex.window.length() != hyper.window_length) throw DataError("example window length mismatch");
    }
  }

  TrainResult result{init_model(task, hyper, vocab_hash), {}};
  Model& m = result.model;
  Rng shuffle_rng(hyper.rng_seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  Gradients<float> grads(hyper);
  Activations<float> act;
  BackwardWorkspace<float> ws;
  const std::size_t d = hyper.embedding_dim;
  const auto& k = kernels::active();
  AdamState adam;
  if (hyper.optimizer == Optimizer::Adam) adam.init(m.params);

  Parameters<float> best;
  double best_accuracy = 0;
  for (std::size_t epoch = 1; epoch <= hyper.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0;
    std::size_t correct = 0;
    for (std::size_t start = 0, batch = 0; start < order.size(); start += hyper.batch_size, ++batch) {
      const std::size_t end = std::min(order.size(), start + hyper.batch_size);
      grads.reset(d);
      double batch_loss = 0;
      for (std::size_t i = start; i < end; ++i) {
        const auto& ex = train_set[order[i]];
        try {
          forward_pass(m.params, hyper, ex.window.indices, act);
          batch_loss += loss_of(act, ex.label.index);
          if (ProbDist{act.probs}.argmax() == ex.label.index) ++correct;
          backward_pass(m.params, hyper, ex.window.indices, act, ex.label.index, grads, ws);
        } catch (const NumericalError& e) {
          throw NumericalError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                               std::to_string(batch) + ": " + e.what());
        }
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericalError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batch) + ": non-finite loss");
      }
      loss_sum += batch_loss;

      const double inv_n = 1.0 / static_cast<double>(end - start);
      if (hyper.optimizer == Optimizer::Adam) {
        adam.step(m.params, grads, inv_n, hyper.learning_rate, d);
        continue;
      }
      const float scale = -static_cast<float>(hyper.learning_rate * inv_n);
      for (std::size_t t = 1; t < kTensors.size(); ++t) {
        auto& p = m.params.*kTensors[t];
        k.axpy(scale, (grads.d.*kTensors[t]).data(), p.data(), p.size());
      }
      for (auto row : grads.touched_rows) {
        const std::size_t off = static_cast<std::size_t>(row) * d;
        k.axpy(scale, grads.d.embedding.data() + off, m.params.embedding.data() + off, d);
      }
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = loss_sum / static_cast<double>(order.size());
    stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
    stats.heldout_accuracy = accuracy(m, heldout);
    stats.selection_accuracy = accuracy(m, selection);
    result.epochs.push_back(stats);
    if (selection.empty() || result.best_epoch == 0 || stats.selection_accuracy > best_accuracy) {
      best_accuracy = stats.selection_accuracy;
      result.best_epoch = epoch;
      if (!selection.empty()) best = m.params;
    }
    if (log) {
      *log << epoch << '\t' << text::format_double(stats.loss) << '\t' << text::format_double(stats.train_accuracy)
           << '\t' << text::format_double(stats.heldout_accuracy) << '\n'
           << std::flush;
    }
  }
  if (!selection.empty()) m.params = std::move(best);
  return result;
}

// ---- serialization ----

namespace {

constexpr char kMagic[8] = {'M', 'O', 'R', 'P', 'H', 'G', 'E', 'N'};
constexpr std::uint32_t kVersion = 2;

template <typename U>
void put_le(std::ostream& out, U value) {
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <typename U>
U get_le(std::istream& in, std::string_view source) {
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U))) {
    throw ParseError(std::string(source) + ": truncated model file");
  }
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace

void save_model(std::ostream& out, const Model& model) {
  out.write(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint8_t>(out, model.task == Task::Gender ? 0 : 1);
  const auto& hp = model.hyper;
  for (std::size_t v : {hp.window_length, hp.vocab_size, hp.embedding_dim, hp.conv_filter_size, hp.conv_filters,
                        hp.lstm_units, hp.classes, hp.epochs, hp.batch_size}) {
    put_le<std::uint64_t>(out, v);
  }
  put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(hp.learning_rate));
  put_le<std::uint64_t>(out, hp.rng_seed);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(hp.optimizer));
  put_le<std::uint64_t>(out, model.vocab_hash);
  for (auto t : kTensors) {
    const auto& v = model.params.*t;
    put_le<std::uint64_t>(out, v.size());
    for (float f : v) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
  }
  if (!out) throw DataError("failed to write model");
}

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  save_model(out, model);
}

Model load_model(std::istream& in, std::string_view source) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw ParseError(std::string(source) + ": not a morphgen model file");
  }
  const auto version = get_le<std::uint32_t>(in, source);
  if (version != kVersion) {
    throw ParseError(std::string(source) + ": unsupported model version " + std::to_string(version));
  }
  Model m;
  const auto task = get_le<std::uint8_t>(in, source);
  if (task > 1) throw ParseError(std::string(source) + ": bad task field");
  m.task = task == 0 ? Task::Gender : Task::Number;
  auto& hp = m.hyper;
  for (std::size_t* v : {&hp.window_length, &hp.vocab_size, &hp.embedding_dim, &hp.conv_filter_size,
                         &hp.conv_filters, &hp.lstm_units, &hp.classes, &hp.epochs, &hp.batch_size}) {
    *v = static_cast<std::size_t>(get_le<std::uint64_t>(in, source));
  }
  hp.learning_rate = std::bit_cast<double>(get_le<std::uint64_t>(in, source));
  hp.rng_seed = get_le<std::uint64_t>(in, source);
  const auto opt = get_le<std::uint8_t>(in, source);
  if (opt > 1) throw ParseError(std::string(source) + ": bad optimizer field");
  hp.optimizer = static_cast<Optimizer>(opt);
  m.vocab_hash = get_le<std::uint64_t>(in, source);
  try {
    hp.validate();
  } catch (const UsageError& e) {
    throw ParseError(std::string(source) + ": " + e.what());
  }
  m.params = Parameters<float>::zeros(hp);
  for (auto t : kTensors) {
    auto& v = m.params.*t;
    const auto n = get_le<std::uint64_t>(in, source);
    if (n != v.size()) throw ParseError(std::string(source) + ": tensor size does not match hyperparameters");
    for (auto& f : v) {
      f = std::bit_cast<float>(get_le<std::uint32_t>(in, source));
      if (!std::isfinite(f)) throw ParseError(std::string(source) + ": non-finite parameter");
    }
  }
  return m;
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model " + path.string());
  return load_model(in, path.string());
}

// ---- inference ----

TaskClassifier::TaskClassifier(Model model, const Vocabulary& vocab) : model_(std::move(model)), vocab_(&vocab) {
  if (model_.vocab_hash != vocab.hash()) {
    throw DataError(std::string(to_string(model_.task)) + " model was trained with a different vocabulary");
  }
  if (model_.hyper.vocab_size != vocab.size()) {
    throw DataError(std::string(to_string(model_.task)) + " model vocabulary size differs from the vocabulary file");
  }
}

ProbDist TaskClassifier::classify(const Sentence& simplified, std::size_t position) const {
  return forward(model_, extract_window(simplified, position, model_.hyper.window_length, *vocab_));
}

std::vector<TokenPrediction> predict_sentence(const TaskClassifier* gender, const TaskClassifier* number,
                                              const Sentence& simplified) {
  if (gender && gender->task() != Task::Gender) throw UsageError("gender slot given a number model");
  if (number && number->task() != Task::Number) throw UsageError("number slot given a gender model");
  std::vector<TokenPrediction> out(simplified.size());
  for (std::size_t i = 0; i < simplified.size(); ++i) {
    const auto& tag = simplified[i].tag;
    if (gender && needs_classification(tag, Task::Gender)) out[i].gender = gender->classify(simplified, i);
    if (number && needs_classification(tag, Task::Number)) out[i].number = number->classify(simplified, i);
  }
  return out;
}

}  // namespace morphgen
