#pragma once

// Central finite-difference check of backward_pass on double-precision
// models. Shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "morphgen/network.hpp"
#include "morphgen/random.hpp"

namespace morphgen::testing {

struct GradCheckResult {
  double max_rel_error = 0;
  std::string worst;  // tensor[index] of the worst component
  std::size_t components = 0;
};

inline Parameters<double> random_parameters(const Hyperparameters& hp, Rng& rng, double scale) {
  auto p = Parameters<double>::zeros(hp);
  p.for_each([&](const char*, std::vector<double>& v) {
    for (auto& x : v) x = rng.uniform(-scale, scale);
  });
  return p;
}

inline double loss_at(const Parameters<double>& p, const Hyperparameters& hp, const std::vector<std::int32_t>& w,
                      int gold) {
  Activations<double> act;
  forward_pass(p, hp, w, act);
  return loss_of(act, gold);
}

// |a - n| / max(|a|, |n|); pairs where both sides are below `floor` in
// magnitude count as exact (relative error is meaningless at round-off level).
inline double relative_error(double a, double n, double floor = 1e-8) {
  const double scale = std::max(std::abs(a), std::abs(n));
  if (scale < floor) return 0;
  return std::abs(a - n) / scale;
}

inline GradCheckResult gradient_check(Parameters<double> p, const Hyperparameters& hp,
                                      const std::vector<std::int32_t>& window, int gold, double eps = 1e-4) {
  Activations<double> act;
  forward_pass(p, hp, window, act);
  Gradients<double> g(hp);
  BackwardWorkspace<double> ws;
  backward_pass(p, hp, window, act, gold, g, ws);

  GradCheckResult r;
  std::vector<std::vector<double>*> params, grads;
  std::vector<std::string> names;
  p.for_each([&](const char* name, std::vector<double>& v) {
    params.push_back(&v);
    names.emplace_back(name);
  });
  g.d.for_each([&](const char*, std::vector<double>& v) { grads.push_back(&v); });
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto& v = *params[t];
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double saved = v[i];
      v[i] = saved + eps;
      const double up = loss_at(p, hp, window, gold);
      v[i] = saved - eps;
      const double down = loss_at(p, hp, window, gold);
      v[i] = saved;
      const double numeric = (up - down) / (2 * eps);
      const double err = relative_error((*grads[t])[i], numeric);
      ++r.components;
      if (err > r.max_rel_error) {
        r.max_rel_error = err;
        r.worst = names[t] + "[" + std::to_string(i) + "]";
      }
    }
  }
  return r;
}

// A tiny random model and window in the shape range of the acceptance check.
struct TinyCase {
  Hyperparameters hp;
  Parameters<double> params;
  std::vector<std::int32_t> window;
  int gold = 0;
};

inline TinyCase tiny_case(std::uint64_t seed) {
  Rng rng(seed);
  TinyCase c;
  c.hp.window_length = 3 + 2 * rng.below(2);        // 3 or 5
  c.hp.embedding_dim = 2 + rng.below(3);            // 2..4
  c.hp.conv_filter_size = c.hp.window_length == 3 ? 3 : 3 + 2 * rng.below(2);
  c.hp.conv_filters = 1 + rng.below(2);             // 1..2
  c.hp.lstm_units = 2 + rng.below(3);               // 2..4
  c.hp.vocab_size = 6;
  c.params = random_parameters(c.hp, rng, 0.6);
  for (std::size_t i = 0; i < c.hp.window_length; ++i) c.window.push_back(static_cast<std::int32_t>(rng.below(6)));
  c.gold = static_cast<int>(rng.below(3));
  return c;
}

}  // namespace morphgen::testing
