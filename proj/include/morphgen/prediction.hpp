#pragma once

#include <array>
#include <cstddef>
#include <optional>

namespace morphgen {

// Class probabilities in class-index order (M/F/N or S/P/N).
struct ProbDist {
  std::array<double, 3> probs{};

  // Lowest index wins ties.
  int argmax() const {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (probs[static_cast<std::size_t>(i)] > probs[static_cast<std::size_t>(best)]) best = i;
    }
    return best;
  }
  double operator[](int i) const { return probs[static_cast<std::size_t>(i)]; }
  friend bool operator==(const ProbDist&, const ProbDist&) = default;
};

// Classifier output for one token; a task is empty when the token has no
// slot for it.
struct TokenPrediction {
  std::optional<ProbDist> gender;
  std::optional<ProbDist> number;
};

}  // namespace morphgen
