#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rpnb {

// A classification decision: the winning class index plus the raw per-class
// scores it was derived from (combined log-posteriors, vote counts, or
// linear scores depending on the model).
struct Prediction {
  int label = 0;
  std::vector<double> scores;
};

// Index of the largest value; ties go to the smallest index.
inline int argmax_smallest_index(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return static_cast<int>(best);
}

}  // namespace rpnb
