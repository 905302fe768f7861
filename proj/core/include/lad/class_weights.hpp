#pragma once

#include <vector>

#include "lad/tensor.hpp"

namespace lad {

/// Per-class weight values: the most frequent class gets weight exactly 1
/// and every other nonempty class gets (modal count / own count) >= 1, so
/// all classes carry the same total weight. Classes with zero count get
/// weight 0 (no instance ever looks them up) and are listed in
/// empty_classes as a diagnostic.
struct ClassWeightTable {
  std::vector<double> weights;     // length K
  std::vector<int> empty_classes;  // classes with zero count

  int num_classes() const { return static_cast<int>(weights.size()); }
  double weight_for(int label) const { return weights[static_cast<std::size_t>(label)]; }
};

/// Source weights w_S from true labels: w(y) = max_y' c(y') / c(y).
ClassWeightTable source_class_weights(const std::vector<int>& labels, int num_classes);

/// Target weights w_T: the same formula over pseudo-label counts.
ClassWeightTable target_class_weights(const std::vector<int>& pseudo_labels, int num_classes);

/// Per-row argmax; ties break toward the lowest class index.
template <class S>
std::vector<int> pseudo_labels(const Tensor2T<S>& probs) {
  std::vector<int> out(static_cast<std::size_t>(probs.rows()));
  for (Index i = 0; i < probs.rows(); ++i) {
    int best = 0;
    S best_p = probs(i, 0);
    for (Index j = 1; j < probs.cols(); ++j) {
      if (probs(i, j) > best_p) {
        best_p = probs(i, j);
        best = static_cast<int>(j);
      }
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

}  // namespace lad
