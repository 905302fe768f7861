#pragma once

#include <vector>

namespace lad {

/// Fraction of matching entries; throws on empty or mismatched lengths.
double accuracy(const std::vector<int>& predictions, const std::vector<int>& truth);

/// Per-class accuracy from confusion counts. Classes with no truth
/// instances get NaN.
std::vector<double> per_class_accuracy(const std::vector<int>& predictions,
                                       const std::vector<int>& truth, int num_classes);

}  // namespace lad
