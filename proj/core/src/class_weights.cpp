#include "lad/class_weights.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "lad/log.hpp"

namespace lad {
namespace {

ClassWeightTable weights_from_counts(const std::vector<Index>& counts, const char* who) {
  const Index max_count = *std::max_element(counts.begin(), counts.end());
  if (max_count == 0) throw std::invalid_argument(std::string(who) + ": empty label list");
  ClassWeightTable table;
  table.weights.resize(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) {
      // Unused for existing instances; weight 0 instead of a division by
      // zero so a collapsed classifier cannot crash the next epoch.
      table.weights[k] = 0.0;
      table.empty_classes.push_back(static_cast<int>(k));
    } else {
      table.weights[k] = static_cast<double>(max_count) / static_cast<double>(counts[k]);
    }
  }
  if (!table.empty_classes.empty()) {
    std::string msg = std::string(who) + ": no instances for class";
    for (int k : table.empty_classes) msg += " " + std::to_string(k);
    log::warn(msg);
  }
  return table;
}

std::vector<Index> count_labels(const std::vector<int>& labels, int num_classes,
                                const char* who) {
  if (num_classes < 1) throw std::invalid_argument(std::string(who) + ": num_classes must be >= 1");
  if (labels.empty()) throw std::invalid_argument(std::string(who) + ": empty label list");
  std::vector<Index> counts(static_cast<std::size_t>(num_classes), 0);
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw std::invalid_argument(std::string(who) + ": label " + std::to_string(y) +
                                  " out of range [0, " + std::to_string(num_classes) + ")");
    }
    ++counts[static_cast<std::size_t>(y)];
  }
  return counts;
}

}  // namespace

ClassWeightTable source_class_weights(const std::vector<int>& labels, int num_classes) {
  return weights_from_counts(count_labels(labels, num_classes, "source_class_weights"),
                             "source_class_weights");
}

ClassWeightTable target_class_weights(const std::vector<int>& pseudo_labels, int num_classes) {
  return weights_from_counts(count_labels(pseudo_labels, num_classes, "target_class_weights"),
                             "target_class_weights");
}

}  // namespace lad
