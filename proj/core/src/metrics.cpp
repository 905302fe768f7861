#include "lad/metrics.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace lad {

double accuracy(const std::vector<int>& predictions, const std::vector<int>& truth) {
  if (predictions.size() != truth.size()) {
    throw std::invalid_argument("accuracy: length mismatch, " +
                                std::to_string(predictions.size()) + " vs " +
                                std::to_string(truth.size()));
  }
  if (predictions.empty()) throw std::invalid_argument("accuracy: empty input");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) correct += predictions[i] == truth[i];
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

std::vector<double> per_class_accuracy(const std::vector<int>& predictions,
                                       const std::vector<int>& truth, int num_classes) {
  if (predictions.size() != truth.size()) {
    throw std::invalid_argument("per_class_accuracy: length mismatch");
  }
  if (num_classes < 1) throw std::invalid_argument("per_class_accuracy: num_classes must be >= 1");
  std::vector<std::size_t> total(static_cast<std::size_t>(num_classes), 0);
  std::vector<std::size_t> correct(static_cast<std::size_t>(num_classes), 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int y = truth[i];
    if (y < 0 || y >= num_classes) {
      throw std::invalid_argument("per_class_accuracy: label " + std::to_string(y) +
                                  " out of range");
    }
    ++total[static_cast<std::size_t>(y)];
    correct[static_cast<std::size_t>(y)] += predictions[i] == y;
  }
  std::vector<double> out(static_cast<std::size_t>(num_classes));
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = total[c] == 0 ? std::numeric_limits<double>::quiet_NaN()
                           : static_cast<double>(correct[c]) / static_cast<double>(total[c]);
  }
  return out;
}

}  // namespace lad
