#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lad/tensor.hpp"

namespace lad {

/// A set of pre-extracted feature vectors with optional class labels.
/// Labels are absent for target domains; num_classes 0 means unknown
/// (inferred from the source at training time).
struct FeatureDataset {
  Tensor2 features;              // n x d
  std::vector<int> labels;       // empty when unlabeled; else in [0, K)
  int num_classes = 0;           // 0 = unknown
  std::vector<std::string> ids;  // per-row identifiers
  std::string name;

  Index size() const { return features.rows(); }
  Index dim() const { return features.cols(); }
  bool labeled() const { return !labels.empty(); }
};

/// Loads the documented CSV format:
///   # num_classes=K            (optional comment line before the header)
///   id,label,f0,...,f{d-1}     (or id,f0,... for unlabeled data)
/// UTF-8, LF line endings, '.' decimal separator. Malformed rows raise
/// DataError with the line number; NaN/Inf features raise DataError.
FeatureDataset load_features(const std::filesystem::path& path);

/// Writes the same format; floats carry 17 significant digits so a
/// save/load round-trip reproduces 64-bit values exactly. Datasets without
/// ids get the row index as id.
void save_features(const FeatureDataset& dataset, const std::filesystem::path& path);

}  // namespace lad
