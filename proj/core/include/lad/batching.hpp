#pragma once

#include <vector>

#include "lad/dataset.hpp"
#include "lad/rng.hpp"
#include "lad/tensor.hpp"

namespace lad {

/// Epoch-shuffled minibatch index stream over n rows.
///
/// Non-cycling: one shuffled permutation, sliced into non-overlapping
/// batches that cover every row exactly once; the final batch may be
/// smaller. Cycling: an endless concatenation of fresh permutations,
/// sliced into batches that are always full size (a batch may span the
/// boundary between two permutations).
class BatchStream {
 public:
  BatchStream(Index n, Index batch_size, Rng& rng, bool cycling);

  /// Row indices of the next batch; empty once a non-cycling stream is
  /// exhausted.
  std::vector<Index> next();

 private:
  void reshuffle();

  Index n_;
  Index batch_size_;
  Rng& rng_;
  bool cycling_;
  std::vector<Index> perm_;
  std::size_t pos_ = 0;
};

inline BatchStream batches(const FeatureDataset& dataset, Index batch_size, Rng& rng,
                           bool cycling) {
  return BatchStream(dataset.size(), batch_size, rng, cycling);
}

}  // namespace lad
