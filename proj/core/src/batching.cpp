#include "lad/batching.hpp"

#include <numeric>
#include <stdexcept>

namespace lad {

BatchStream::BatchStream(Index n, Index batch_size, Rng& rng, bool cycling)
    : n_(n), batch_size_(batch_size), rng_(rng), cycling_(cycling) {
  if (batch_size < 1) throw std::invalid_argument("BatchStream: batch_size must be >= 1");
  if (n < 0 || (cycling && n == 0)) {
    throw std::invalid_argument("BatchStream: cannot cycle over an empty dataset");
  }
  perm_.resize(static_cast<std::size_t>(n));
  std::iota(perm_.begin(), perm_.end(), Index(0));
  reshuffle();
}

void BatchStream::reshuffle() {
  rng_.shuffle(perm_);
  pos_ = 0;
}

std::vector<Index> BatchStream::next() {
  std::vector<Index> batch;
  if (pos_ >= perm_.size() && !cycling_) return batch;
  batch.reserve(static_cast<std::size_t>(batch_size_));
  while (static_cast<Index>(batch.size()) < batch_size_) {
    if (pos_ >= perm_.size()) {
      if (!cycling_) break;  // partial final batch
      reshuffle();
    }
    batch.push_back(perm_[pos_++]);
  }
  return batch;
}

}  // namespace lad
