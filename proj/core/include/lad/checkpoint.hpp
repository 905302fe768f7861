#pragma once

#include <filesystem>

#include "lad/dataset.hpp"
#include "lad/trainer.hpp"

namespace lad {

/// Header of a training checkpoint: a versioned binary dump of layer
/// shapes, parameters, optimizer velocities, RNG stream states, the
/// per-instance target weights, recorded history and the epoch counter --
/// everything needed to resume bit-exactly. Written little-endian.
struct CheckpointInfo {
  int version = 0;
  bool real32 = false;
  bool baseline_mode = false;
  int epoch_done = 0;
  TrainConfig config;
};

CheckpointInfo read_checkpoint_info(const std::filesystem::path& path);

/// Continues a checkpointed run against the same datasets up to
/// total_epochs (0 = the n_epochs stored in the checkpoint). A run that is
/// interrupted and resumed produces byte-identical parameters, history and
/// predictions to an uninterrupted one.
TrainResult resume_training(const std::filesystem::path& path, const FeatureDataset& source,
                            const FeatureDataset& target, int total_epochs = 0);

}  // namespace lad
