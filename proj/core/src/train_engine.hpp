#pragma once

// Private training engine shared by lad_train, baseline_train and
// resume_training. Templated on the training scalar; the public API
// instantiates it at double (default) or float (TrainConfig.real32).

#include <chrono>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "lad/batching.hpp"
#include "lad/checkpoint.hpp"
#include "lad/class_weights.hpp"
#include "lad/dataset.hpp"
#include "lad/error.hpp"
#include "lad/losses.hpp"
#include "lad/nn.hpp"
#include "lad/optimizer.hpp"
#include "lad/rng.hpp"
#include "lad/trainer.hpp"

namespace lad::detail {

inline constexpr char kCheckpointMagic[8] = {'L', 'A', 'D', 'C', 'K', 'P', 'T', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr Index kSweepChunk = 4096;

// ---------------------------------------------------------------------------
// Validation

inline int validate_inputs(const FeatureDataset& source, const FeatureDataset& target,
                           const TrainConfig& cfg) {
  if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (cfg.n_epochs < 1) throw ConfigError("n_epochs must be >= 1");
  if (cfg.hidden_width < 1) throw ConfigError("hidden_width must be >= 1");
  if (cfg.learning_rate <= 0.0) throw ConfigError("learning_rate must be > 0");
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) throw ConfigError("momentum must be in [0, 1)");
  if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0) {
    throw ConfigError("dropout_rate must be in [0, 1)");
  }
  if (cfg.record_every < 1) throw ConfigError("record_every must be >= 1");
  if (cfg.checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
  if (cfg.checkpoint_every > 0 && cfg.checkpoint_path.empty()) {
    throw ConfigError("checkpoint_every set but checkpoint_path is empty");
  }

  if (source.size() == 0) throw DataError("source domain is empty");
  if (target.size() == 0) throw DataError("target domain is empty");
  if (!source.labeled()) throw DataError("source domain must be labeled");
  if (source.dim() != target.dim()) {
    throw DataError("feature dimension mismatch: source " + std::to_string(source.dim()) +
                    ", target " + std::to_string(target.dim()));
  }
  int k = source.num_classes;
  if (k <= 0) {
    for (int y : source.labels) k = std::max(k, y + 1);
  }
  if (k < 2) throw DataError("source must contain at least 2 classes");
  for (int y : source.labels) {
    if (y < 0 || y >= k) {
      throw DataError("source label " + std::to_string(y) + " inconsistent with num_classes=" +
                      std::to_string(k));
    }
  }
  if (target.num_classes > 0 && target.num_classes != k) {
    throw DataError("target num_classes=" + std::to_string(target.num_classes) +
                    " does not match source num_classes=" + std::to_string(k));
  }
  if (target.labeled()) {
    for (int y : target.labels) {
      if (y < 0 || y >= k) {
        throw DataError("target diagnostic label " + std::to_string(y) + " out of range");
      }
    }
  }
  return k;
}

// ---------------------------------------------------------------------------
// Engine state

template <class S>
struct EngineState {
  MlpT<S> classifier;
  MlpT<S> discriminator;  // empty in baseline mode
  OptimizerStateT<S> classifier_opt;
  OptimizerStateT<S> discriminator_opt;
  Rng rng_dropout{0};
  Rng rng_src{0};
  Rng rng_tgt{0};
  std::vector<double> target_weights;  // per-instance w_T
  TrainHistory history;
  int epoch_done = 0;
  double wallclock_offset = 0.0;
};

template <class S>
EngineState<S> init_state(const FeatureDataset& source, const FeatureDataset& target,
                          const TrainConfig& cfg, bool baseline_mode, int num_classes) {
  EngineState<S> st;
  Rng root(cfg.seed);
  Rng rng_init = root.fork("init");
  st.rng_dropout = root.fork("dropout");
  st.rng_src = root.fork("shuffle-source");
  st.rng_tgt = root.fork("shuffle-target");

  const Index d = source.dim();
  const Index h = cfg.hidden_width;
  st.classifier = make_mlp<S>({d, h, h, num_classes}, Activation::ReLU, Activation::Softmax,
                              cfg.dropout_rate, rng_init);
  st.classifier_opt = make_optimizer_state(st.classifier, cfg.learning_rate, cfg.momentum);
  if (!baseline_mode) {
    st.discriminator = make_mlp<S>({num_classes, h, h, 2}, Activation::ReLU, Activation::Softmax,
                                   0.0, rng_init);
    st.discriminator_opt =
        make_optimizer_state(st.discriminator, cfg.learning_rate, cfg.momentum);
  }
  st.target_weights.assign(static_cast<std::size_t>(target.size()), 1.0);
  return st;
}

// ---------------------------------------------------------------------------
// Helpers

template <class S>
void gather_rows(const Tensor2T<S>& all, const std::vector<Index>& idx, Tensor2T<S>& out,
                 Index row_offset) {
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row(row_offset + static_cast<Index>(i)) = all.row(idx[i]);
  }
}

/// Chunked dropout-free prediction sweep.
template <class S>
void predict_probs(const MlpT<S>& net, const Tensor2T<S>& x, Tensor2T<S>& probs,
                   TraceT<S>& scratch, Tensor2T<S>& chunk_buf) {
  const Index n = x.rows();
  probs.resize(n, net.output_dim());
  for (Index i0 = 0; i0 < n; i0 += kSweepChunk) {
    const Index cnt = std::min(kSweepChunk, n - i0);
    chunk_buf = x.middleRows(i0, cnt);
    forward_eval(net, chunk_buf, scratch);
    probs.middleRows(i0, cnt) = scratch.output();
  }
}

template <class S>
double domain_accuracy_from_probs(const MlpT<S>& disc, const Tensor2T<S>& probs_source,
                                  const Tensor2T<S>& probs_target, TraceT<S>& scratch) {
  Index correct = 0;
  forward_eval(disc, probs_source, scratch);
  for (int p : pseudo_labels(scratch.output())) correct += (p == 1);
  forward_eval(disc, probs_target, scratch);
  for (int p : pseudo_labels(scratch.output())) correct += (p == 0);
  return static_cast<double>(correct) /
         static_cast<double>(probs_source.rows() + probs_target.rows());
}

template <class S>
LadModelT<double> model_to_double(EngineState<S>&& st) {
  LadModelT<double> out;
  if constexpr (std::is_same_v<S, double>) {
    out.classifier = std::move(st.classifier);
    out.discriminator = std::move(st.discriminator);
    out.classifier_opt = std::move(st.classifier_opt);
    out.discriminator_opt = std::move(st.discriminator_opt);
  } else {
    auto cast_net = [](const MlpT<S>& net) {
      MlpT<double> o;
      o.mode = net.mode;
      for (const auto& l : net.layers) {
        DenseLayerT<double> ld;
        ld.weights = l.weights.template cast<double>();
        ld.bias = l.bias.template cast<double>();
        ld.activation = l.activation;
        ld.dropout_rate = l.dropout_rate;
        o.layers.push_back(std::move(ld));
      }
      return o;
    };
    auto cast_opt = [](const OptimizerStateT<S>& opt) {
      OptimizerStateT<double> o;
      o.learning_rate = opt.learning_rate;
      o.momentum = opt.momentum;
      for (const auto& v : opt.weight_velocity) o.weight_velocity.push_back(v.template cast<double>());
      for (const auto& v : opt.bias_velocity) o.bias_velocity.push_back(v.template cast<double>());
      return o;
    };
    out.classifier = cast_net(st.classifier);
    out.discriminator = cast_net(st.discriminator);
    out.classifier_opt = cast_opt(st.classifier_opt);
    out.discriminator_opt = cast_opt(st.discriminator_opt);
  }
  out.classifier.mode = Mode::Eval;
  out.discriminator.mode = Mode::Eval;
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoint I/O

inline void put_bytes(std::ostream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <class T>
void put_pod(std::ostream& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  put_bytes(out, &v, sizeof(T));
}

inline void put_string(std::ostream& out, const std::string& s) {
  put_pod<std::uint64_t>(out, s.size());
  put_bytes(out, s.data(), s.size());
}

inline void get_bytes(std::istream& in, void* p, std::size_t n) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!in) throw DataError("checkpoint: truncated file");
}

template <class T>
T get_pod(std::istream& in) {
  static_assert(std::is_trivially_copyable_v<T>);
  T v;
  get_bytes(in, &v, sizeof(T));
  return v;
}

inline std::string get_string(std::istream& in) {
  const auto n = get_pod<std::uint64_t>(in);
  if (n > (1ull << 32)) throw DataError("checkpoint: implausible string length");
  std::string s(static_cast<std::size_t>(n), '\0');
  get_bytes(in, s.data(), s.size());
  return s;
}

template <class S>
void put_net(std::ostream& out, const MlpT<S>& net, const OptimizerStateT<S>& opt) {
  put_pod<std::uint32_t>(out, static_cast<std::uint32_t>(net.layers.size()));
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& l = net.layers[i];
    put_pod<std::int64_t>(out, l.fan_in());
    put_pod<std::int64_t>(out, l.fan_out());
    put_pod<std::uint8_t>(out, static_cast<std::uint8_t>(l.activation));
    put_pod<double>(out, l.dropout_rate);
    put_bytes(out, l.weights.data(), sizeof(S) * static_cast<std::size_t>(l.weights.size()));
    put_bytes(out, l.bias.data(), sizeof(S) * static_cast<std::size_t>(l.bias.size()));
    put_bytes(out, opt.weight_velocity[i].data(),
              sizeof(S) * static_cast<std::size_t>(opt.weight_velocity[i].size()));
    put_bytes(out, opt.bias_velocity[i].data(),
              sizeof(S) * static_cast<std::size_t>(opt.bias_velocity[i].size()));
  }
}

template <class S>
void get_net(std::istream& in, MlpT<S>& net, OptimizerStateT<S>& opt, double lr, double mu) {
  const auto n_layers = get_pod<std::uint32_t>(in);
  net.layers.clear();
  opt.weight_velocity.clear();
  opt.bias_velocity.clear();
  opt.learning_rate = lr;
  opt.momentum = mu;
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    DenseLayerT<S> l;
    const auto fan_in = get_pod<std::int64_t>(in);
    const auto fan_out = get_pod<std::int64_t>(in);
    if (fan_in < 1 || fan_out < 1 || fan_in > (1 << 24) || fan_out > (1 << 24)) {
      throw DataError("checkpoint: implausible layer shape");
    }
    l.activation = static_cast<Activation>(get_pod<std::uint8_t>(in));
    l.dropout_rate = get_pod<double>(in);
    l.weights.resize(fan_in, fan_out);
    l.bias.resize(fan_out);
    Tensor2T<S> vw(fan_in, fan_out);
    VectorT<S> vb(fan_out);
    get_bytes(in, l.weights.data(), sizeof(S) * static_cast<std::size_t>(l.weights.size()));
    get_bytes(in, l.bias.data(), sizeof(S) * static_cast<std::size_t>(l.bias.size()));
    get_bytes(in, vw.data(), sizeof(S) * static_cast<std::size_t>(vw.size()));
    get_bytes(in, vb.data(), sizeof(S) * static_cast<std::size_t>(vb.size()));
    net.layers.push_back(std::move(l));
    opt.weight_velocity.push_back(std::move(vw));
    opt.bias_velocity.push_back(std::move(vb));
  }
}

inline void put_config(std::ostream& out, const TrainConfig& cfg) {
  put_pod<double>(out, cfg.learning_rate);
  put_pod<double>(out, cfg.momentum);
  put_pod<std::int64_t>(out, cfg.batch_size);
  put_pod<std::int32_t>(out, cfg.n_epochs);
  put_pod<std::int64_t>(out, cfg.hidden_width);
  put_pod<double>(out, cfg.dropout_rate);
  put_pod<std::uint8_t>(out, cfg.use_class_weights);
  put_pod<std::uint64_t>(out, cfg.seed);
  put_pod<std::int32_t>(out, cfg.record_every);
  put_pod<std::uint8_t>(out, cfg.real32);
  put_pod<std::uint8_t>(out, cfg.grl_enabled);
  put_pod<std::int32_t>(out, cfg.checkpoint_every);
  put_string(out, cfg.checkpoint_path);
}

inline TrainConfig get_config(std::istream& in) {
  TrainConfig cfg;
  cfg.learning_rate = get_pod<double>(in);
  cfg.momentum = get_pod<double>(in);
  cfg.batch_size = get_pod<std::int64_t>(in);
  cfg.n_epochs = get_pod<std::int32_t>(in);
  cfg.hidden_width = get_pod<std::int64_t>(in);
  cfg.dropout_rate = get_pod<double>(in);
  cfg.use_class_weights = get_pod<std::uint8_t>(in) != 0;
  cfg.seed = get_pod<std::uint64_t>(in);
  cfg.record_every = get_pod<std::int32_t>(in);
  cfg.real32 = get_pod<std::uint8_t>(in) != 0;
  cfg.grl_enabled = get_pod<std::uint8_t>(in) != 0;
  cfg.checkpoint_every = get_pod<std::int32_t>(in);
  cfg.checkpoint_path = get_string(in);
  return cfg;
}

struct CheckpointGuards {
  std::int64_t n_source = 0;
  std::int64_t dim = 0;
  std::int64_t n_target = 0;
  std::int32_t num_classes = 0;
};

template <class S>
void write_checkpoint(const TrainConfig& cfg, bool baseline_mode, const EngineState<S>& st,
                      const CheckpointGuards& guards, double wallclock_now) {
  std::ofstream out(cfg.checkpoint_path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open checkpoint for writing: " + cfg.checkpoint_path);
  put_bytes(out, kCheckpointMagic, sizeof(kCheckpointMagic));
  put_pod<std::uint32_t>(out, kCheckpointVersion);
  put_pod<std::uint8_t>(out, sizeof(S));
  put_pod<std::uint8_t>(out, baseline_mode);
  put_pod<std::int32_t>(out, st.epoch_done);
  put_config(out, cfg);
  put_pod<std::int64_t>(out, guards.n_source);
  put_pod<std::int64_t>(out, guards.dim);
  put_pod<std::int64_t>(out, guards.n_target);
  put_pod<std::int32_t>(out, guards.num_classes);
  put_net(out, st.classifier, st.classifier_opt);
  put_pod<std::uint8_t>(out, !baseline_mode);
  if (!baseline_mode) put_net(out, st.discriminator, st.discriminator_opt);
  put_pod<std::uint64_t>(out, st.target_weights.size());
  put_bytes(out, st.target_weights.data(), sizeof(double) * st.target_weights.size());
  put_string(out, st.rng_dropout.serialize());
  put_string(out, st.rng_src.serialize());
  put_string(out, st.rng_tgt.serialize());
  put_pod<std::uint64_t>(out, st.history.records.size());
  for (const auto& r : st.history.records) {
    put_pod<std::int32_t>(out, r.epoch);
    put_pod<std::int32_t>(out, r.steps);
    put_pod<double>(out, r.source_class_loss);
    put_pod<std::uint8_t>(out, r.target_class_loss.has_value());
    put_pod<double>(out, r.target_class_loss.value_or(0.0));
    put_pod<std::uint8_t>(out, r.target_accuracy.has_value());
    put_pod<double>(out, r.target_accuracy.value_or(0.0));
    put_pod<std::uint8_t>(out, r.discriminator_accuracy.has_value());
    put_pod<double>(out, r.discriminator_accuracy.value_or(0.0));
    put_pod<double>(out, r.wallclock_seconds);
  }
  put_pod<double>(out, wallclock_now);
  if (!out) throw DataError("checkpoint write failed: " + cfg.checkpoint_path);
}

struct CheckpointHeader {
  CheckpointInfo info;
  CheckpointGuards guards;
};

inline CheckpointHeader read_checkpoint_header(std::istream& in, const std::string& path) {
  char magic[sizeof(kCheckpointMagic)];
  get_bytes(in, magic, sizeof(magic));
  if (std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw DataError("not a checkpoint file: " + path);
  }
  CheckpointHeader h;
  const auto version = get_pod<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version) + ": " + path);
  }
  h.info.version = static_cast<int>(version);
  const auto width = get_pod<std::uint8_t>(in);
  if (width != 4 && width != 8) throw DataError("checkpoint: bad scalar width");
  h.info.real32 = width == 4;
  h.info.baseline_mode = get_pod<std::uint8_t>(in) != 0;
  h.info.epoch_done = get_pod<std::int32_t>(in);
  h.info.config = get_config(in);
  h.guards.n_source = get_pod<std::int64_t>(in);
  h.guards.dim = get_pod<std::int64_t>(in);
  h.guards.n_target = get_pod<std::int64_t>(in);
  h.guards.num_classes = get_pod<std::int32_t>(in);
  return h;
}

template <class S>
EngineState<S> read_state(std::istream& in, const CheckpointHeader& h) {
  EngineState<S> st;
  get_net(in, st.classifier, st.classifier_opt, h.info.config.learning_rate,
          h.info.config.momentum);
  const bool has_disc = get_pod<std::uint8_t>(in) != 0;
  if (has_disc) {
    get_net(in, st.discriminator, st.discriminator_opt, h.info.config.learning_rate,
            h.info.config.momentum);
  }
  const auto n_weights = get_pod<std::uint64_t>(in);
  st.target_weights.resize(static_cast<std::size_t>(n_weights));
  get_bytes(in, st.target_weights.data(), sizeof(double) * st.target_weights.size());
  st.rng_dropout = Rng::deserialize(get_string(in));
  st.rng_src = Rng::deserialize(get_string(in));
  st.rng_tgt = Rng::deserialize(get_string(in));
  const auto n_records = get_pod<std::uint64_t>(in);
  st.history.records.resize(static_cast<std::size_t>(n_records));
  for (auto& r : st.history.records) {
    r.epoch = get_pod<std::int32_t>(in);
    r.steps = get_pod<std::int32_t>(in);
    r.source_class_loss = get_pod<double>(in);
    const bool has_tl = get_pod<std::uint8_t>(in) != 0;
    const double tl = get_pod<double>(in);
    if (has_tl) r.target_class_loss = tl;
    const bool has_ta = get_pod<std::uint8_t>(in) != 0;
    const double ta = get_pod<double>(in);
    if (has_ta) r.target_accuracy = ta;
    const bool has_da = get_pod<std::uint8_t>(in) != 0;
    const double da = get_pod<double>(in);
    if (has_da) r.discriminator_accuracy = da;
    r.wallclock_seconds = get_pod<double>(in);
  }
  st.epoch_done = h.info.epoch_done;
  st.wallclock_offset = get_pod<double>(in);
  return st;
}

// ---------------------------------------------------------------------------
// Epoch loop

template <class S>
TrainResult run_engine(const FeatureDataset& source, const FeatureDataset& target,
                       const TrainConfig& cfg, bool baseline_mode, EngineState<S> st,
                       int total_epochs, int num_classes) {
  using Clock = std::chrono::steady_clock;
  const Index n_source = source.size();
  const Index n_target = target.size();
  const Index d = source.dim();
  const Index batch = cfg.batch_size;
  const int k = num_classes;

  const Tensor2T<S> xs_all = source.features.template cast<S>();
  const Tensor2T<S> xt_all = target.features.template cast<S>();

  // Source weights are fixed for the whole run.
  VectorT<S> source_weight_all(n_source);
  if (cfg.use_class_weights) {
    const ClassWeightTable table = source_class_weights(source.labels, k);
    for (Index i = 0; i < n_source; ++i) {
      source_weight_all(i) =
          static_cast<S>(table.weight_for(source.labels[static_cast<std::size_t>(i)]));
    }
  } else {
    source_weight_all.setOnes();
  }

  CheckpointGuards guards{n_source, d, n_target, k};

  // Reused workspaces; reallocation happens only when batch shapes change.
  TraceT<S> trace_cls, trace_cat, trace_disc, sweep_trace;
  GradientsT<S> grads_cls, grads_cat, grads_disc;
  Tensor2T<S> xs, xcat, gprobs, gq, probs_source, probs_target, chunk_buf;
  std::vector<int> batch_labels;
  VectorT<S> batch_weights;
  DomainBatchT<S> domain_batch;
  VectorT<S> ones_source = VectorT<S>::Ones(n_source);
  VectorT<S> ones_target = VectorT<S>::Ones(n_target);
  std::vector<int> pseudo;

  const auto t_start = Clock::now();
  auto elapsed = [&] {
    return st.wallclock_offset + std::chrono::duration<double>(Clock::now() - t_start).count();
  };

  for (int epoch = st.epoch_done + 1; epoch <= total_epochs; ++epoch) {
    st.classifier.mode = Mode::Train;
    if (!baseline_mode) st.discriminator.mode = Mode::Train;
    BatchStream source_stream(n_source, batch, st.rng_src, /*cycling=*/false);
    std::optional<BatchStream> target_stream;
    if (!baseline_mode) target_stream.emplace(n_target, batch, st.rng_tgt, /*cycling=*/true);

    int steps = 0;
    for (;;) {
      const std::vector<Index> src_idx = source_stream.next();
      if (src_idx.empty()) break;
      const Index bs = static_cast<Index>(src_idx.size());

      // Classifier step on the weighted source loss.
      xs.resize(bs, d);
      gather_rows(xs_all, src_idx, xs, 0);
      batch_labels.resize(src_idx.size());
      batch_weights.resize(bs);
      for (std::size_t i = 0; i < src_idx.size(); ++i) {
        batch_labels[i] = source.labels[static_cast<std::size_t>(src_idx[i])];
        batch_weights(static_cast<Index>(i)) = source_weight_all(src_idx[i]);
      }
      forward(st.classifier, xs, st.rng_dropout, trace_cls);
      cross_entropy_grad(trace_cls.output(), batch_labels, batch_weights, gprobs);
      backward(st.classifier, trace_cls, gprobs, grads_cls, false);
      sgd_nesterov_step(st.classifier, grads_cls, st.classifier_opt);
      ++steps;

      if (baseline_mode) continue;

      // Discriminator step on the weighted domain loss over the
      // concatenated batch: source rows first, then target rows. The
      // classifier runs in train mode here too (fresh dropout masks).
      const std::vector<Index> tgt_idx = target_stream->next();
      const Index bt = static_cast<Index>(tgt_idx.size());
      xcat.resize(bs + bt, d);
      gather_rows(xs_all, src_idx, xcat, 0);
      gather_rows(xt_all, tgt_idx, xcat, bs);
      domain_batch.domain_ids.assign(static_cast<std::size_t>(bs), 1);
      domain_batch.domain_ids.resize(static_cast<std::size_t>(bs + bt), 0);
      domain_batch.instance_weights.resize(bs + bt);
      domain_batch.instance_weights.head(bs) = batch_weights;
      for (std::size_t i = 0; i < tgt_idx.size(); ++i) {
        domain_batch.instance_weights(bs + static_cast<Index>(i)) =
            static_cast<S>(st.target_weights[static_cast<std::size_t>(tgt_idx[i])]);
      }
      forward(st.classifier, xcat, st.rng_dropout, trace_cat);
      forward(st.discriminator, trace_cat.output(), st.rng_dropout, trace_disc);
      weighted_domain_loss_grad(trace_disc.output(), domain_batch, gq);
      backward(st.discriminator, trace_disc, gq, grads_disc, /*want_input_grad=*/cfg.grl_enabled);
      sgd_nesterov_step(st.discriminator, grads_disc, st.discriminator_opt);
      if (cfg.grl_enabled) {
        // The reversal layer turns the discriminator's descent direction
        // into ascent for the classifier: min_C max_D.
        const Tensor2T<S> reversed = grl_backward(grads_disc.input_grad);
        backward(st.classifier, trace_cat, reversed, grads_cat, false);
        sgd_nesterov_step(st.classifier, grads_cat, st.classifier_opt);
      }
    }

    // Epoch end: full-target prediction sweep (eval mode), pseudo-label
    // weight refresh, history snapshot.
    const bool record = epoch % cfg.record_every == 0 || epoch == total_epochs;
    const bool need_sweep = !baseline_mode || record;
    if (need_sweep) {
      predict_probs(st.classifier, xt_all, probs_target, sweep_trace, chunk_buf);
      pseudo = pseudo_labels(probs_target);
      if (!baseline_mode && cfg.use_class_weights) {
        const ClassWeightTable table = target_class_weights(pseudo, k);
        for (std::size_t i = 0; i < pseudo.size(); ++i) {
          st.target_weights[i] = table.weight_for(pseudo[i]);
        }
      }
    }
    if (record) {
      predict_probs(st.classifier, xs_all, probs_source, sweep_trace, chunk_buf);
      EpochRecord rec;
      rec.epoch = epoch;
      rec.steps = steps;
      rec.source_class_loss = cross_entropy(probs_source, source.labels, ones_source);
      if (target.labeled()) {
        rec.target_class_loss = cross_entropy(probs_target, target.labels, ones_target);
        Index correct = 0;
        for (std::size_t i = 0; i < pseudo.size(); ++i) correct += pseudo[i] == target.labels[i];
        rec.target_accuracy = static_cast<double>(correct) / static_cast<double>(n_target);
      }
      if (!baseline_mode) {
        rec.discriminator_accuracy =
            domain_accuracy_from_probs(st.discriminator, probs_source, probs_target, sweep_trace);
      }
      rec.wallclock_seconds = elapsed();
      st.history.records.push_back(rec);
    }
    st.epoch_done = epoch;
    if (cfg.checkpoint_every > 0 && epoch % cfg.checkpoint_every == 0 && epoch < total_epochs) {
      write_checkpoint(cfg, baseline_mode, st, guards, elapsed());
    }
  }

  if (pseudo.empty()) {
    // Resume landed exactly on the stored epoch count: nothing ran, take
    // predictions from a fresh sweep of the restored model.
    predict_probs(st.classifier, xt_all, probs_target, sweep_trace, chunk_buf);
    pseudo = pseudo_labels(probs_target);
  }

  TrainResult result;
  result.predictions = std::move(pseudo);
  result.history = std::move(st.history);
  result.model = model_to_double(std::move(st));
  return result;
}

template <class S>
TrainResult train_fresh(const FeatureDataset& source, const FeatureDataset& target,
                        const TrainConfig& cfg, bool baseline_mode) {
  const int k = validate_inputs(source, target, cfg);
  EngineState<S> st = init_state<S>(source, target, cfg, baseline_mode, k);
  return run_engine(source, target, cfg, baseline_mode, std::move(st), cfg.n_epochs, k);
}

}  // namespace lad::detail
