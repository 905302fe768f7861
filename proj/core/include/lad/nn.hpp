#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lad/rng.hpp"
#include "lad/tensor.hpp"

namespace lad {

enum class Activation { ReLU, Softmax, Identity };
enum class Mode { Train, Eval };

/// Glorot/Xavier uniform weights on [-L, L], L = sqrt(6 / (fan_in + fan_out)).
/// Biases are initialized to zero by the network builder, not here.
template <class S>
Tensor2T<S> glorot_uniform_init(Index fan_in, Index fan_out, Rng& rng) {
  if (fan_in < 1 || fan_out < 1) {
    throw std::invalid_argument("glorot_uniform_init: fan dimensions must be >= 1");
  }
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor2T<S> w(fan_in, fan_out);
  for (Index i = 0; i < w.size(); ++i) {
    w.data()[i] = static_cast<S>(rng.uniform(-limit, limit));
  }
  return w;
}

template <class S>
struct DenseLayerT {
  Tensor2T<S> weights;  // fan_in x fan_out
  VectorT<S> bias;      // fan_out
  Activation activation = Activation::Identity;
  // Inverted dropout applied after the activation, train mode only.
  // Not supported on Softmax layers (the backward pass needs the raw
  // softmax output).
  double dropout_rate = 0.0;

  Index fan_in() const { return weights.rows(); }
  Index fan_out() const { return weights.cols(); }
};
using DenseLayer = DenseLayerT<double>;

template <class S>
struct MlpT {
  std::vector<DenseLayerT<S>> layers;
  Mode mode = Mode::Train;

  Index input_dim() const { return layers.empty() ? 0 : layers.front().fan_in(); }
  Index output_dim() const { return layers.empty() ? 0 : layers.back().fan_out(); }
};
using Mlp = MlpT<double>;

/// Dense stack builder: widths[0] -> widths[1] -> ... -> widths.back().
/// Hidden layers get hidden_act and hidden_dropout; the final layer gets
/// out_act and no dropout. Weights Glorot-uniform, biases zero.
template <class S>
MlpT<S> make_mlp(const std::vector<Index>& widths, Activation hidden_act, Activation out_act,
                 double hidden_dropout, Rng& rng) {
  if (widths.size() < 2) throw std::invalid_argument("make_mlp: need at least two widths");
  if (hidden_dropout < 0.0 || hidden_dropout >= 1.0) {
    throw std::invalid_argument("make_mlp: dropout rate must be in [0, 1)");
  }
  MlpT<S> net;
  net.layers.reserve(widths.size() - 1);
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const bool last = i + 2 == widths.size();
    DenseLayerT<S> layer;
    layer.weights = glorot_uniform_init<S>(widths[i], widths[i + 1], rng);
    layer.bias = VectorT<S>::Zero(widths[i + 1]);
    layer.activation = last ? out_act : hidden_act;
    layer.dropout_rate = last ? 0.0 : hidden_dropout;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

template <class S>
Tensor2T<S> relu(const Tensor2T<S>& x) {
  return x.cwiseMax(S(0));
}

/// Row-wise softmax with max-subtraction; rows sum to 1 and entries stay
/// in (0, 1) for any finite input.
template <class S>
void softmax_in_place(Tensor2T<S>& m) {
  const VectorT<S> row_max = m.rowwise().maxCoeff();
  m.colwise() -= row_max;
  m = m.array().exp();
  const VectorT<S> row_sum = m.rowwise().sum();
  m.array().colwise() /= row_sum.array();
}

template <class S>
Tensor2T<S> softmax(const Tensor2T<S>& logits) {
  Tensor2T<S> out = logits;
  softmax_in_place(out);
  return out;
}

namespace detail {

// Masks are filled in row-major element order so that a forward pass and
// the standalone dropout_forward consume the stream identically.
template <class S>
void fill_dropout_mask(Tensor2T<S>& mask, Index rows, Index cols, double rate, Rng& rng) {
  mask.resize(rows, cols);
  const S keep_scale = static_cast<S>(1.0 / (1.0 - rate));
  for (Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng.uniform01() >= rate ? keep_scale : S(0);
  }
}

}  // namespace detail

/// Inverted dropout: each entry is zeroed with probability rate and
/// survivors are scaled by 1/(1-rate), so the expectation is preserved
/// and Eval mode needs no rescaling. Returns the output and the mask of
/// scale factors (empty when dropout was inactive).
template <class S>
std::pair<Tensor2T<S>, Tensor2T<S>> dropout_forward(const Tensor2T<S>& x, double rate, Rng& rng,
                                                    Mode mode) {
  if (rate < 0.0 || rate >= 1.0) {
    throw std::invalid_argument("dropout_forward: rate must be in [0, 1)");
  }
  if (mode == Mode::Eval || rate == 0.0) {
    return {x, Tensor2T<S>()};
  }
  Tensor2T<S> mask;
  detail::fill_dropout_mask(mask, x.rows(), x.cols(), rate, rng);
  return {x.cwiseProduct(mask), std::move(mask)};
}

/// Gradient reversal, backward half: forward is the exact identity (the
/// discriminator consumes the classifier output unchanged), backward
/// negates the incoming gradient.
template <class S>
Tensor2T<S> grl_backward(const Tensor2T<S>& grad) {
  return -grad;
}

/// Everything backward() needs: acts[0] is the input, acts[i+1] the output
/// of layer i after activation and dropout; masks[i] holds the inverted
/// dropout scale factors (empty when inactive).
template <class S>
struct TraceT {
  std::vector<Tensor2T<S>> acts;
  std::vector<Tensor2T<S>> masks;
  const Tensor2T<S>& output() const { return acts.back(); }
};
using Trace = TraceT<double>;

template <class S>
struct GradientsT {
  std::vector<Tensor2T<S>> weight_grads;
  std::vector<VectorT<S>> bias_grads;
  Tensor2T<S> input_grad;  // filled only when requested
};
using Gradients = GradientsT<double>;

namespace detail {

template <class S>
void forward_impl(const MlpT<S>& net, const Tensor2T<S>& x, Rng* rng, TraceT<S>& trace,
                  Mode mode) {
  if (net.layers.empty()) throw std::invalid_argument("forward: network has no layers");
  const std::size_t n_layers = net.layers.size();
  trace.acts.resize(n_layers + 1);
  trace.masks.resize(n_layers);
  trace.acts[0] = x;
  for (std::size_t i = 0; i < n_layers; ++i) {
    const DenseLayerT<S>& layer = net.layers[i];
    const Tensor2T<S>& in = trace.acts[i];
    if (in.cols() != layer.fan_in()) {
      throw std::invalid_argument("forward: layer " + std::to_string(i) + ": input width " +
                                  std::to_string(in.cols()) + ", expected " +
                                  std::to_string(layer.fan_in()));
    }
    if (layer.dropout_rate > 0.0 && layer.activation == Activation::Softmax) {
      throw std::invalid_argument("forward: layer " + std::to_string(i) +
                                  ": dropout on a softmax layer is not supported");
    }
    Tensor2T<S>& out = trace.acts[i + 1];
    out.resize(in.rows(), layer.fan_out());
    out.noalias() = in * layer.weights;
    out.rowwise() += layer.bias.transpose();
    switch (layer.activation) {
      case Activation::ReLU:
        out = out.cwiseMax(S(0));
        break;
      case Activation::Softmax:
        softmax_in_place(out);
        break;
      case Activation::Identity:
        break;
    }
    Tensor2T<S>& mask = trace.masks[i];
    if (mode == Mode::Train && layer.dropout_rate > 0.0 && rng != nullptr) {
      detail::fill_dropout_mask(mask, out.rows(), out.cols(), layer.dropout_rate, *rng);
      out.array() *= mask.array();
    } else {
      mask.resize(0, 0);
    }
  }
}

}  // namespace detail

/// Forward pass recording all intermediate activations and dropout masks.
/// Deterministic given (net, x, rng state, net.mode). The trace argument
/// is reused across calls: buffers are only reallocated on shape changes.
template <class S>
void forward(const MlpT<S>& net, const Tensor2T<S>& x, Rng& rng, TraceT<S>& trace) {
  detail::forward_impl(net, x, &rng, trace, net.mode);
}

template <class S>
TraceT<S> forward(const MlpT<S>& net, const Tensor2T<S>& x, Rng& rng) {
  TraceT<S> trace;
  forward(net, x, rng, trace);
  return trace;
}

/// Dropout-free forward pass regardless of net.mode; used for prediction
/// sweeps and diagnostics on a network that is mid-training.
template <class S>
void forward_eval(const MlpT<S>& net, const Tensor2T<S>& x, TraceT<S>& trace) {
  detail::forward_impl(net, x, nullptr, trace, Mode::Eval);
}

/// Reverse-mode pass: given dL/d(output), fills dL/dW and dL/db for every
/// layer, plus dL/d(input) when want_input_grad is set (used to chain the
/// discriminator into the classifier through the gradient reversal layer).
template <class S>
void backward(const MlpT<S>& net, const TraceT<S>& trace, const Tensor2T<S>& grad_output,
              GradientsT<S>& grads, bool want_input_grad = false) {
  const std::size_t n_layers = net.layers.size();
  if (trace.acts.size() != n_layers + 1 || trace.masks.size() != n_layers) {
    throw std::runtime_error("backward: trace does not match network");
  }
  const Tensor2T<S>& out = trace.acts[n_layers];
  if (grad_output.rows() != out.rows() || grad_output.cols() != out.cols()) {
    throw std::invalid_argument("backward: grad_output shape " +
                                std::to_string(grad_output.rows()) + "x" +
                                std::to_string(grad_output.cols()) + " does not match output " +
                                std::to_string(out.rows()) + "x" + std::to_string(out.cols()));
  }
  grads.weight_grads.resize(n_layers);
  grads.bias_grads.resize(n_layers);
  Tensor2T<S> g = grad_output;
  for (std::size_t i = n_layers; i-- > 0;) {
    const DenseLayerT<S>& layer = net.layers[i];
    const Tensor2T<S>& a = trace.acts[i + 1];
    if (a.cols() != layer.fan_out() || trace.acts[i].cols() != layer.fan_in() ||
        trace.acts[i].rows() != a.rows()) {
      throw std::runtime_error("backward: stale trace at layer " + std::to_string(i));
    }
    const Tensor2T<S>& mask = trace.masks[i];
    if (mask.size() != 0) {
      if (mask.rows() != g.rows() || mask.cols() != g.cols()) {
        throw std::runtime_error("backward: stale trace at layer " + std::to_string(i) +
                                 " (mask shape)");
      }
      g.array() *= mask.array();
    }
    switch (layer.activation) {
      case Activation::ReLU:
        // a > 0 iff the pre-activation was > 0 at surviving units; dropped
        // units already carry zero gradient from the mask product.
        g.array() *= (a.array() > S(0)).template cast<S>();
        break;
      case Activation::Softmax: {
        // dL/dz_j = y_j * (g_j - sum_k g_k y_k) per row, y = softmax output.
        const VectorT<S> row_dot = (g.array() * a.array()).rowwise().sum();
        g = (a.array() * (g.array().colwise() - row_dot.array())).matrix();
        break;
      }
      case Activation::Identity:
        break;
    }
    Tensor2T<S>& dw = grads.weight_grads[i];
    dw.resize(layer.fan_in(), layer.fan_out());
    dw.noalias() = trace.acts[i].transpose() * g;
    grads.bias_grads[i] = g.colwise().sum();
    if (i > 0 || want_input_grad) {
      Tensor2T<S> next(g.rows(), layer.fan_in());
      next.noalias() = g * layer.weights.transpose();
      g = std::move(next);
    }
  }
  if (want_input_grad) {
    grads.input_grad = std::move(g);
  } else {
    grads.input_grad.resize(0, 0);
  }
}

}  // namespace lad
