#pragma once

// Desk-scale trainable codec. The autoencoder is a single chain of dense
// layers
//
//   N -> hidden... (tanh) -> m (identity) -> reversed hidden... (tanh) -> N (sigmoid)
//
// where N = width*height and pixels are scaled to [0, 1]. The first
// `encoder_layers` layers form the encoder E, the rest the generator G.
// Gradients are derived by hand; see tests/test_neural_codec.cpp for the
// finite-difference check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "latentseal/error.hpp"
#include "latentseal/image.hpp"
#include "latentseal/latent.hpp"

namespace latentseal {

enum class Activation : std::uint8_t { Identity = 0, Tanh = 1, Sigmoid = 2 };

struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  Activation activation = Activation::Identity;
  std::vector<double> weights;  // outputs x inputs, row-major
  std::vector<double> bias;

  DenseLayer() = default;
  DenseLayer(std::size_t in, std::size_t out, Activation act)
      : inputs(in), outputs(out), activation(act), weights(in * out, 0.0), bias(out, 0.0) {}

  bool operator==(const DenseLayer&) const = default;
};

/// Stack of dense layers. Also used to hold gradients of the same shape.
struct Mlp {
  std::vector<DenseLayer> layers;

  std::size_t input_size() const { return layers.empty() ? 0 : layers.front().inputs; }
  std::size_t output_size() const { return layers.empty() ? 0 : layers.back().outputs; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.bias.size();
    return n;
  }

  /// Visits every parameter: per layer, weights then biases.
  template <class F>
  void for_each_parameter(F&& f) {
    for (auto& l : layers) {
      for (double& w : l.weights) f(w);
      for (double& b : l.bias) f(b);
    }
  }

  Mlp zeros_like() const {
    Mlp z;
    for (const auto& l : layers) z.layers.emplace_back(l.inputs, l.outputs, l.activation);
    return z;
  }

  bool operator==(const Mlp&) const = default;
};

inline std::vector<double> flatten(const Mlp& net) {
  std::vector<double> out;
  out.reserve(net.parameter_count());
  for (const auto& l : net.layers) {
    out.insert(out.end(), l.weights.begin(), l.weights.end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

inline bool all_finite(const Mlp& net) {
  for (const auto& l : net.layers) {
    for (double w : l.weights)
      if (!std::isfinite(w)) return false;
    for (double b : l.bias)
      if (!std::isfinite(b)) return false;
  }
  return true;
}

namespace detail {

inline double activate(Activation act, double z) {
  switch (act) {
    case Activation::Identity: return z;
    case Activation::Tanh: return std::tanh(z);
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
  }
  return z;
}

// Derivative written in terms of the activation's output.
inline double activation_slope(Activation act, double a) {
  switch (act) {
    case Activation::Identity: return 1.0;
    case Activation::Tanh: return 1.0 - a * a;
    case Activation::Sigmoid: return a * (1.0 - a);
  }
  return 1.0;
}

inline std::vector<double> layer_forward(const DenseLayer& layer, std::span<const double> in) {
  std::vector<double> out(layer.outputs);
  for (std::size_t o = 0; o < layer.outputs; ++o) {
    const double* row = layer.weights.data() + o * layer.inputs;
    double z = layer.bias[o];
    for (std::size_t i = 0; i < layer.inputs; ++i) z += row[i] * in[i];
    out[o] = activate(layer.activation, z);
  }
  return out;
}

/// Activations of every layer boundary: acts[0] is the input, acts[k+1] the output of layer k.
inline std::vector<std::vector<double>> forward_trace(const Mlp& net, std::span<const double> input,
                                                      std::size_t first = 0,
                                                      std::size_t last = std::numeric_limits<std::size_t>::max()) {
  last = std::min(last, net.layers.size());
  std::vector<std::vector<double>> acts;
  acts.reserve(last - first + 1);
  acts.emplace_back(input.begin(), input.end());
  for (std::size_t k = first; k < last; ++k) acts.push_back(layer_forward(net.layers[k], acts.back()));
  return acts;
}

/// Backpropagates dL/d(output) through layers [first, last) whose activations
/// are `acts`; accumulates into `grad` and returns dL/d(input).
inline std::vector<double> backward(const Mlp& net, const std::vector<std::vector<double>>& acts,
                                    std::vector<double> d_out, Mlp& grad, std::size_t first, std::size_t last) {
  for (std::size_t k = last; k-- > first;) {
    const DenseLayer& layer = net.layers[k];
    DenseLayer& g = grad.layers[k];
    const auto& in = acts[k - first];
    const auto& out = acts[k - first + 1];
    std::vector<double> d_in(layer.inputs, 0.0);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double delta = d_out[o] * activation_slope(layer.activation, out[o]);
      g.bias[o] += delta;
      const double* row = layer.weights.data() + o * layer.inputs;
      double* grow = g.weights.data() + o * layer.inputs;
      for (std::size_t i = 0; i < layer.inputs; ++i) {
        grow[i] += delta * in[i];
        d_in[i] += row[i] * delta;
      }
    }
    d_out = std::move(d_in);
  }
  return d_out;
}

/// Uniform double in [0, 1) from the top 53 bits; independent of the standard
/// library's distribution implementations.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline void xavier_init(Mlp& net, std::mt19937_64& rng) {
  for (auto& l : net.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.inputs + l.outputs));
    for (double& w : l.weights) w = (2.0 * unit_uniform(rng) - 1.0) * limit;
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
}

/// Fisher-Yates driven directly by the engine, so batch order is portable.
inline void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

inline void sgd_step(Mlp& net, const Mlp& grad, double step) {
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    auto& l = net.layers[k];
    const auto& g = grad.layers[k];
    for (std::size_t i = 0; i < l.weights.size(); ++i) l.weights[i] -= step * g.weights[i];
    for (std::size_t i = 0; i < l.bias.size(); ++i) l.bias[i] -= step * g.bias[i];
  }
}

inline std::vector<double> normalized(const GrayImage& img) {
  std::vector<double> x(img.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = img.pixels()[i] / 255.0;
  return x;
}

}  // namespace detail

struct NeuralCodec {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t encoder_layers = 0;
  Mlp net;

  std::size_t latent_size() const { return net.layers.at(encoder_layers - 1).outputs; }
  bool operator==(const NeuralCodec&) const = default;
};

/// Zero-parameter codec with the given shape.
inline NeuralCodec make_neural_codec(std::size_t width, std::size_t height, std::size_t m,
                                     std::span<const std::size_t> hidden) {
  if (width == 0 || height == 0 || m == 0) fail(ErrorKind::InvalidArgument, "codec dimensions must be >= 1");
  for (std::size_t h : hidden) {
    if (h == 0) fail(ErrorKind::InvalidArgument, "hidden layer sizes must be >= 1");
  }
  NeuralCodec codec{width, height, hidden.size() + 1, {}};
  std::size_t prev = width * height;
  for (std::size_t h : hidden) {
    codec.net.layers.emplace_back(prev, h, Activation::Tanh);
    prev = h;
  }
  codec.net.layers.emplace_back(prev, m, Activation::Identity);
  prev = m;
  for (auto it = hidden.rbegin(); it != hidden.rend(); ++it) {
    codec.net.layers.emplace_back(prev, *it, Activation::Tanh);
    prev = *it;
  }
  codec.net.layers.emplace_back(prev, width * height, Activation::Sigmoid);
  return codec;
}

/// Checks the chain of shapes and that every parameter is finite.
inline void validate(const NeuralCodec& codec) {
  const auto& layers = codec.net.layers;
  if (codec.encoder_layers == 0 || codec.encoder_layers >= layers.size()) {
    fail(ErrorKind::ShapeMismatch, "encoder/decoder split is out of range");
  }
  const std::size_t pixels = codec.width * codec.height;
  if (pixels == 0 || layers.front().inputs != pixels || layers.back().outputs != pixels) {
    fail(ErrorKind::ShapeMismatch, "network input/output size must equal width*height");
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& l = layers[k];
    if (l.weights.size() != l.inputs * l.outputs || l.bias.size() != l.outputs || l.outputs == 0) {
      fail(ErrorKind::ShapeMismatch, "layer parameter sizes are inconsistent");
    }
    if (k + 1 < layers.size() && layers[k + 1].inputs != l.outputs) {
      fail(ErrorKind::ShapeMismatch, "layer shapes do not chain");
    }
  }
  if (!all_finite(codec.net)) fail(ErrorKind::ShapeMismatch, "network parameters must be finite");
}

inline LatentVector neural_encode(const NeuralCodec& codec, const GrayImage& img) {
  if (img.width() != codec.width || img.height() != codec.height) {
    fail(ErrorKind::ShapeMismatch, "image dimensions do not match the codec");
  }
  const auto acts = detail::forward_trace(codec.net, detail::normalized(img), 0, codec.encoder_layers);
  LatentVector v;
  v.values.reserve(acts.back().size());
  for (double z : acts.back()) v.values.push_back(round_to_f32(z));
  return v;
}

/// Generator output in [0, 1] before 8-bit quantization.
inline std::vector<double> neural_generate(const NeuralCodec& codec, std::span<const double> latent) {
  if (latent.size() != codec.latent_size()) fail(ErrorKind::ShapeMismatch, "latent length does not match the codec");
  return detail::forward_trace(codec.net, latent, codec.encoder_layers).back();
}

inline GrayImage neural_decode(const NeuralCodec& codec, const LatentVector& v) {
  require_finite(v);
  const auto unit = neural_generate(codec, v.values);
  GrayImage img(codec.width, codec.height);
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = to_pixel(unit[i] * 255.0);
  return img;
}

// ---------------------------------------------------------------------------
// Reconstruction loss and its gradient.
//
// Per image: sum over pixels of (G(E(x))_i - x_i)^2, x scaled to [0, 1].
// Per batch: mean over images.

struct LossAndGradient {
  double loss = 0.0;
  Mlp grad;
};

inline LossAndGradient reconstruction_loss_and_gradient(const NeuralCodec& codec,
                                                        std::span<const GrayImage* const> batch) {
  if (batch.empty()) fail(ErrorKind::EmptyBatch, "batch is empty");
  LossAndGradient out{0.0, codec.net.zeros_like()};
  const double scale = 1.0 / static_cast<double>(batch.size());
  const std::size_t depth = codec.net.layers.size();
  for (const GrayImage* img : batch) {
    const auto x = detail::normalized(*img);
    const auto acts = detail::forward_trace(codec.net, x);
    const auto& y = acts.back();
    std::vector<double> d_out(y.size());
    double sq = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double diff = y[i] - x[i];
      sq += diff * diff;
      d_out[i] = 2.0 * diff * scale;
    }
    out.loss += sq * scale;
    detail::backward(codec.net, acts, std::move(d_out), out.grad, 0, depth);
  }
  return out;
}

struct TrainConfig {
  std::size_t m = kDefaultLatentSize;
  std::vector<std::size_t> hidden{};
  double learning_rate = 0.05;
  std::size_t epochs = 100;
  std::size_t batch_size = 8;
  std::uint64_t seed = 7;
};

struct TrainResult {
  NeuralCodec model;
  std::vector<double> loss_trace;  // mean batch loss per epoch
};

namespace detail {

inline void check_dataset(std::span<const GrayImage> dataset) {
  if (dataset.empty()) fail(ErrorKind::InvalidArgument, "dataset is empty");
  for (const auto& img : dataset) {
    if (!img.same_shape(dataset.front())) fail(ErrorKind::ShapeMismatch, "dataset images differ in size");
  }
}

inline NeuralCodec initial_codec(std::span<const GrayImage> dataset, const TrainConfig& config,
                                 std::mt19937_64& rng) {
  NeuralCodec codec = make_neural_codec(dataset.front().width(), dataset.front().height(), config.m, config.hidden);
  xavier_init(codec.net, rng);
  return codec;
}

inline std::vector<std::vector<const GrayImage*>> epoch_batches(std::span<const GrayImage> dataset,
                                                                std::size_t batch_size, std::mt19937_64& rng) {
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle_indices(order, rng);
  const std::size_t bs = std::max<std::size_t>(batch_size, 1);
  std::vector<std::vector<const GrayImage*>> batches;
  for (std::size_t start = 0; start < order.size(); start += bs) {
    std::vector<const GrayImage*> batch;
    for (std::size_t i = start; i < std::min(order.size(), start + bs); ++i) batch.push_back(&dataset[order[i]]);
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace detail

/// Mini-batch SGD on the reconstruction loss. Deterministic for a fixed seed.
inline TrainResult train_autoencoder(std::span<const GrayImage> dataset, const TrainConfig& config) {
  detail::check_dataset(dataset);
  std::mt19937_64 rng(config.seed);
  TrainResult result{detail::initial_codec(dataset, config, rng), {}};
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto batches = detail::epoch_batches(dataset, config.batch_size, rng);
    double total = 0.0;
    for (const auto& batch : batches) {
      auto lg = reconstruction_loss_and_gradient(result.model, batch);
      if (!std::isfinite(lg.loss)) fail(ErrorKind::NonFiniteLoss, "reconstruction loss diverged");
      total += lg.loss;
      detail::sgd_step(result.model.net, lg.grad, config.learning_rate);
    }
    if (!all_finite(result.model.net)) fail(ErrorKind::NonFiniteLoss, "parameters diverged");
    result.loss_trace.push_back(total / static_cast<double>(batches.size()));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Adversarial objective.

inline constexpr double kProbabilityClamp = 1e-12;

inline double clamp_probability(double p) {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

/// mean(log D(real)) + mean(log(1 - D(fake))), natural log, probabilities clamped away from 0 and 1.
inline double gan_objective(std::span<const double> d_real, std::span<const double> d_fake) {
  if (d_real.empty() || d_fake.empty()) fail(ErrorKind::EmptyBatch, "discriminator batches must be non-empty");
  double real_sum = 0.0;
  for (double p : d_real) real_sum += std::log(clamp_probability(p));
  double fake_sum = 0.0;
  for (double p : d_fake) fake_sum += std::log(1.0 - clamp_probability(p));
  return real_sum / static_cast<double>(d_real.size()) + fake_sum / static_cast<double>(d_fake.size());
}

/// Image discriminator: N -> hidden (tanh) -> 1 (sigmoid).
inline Mlp make_discriminator(std::size_t inputs, std::span<const std::size_t> hidden) {
  Mlp d;
  std::size_t prev = inputs;
  for (std::size_t h : hidden) {
    if (h == 0) fail(ErrorKind::InvalidArgument, "hidden layer sizes must be >= 1");
    d.layers.emplace_back(prev, h, Activation::Tanh);
    prev = h;
  }
  d.layers.emplace_back(prev, 1, Activation::Sigmoid);
  return d;
}

inline double discriminate(const Mlp& disc, std::span<const double> unit_pixels) {
  return detail::forward_trace(disc, unit_pixels).back().front();
}

namespace detail {

// d/dz of log(p) and log(1 - p) for p = sigmoid(z); zero where the clamp is active.
inline double d_log_p(double p) { return p == clamp_probability(p) ? 1.0 - p : 0.0; }
inline double d_log_one_minus_p(double p) { return p == clamp_probability(p) ? -p : 0.0; }

// Chain rule through the sigmoid output layer: backward() multiplies by p(1-p),
// so the incoming derivative is divided by it first. When p(1-p) underflows the
// clamp is active and the gradient is zero anyway.
inline double through_sigmoid(double dz, double p) {
  const double slope = p * (1.0 - p);
  return slope > 0.0 ? dz / slope : 0.0;
}

}  // namespace detail

/// Gradient of the gan objective with respect to the discriminator's parameters
/// (for ascent), given real and fake inputs already scaled to [0, 1].
inline LossAndGradient discriminator_objective_and_gradient(const Mlp& disc,
                                                            std::span<const std::vector<double>> real,
                                                            std::span<const std::vector<double>> fake) {
  if (real.empty() || fake.empty()) fail(ErrorKind::EmptyBatch, "discriminator batches must be non-empty");
  LossAndGradient out{0.0, disc.zeros_like()};
  const std::size_t depth = disc.layers.size();
  std::vector<double> p_real, p_fake;
  for (const auto& x : real) {
    const auto acts = detail::forward_trace(disc, x);
    const double p = acts.back().front();
    p_real.push_back(p);
    const double dz = detail::d_log_p(p) / static_cast<double>(real.size());
    detail::backward(disc, acts, {detail::through_sigmoid(dz, p)}, out.grad, 0, depth);
  }
  for (const auto& x : fake) {
    const auto acts = detail::forward_trace(disc, x);
    const double p = acts.back().front();
    p_fake.push_back(p);
    const double dz = detail::d_log_one_minus_p(p) / static_cast<double>(fake.size());
    detail::backward(disc, acts, {detail::through_sigmoid(dz, p)}, out.grad, 0, depth);
  }
  out.loss = gan_objective(p_real, p_fake);
  return out;
}

/// Autoencoder objective with the saturating generator term:
///   mean_b [ sum_i (G(E(x_b))_i - x_b,i)^2 + lambda * log(1 - D(G(E(x_b)))) ]
/// The discriminator is held fixed.
inline LossAndGradient adversarial_autoencoder_loss_and_gradient(const NeuralCodec& codec, const Mlp& disc,
                                                                 double lambda,
                                                                 std::span<const GrayImage* const> batch) {
  if (batch.empty()) fail(ErrorKind::EmptyBatch, "batch is empty");
  LossAndGradient out{0.0, codec.net.zeros_like()};
  Mlp disc_scratch = disc.zeros_like();
  const double scale = 1.0 / static_cast<double>(batch.size());
  const std::size_t depth = codec.net.layers.size();
  for (const GrayImage* img : batch) {
    const auto x = detail::normalized(*img);
    const auto acts = detail::forward_trace(codec.net, x);
    const auto& y = acts.back();
    std::vector<double> d_out(y.size());
    double sq = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double diff = y[i] - x[i];
      sq += diff * diff;
      d_out[i] = 2.0 * diff * scale;
    }
    double adv = 0.0;
    if (lambda != 0.0) {
      const auto d_acts = detail::forward_trace(disc, y);
      const double p = d_acts.back().front();
      adv = std::log(1.0 - clamp_probability(p));
      const double dz = lambda * scale * detail::d_log_one_minus_p(p);
      const auto d_y = detail::backward(disc, d_acts, {detail::through_sigmoid(dz, p)}, disc_scratch, 0,
                                        disc.layers.size());
      for (std::size_t i = 0; i < y.size(); ++i) d_out[i] += d_y[i];
    }
    out.loss += (sq + lambda * adv) * scale;
    detail::backward(codec.net, acts, std::move(d_out), out.grad, 0, depth);
  }
  return out;
}

struct AdversarialConfig {
  TrainConfig base{};
  std::vector<std::size_t> disc_hidden{16};
  double disc_learning_rate = 0.05;
  double lambda = 0.1;  // weight of the generator term, in [0, 1]
};

struct AdversarialResult {
  NeuralCodec model;
  Mlp discriminator;
  std::vector<double> loss_trace;       // autoencoder objective, mean per epoch
  std::vector<double> objective_trace;  // gan objective seen by the discriminator, mean per epoch
};

inline constexpr std::uint64_t kDiscriminatorSeedTweak = 0x9e3779b97f4a7c15ULL;

/// Alternating updates per mini-batch: the discriminator ascends the gan
/// objective on (real, reconstructed), then the autoencoder descends its
/// reconstruction loss plus lambda times the generator term. The autoencoder's
/// random stream is identical to train_autoencoder's, so lambda = 0
/// reproduces it exactly.
inline AdversarialResult train_adversarial(std::span<const GrayImage> dataset, const AdversarialConfig& config) {
  detail::check_dataset(dataset);
  if (!(config.lambda >= 0.0 && config.lambda <= 1.0)) fail(ErrorKind::InvalidArgument, "lambda must lie in [0, 1]");
  std::mt19937_64 rng(config.base.seed);
  std::mt19937_64 disc_rng(config.base.seed ^ kDiscriminatorSeedTweak);
  AdversarialResult result{detail::initial_codec(dataset, config.base, rng), {}, {}, {}};
  result.discriminator = make_discriminator(dataset.front().size(), config.disc_hidden);
  detail::xavier_init(result.discriminator, disc_rng);

  for (std::size_t epoch = 0; epoch < config.base.epochs; ++epoch) {
    const auto batches = detail::epoch_batches(dataset, config.base.batch_size, rng);
    double ae_total = 0.0;
    double gan_total = 0.0;
    for (const auto& batch : batches) {
      std::vector<std::vector<double>> real, fake;
      for (const GrayImage* img : batch) {
        real.push_back(detail::normalized(*img));
        fake.push_back(detail::forward_trace(result.model.net, real.back()).back());
      }
      auto dg = discriminator_objective_and_gradient(result.discriminator, real, fake);
      if (!std::isfinite(dg.loss)) fail(ErrorKind::NonFiniteLoss, "gan objective diverged");
      detail::sgd_step(result.discriminator, dg.grad, -config.disc_learning_rate);
      gan_total += dg.loss;

      auto lg = config.lambda == 0.0
                    ? reconstruction_loss_and_gradient(result.model, batch)
                    : adversarial_autoencoder_loss_and_gradient(result.model, result.discriminator, config.lambda,
                                                                batch);
      if (!std::isfinite(lg.loss)) fail(ErrorKind::NonFiniteLoss, "autoencoder loss diverged");
      detail::sgd_step(result.model.net, lg.grad, config.base.learning_rate);
      ae_total += lg.loss;
    }
    if (!all_finite(result.model.net) || !all_finite(result.discriminator)) {
      fail(ErrorKind::NonFiniteLoss, "parameters diverged");
    }
    result.loss_trace.push_back(ae_total / static_cast<double>(batches.size()));
    result.objective_trace.push_back(gan_total / static_cast<double>(batches.size()));
  }
  return result;
}

/// Fraction of correct calls on real images (label 1) and their codec reconstructions (label 0).
inline double discriminator_accuracy(const NeuralCodec& codec, const Mlp& disc, std::span<const GrayImage> images) {
  if (images.empty()) fail(ErrorKind::EmptyBatch, "no images to score");
  std::size_t correct = 0;
  for (const auto& img : images) {
    if (discriminate(disc, detail::normalized(img)) >= 0.5) ++correct;
    const GrayImage recon = neural_decode(codec, neural_encode(codec, img));
    if (discriminate(disc, detail::normalized(recon)) < 0.5) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(2 * images.size());
}

}  // namespace latentseal
