#pragma once

// A CodecModel is either the DCT reference codec or a trained neural codec.
//
// Model file (little-endian):
//   "LSCM" | version u8 | kind u8 | width u32 | height u32 | ...
//   kind 1 (dct):    m u32
//   kind 2 (neural): encoder_layers u32 | layer_count u32 | dims u32 x (layer_count + 1)
//                    then per layer: weights f64 (out x in, row-major), bias f64 x out
// Layer activations are implied by position (tanh hidden, identity
// bottleneck, sigmoid output).

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <variant>

#include "latentseal/dct_codec.hpp"
#include "latentseal/error.hpp"
#include "latentseal/file_io.hpp"
#include "latentseal/image.hpp"
#include "latentseal/latent.hpp"
#include "latentseal/neural_codec.hpp"

namespace latentseal {

enum class CodecKind : std::uint8_t { Dct = 1, Neural = 2 };

struct DctCodec {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t m = kDefaultLatentSize;
  bool operator==(const DctCodec&) const = default;
};

class CodecModel {
 public:
  CodecModel(DctCodec dct) : impl_(dct) {  // NOLINT(google-explicit-constructor)
    if (dct.width == 0 || dct.height == 0 || dct.m == 0) fail(ErrorKind::InvalidArgument, "bad DCT codec shape");
    if (dct.m > dct.width * dct.height) fail(ErrorKind::MTooLarge, "m exceeds width*height");
  }
  CodecModel(NeuralCodec neural) : impl_(std::move(neural)) {  // NOLINT(google-explicit-constructor)
    validate(std::get<NeuralCodec>(impl_));
  }

  CodecKind kind() const noexcept { return impl_.index() == 0 ? CodecKind::Dct : CodecKind::Neural; }
  std::uint8_t codec_id() const noexcept { return static_cast<std::uint8_t>(kind()); }

  std::size_t width() const {
    return std::visit([](const auto& c) { return c.width; }, impl_);
  }
  std::size_t height() const {
    return std::visit([](const auto& c) { return c.height; }, impl_);
  }
  std::size_t latent_size() const {
    if (const auto* d = std::get_if<DctCodec>(&impl_)) return d->m;
    return std::get<NeuralCodec>(impl_).latent_size();
  }

  const DctCodec* dct() const noexcept { return std::get_if<DctCodec>(&impl_); }
  const NeuralCodec* neural() const noexcept { return std::get_if<NeuralCodec>(&impl_); }

  LatentVector encode(const GrayImage& img) const {
    if (img.width() != width() || img.height() != height()) {
      fail(ErrorKind::ShapeMismatch, "image is " + std::to_string(img.width()) + "x" +
                                         std::to_string(img.height()) + ", codec expects " +
                                         std::to_string(width()) + "x" + std::to_string(height()));
    }
    if (const auto* d = dct()) return dct_encode(img, d->m);
    return neural_encode(*neural(), img);
  }

  GrayImage decode(const LatentVector& v) const {
    if (v.size() != latent_size()) fail(ErrorKind::ShapeMismatch, "latent length does not match the codec");
    if (const auto* d = dct()) return dct_decode(v, d->width, d->height);
    return neural_decode(*neural(), v);
  }

  bool operator==(const CodecModel&) const = default;

 private:
  std::variant<DctCodec, NeuralCodec> impl_;
};

inline constexpr std::uint8_t kModelFileVersion = 1;

namespace detail {

class LeWriter {
 public:
  void bytes(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::size_t value) {
    if (value > 0xffffffffu) fail(ErrorKind::InvalidArgument, "value does not fit in u32");
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class LeReader {
 public:
  explicit LeReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (data_.size() - pos_ < n) fail(ErrorKind::Format, "model file is truncated");
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    auto s = take(4);
    return static_cast<std::uint32_t>(s[0]) | static_cast<std::uint32_t>(s[1]) << 8 |
           static_cast<std::uint32_t>(s[2]) << 16 | static_cast<std::uint32_t>(s[3]) << 24;
  }
  double f64() {
    auto s = take(8);
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | s[static_cast<std::size_t>(i)];
    return std::bit_cast<double>(bits);
  }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Bytes serialize_model(const CodecModel& model) {
  detail::LeWriter w;
  w.bytes("LSCM");
  w.u8(kModelFileVersion);
  w.u8(model.codec_id());
  w.u32(model.width());
  w.u32(model.height());
  if (const auto* d = model.dct()) {
    w.u32(d->m);
    return w.take();
  }
  const NeuralCodec& n = *model.neural();
  w.u32(n.encoder_layers);
  w.u32(n.net.layers.size());
  w.u32(n.net.layers.front().inputs);
  for (const auto& l : n.net.layers) w.u32(l.outputs);
  for (const auto& l : n.net.layers) {
    for (double v : l.weights) w.f64(v);
    for (double v : l.bias) w.f64(v);
  }
  return w.take();
}

inline CodecModel deserialize_model(std::span<const std::uint8_t> data) {
  detail::LeReader r(data);
  const auto magic = r.take(4);
  if (std::memcmp(magic.data(), "LSCM", 4) != 0) fail(ErrorKind::Format, "not a model file (bad magic)");
  if (r.u8() != kModelFileVersion) fail(ErrorKind::Format, "unsupported model file version");
  const std::uint8_t kind = r.u8();
  const std::size_t width = r.u32();
  const std::size_t height = r.u32();

  if (kind == static_cast<std::uint8_t>(CodecKind::Dct)) {
    DctCodec d{width, height, r.u32()};
    if (r.remaining() != 0) fail(ErrorKind::Format, "trailing bytes in model file");
    return CodecModel(d);
  }
  if (kind != static_cast<std::uint8_t>(CodecKind::Neural)) fail(ErrorKind::Format, "unknown codec kind");

  NeuralCodec n{width, height, r.u32(), {}};
  const std::size_t layer_count = r.u32();
  if (layer_count < 2 || layer_count > 64 || n.encoder_layers == 0 || n.encoder_layers >= layer_count) {
    fail(ErrorKind::Format, "implausible layer layout");
  }
  std::vector<std::size_t> dims(layer_count + 1);
  for (auto& d : dims) d = r.u32();
  for (std::size_t k = 0; k < layer_count; ++k) {
    // Reject before allocating: each parameter needs 8 bytes of file.
    if (dims[k] == 0 || dims[k + 1] == 0 || dims[k] * dims[k + 1] > r.remaining() / 8) {
      fail(ErrorKind::Format, "layer dimensions exceed file size");
    }
    Activation act = Activation::Tanh;
    if (k + 1 == n.encoder_layers) act = Activation::Identity;
    if (k + 1 == layer_count) act = Activation::Sigmoid;
    DenseLayer layer(dims[k], dims[k + 1], act);
    for (double& v : layer.weights) v = r.f64();
    for (double& v : layer.bias) v = r.f64();
    n.net.layers.push_back(std::move(layer));
  }
  if (r.remaining() != 0) fail(ErrorKind::Format, "trailing bytes in model file");
  try {
    return CodecModel(std::move(n));
  } catch (const Error& e) {
    fail(ErrorKind::Format, std::string("invalid neural model: ") + e.what());
  }
}

inline CodecModel load_model(const std::filesystem::path& path) { return deserialize_model(read_file(path)); }

inline void save_model(const std::filesystem::path& path, const CodecModel& model) {
  write_file_atomic(path, serialize_model(model));
}

}  // namespace latentseal
