/*
 * Copyright 2026 The zdce Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "zdce/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace zdce {

namespace fs = std::filesystem;

namespace {

constexpr char kWeightsMagic[4] = {'Z', 'D', 'C', 'E'};
constexpr char kAdamMagic[4] = {'Z', 'D', 'C', 'A'};

class Writer {
public:
  void magic(const char (&m)[4]) { bytes_.insert(bytes_.end(), m, m + 4); }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void f32(float v) { put(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
  template <typename U> void put(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i)
      bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> bytes_;
};

class Reader {
public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

  bool magic(const char (&m)[4]) {
    need(4, "magic");
    const bool ok = std::memcmp(bytes_.data() + pos_, m, 4) == 0;
    pos_ += 4;
    return ok;
  }
  std::uint32_t u32(const char* what) { return get<std::uint32_t>(what); }
  std::uint64_t u64(const char* what) { return get<std::uint64_t>(what); }
  float f32(const char* what) {
    return std::bit_cast<float>(get<std::uint32_t>(what));
  }
  double f64(const char* what) {
    return std::bit_cast<double>(get<std::uint64_t>(what));
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  void need(std::size_t n, const char* what) const {
    if (remaining() < n)
      throw FormatError(FormatErrc::shape_mismatch,
                        std::string("file truncated while reading ") + what);
  }

private:
  template <typename U> U get(const char* what) {
    need(sizeof(U), what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
      v |= static_cast<U>(bytes_[pos_ + i]) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void write_header(Writer& w, const char (&magic)[4], const ArchConfig& arch,
                  std::size_t layers) {
  w.magic(magic);
  w.u32(kWeightsFormatVersion);
  w.u32(static_cast<std::uint32_t>(arch.depth));
  w.u32(static_cast<std::uint32_t>(arch.width));
  w.u32(static_cast<std::uint32_t>(arch.n_iter));
  w.u32(static_cast<std::uint32_t>(layers));
}

void write_layer(Writer& w, const ConvLayer& l) {
  const Shape& k = l.kernel.shape();
  w.u32(static_cast<std::uint32_t>(k.n));
  w.u32(static_cast<std::uint32_t>(k.c));
  w.u32(static_cast<std::uint32_t>(k.h));
  w.u32(static_cast<std::uint32_t>(k.w));
  for (Real v : l.kernel.data())
    w.f32(static_cast<float>(v));
  w.u32(static_cast<std::uint32_t>(l.bias.size()));
  for (Real v : l.bias.data())
    w.f32(static_cast<float>(v));
}

// Returns the architecture after checking magic, version and layer count.
ArchConfig read_header(Reader& r, const char (&magic)[4], const char* kind) {
  if (!r.magic(magic))
    throw FormatError(FormatErrc::bad_magic,
                      std::string("not a ") + kind + " file");
  const std::uint32_t version = r.u32("version");
  if (version != kWeightsFormatVersion)
    throw FormatError(FormatErrc::bad_version,
                      "version " + std::to_string(version) + ", expected " +
                          std::to_string(kWeightsFormatVersion));
  ArchConfig arch;
  arch.depth = static_cast<int>(r.u32("depth"));
  arch.width = static_cast<int>(r.u32("width"));
  arch.n_iter = static_cast<int>(r.u32("n_iter"));
  try {
    arch.validate();
  } catch (const ConfigError& e) {
    throw FormatError(FormatErrc::bad_header,
                      std::string("architecture: ") + e.what());
  }
  const std::uint32_t layers = r.u32("layer count");
  if (static_cast<int>(layers) != arch.depth)
    throw FormatError(FormatErrc::shape_mismatch,
                      "layer count " + std::to_string(layers) +
                          " for architecture " + arch.str());
  return arch;
}

ConvLayer read_layer(Reader& r, const LayerSpec& spec, std::size_t index) {
  const std::string where = "layer " + std::to_string(index + 1);
  Shape k;
  k.n = static_cast<int>(r.u32("kernel shape"));
  k.c = static_cast<int>(r.u32("kernel shape"));
  k.h = static_cast<int>(r.u32("kernel shape"));
  k.w = static_cast<int>(r.u32("kernel shape"));
  const Shape want{spec.out_channels, spec.in_channels, 3, 3};
  if (k != want)
    throw FormatError(FormatErrc::shape_mismatch,
                      where + " kernel " + k.str() + ", expected " +
                          want.str());
  r.need(k.numel() * 4, "kernel data");
  ConvLayer l{Tensor(k), Tensor(Shape{spec.out_channels, 1, 1, 1})};
  for (Real& v : l.kernel.data())
    v = static_cast<Real>(r.f32("kernel data"));
  const std::uint32_t bias_len = r.u32("bias length");
  if (static_cast<int>(bias_len) != spec.out_channels)
    throw FormatError(FormatErrc::shape_mismatch,
                      where + " bias length " + std::to_string(bias_len) +
                          ", expected " + std::to_string(spec.out_channels));
  for (Real& v : l.bias.data())
    v = static_cast<Real>(r.f32("bias data"));
  return l;
}

void expect_end(const Reader& r) {
  if (r.remaining() != 0)
    throw FormatError(FormatErrc::shape_mismatch,
                      std::to_string(r.remaining()) +
                          " trailing bytes after declared contents");
}

} // namespace

std::vector<std::uint8_t> encode_weights(const NetworkWeights& w) {
  Writer out;
  write_header(out, kWeightsMagic, w.arch, w.layers.size());
  for (const ConvLayer& l : w.layers)
    write_layer(out, l);
  return out.take();
}

NetworkWeights decode_weights(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  NetworkWeights w;
  w.arch = read_header(r, kWeightsMagic, "weights");
  const std::vector<LayerSpec> specs = topology(w.arch);
  for (std::size_t i = 0; i < specs.size(); ++i)
    w.layers.push_back(read_layer(r, specs[i], i));
  expect_end(r);
  return w;
}

std::vector<std::uint8_t> encode_optimizer_state(const Checkpoint& ckpt) {
  const AdamState& s = ckpt.adam;
  if (s.m.size() != ckpt.weights.layers.size() || s.v.size() != s.m.size())
    throw ContractError("optimizer state does not match weights");
  Writer out;
  write_header(out, kAdamMagic, ckpt.weights.arch, s.m.size());
  out.u64(s.step);
  out.f64(s.config.lr);
  out.f64(s.config.beta1);
  out.f64(s.config.beta2);
  out.f64(s.config.eps);
  for (std::size_t i = 0; i < s.m.size(); ++i) {
    write_layer(out, s.m[i]);
    write_layer(out, s.v[i]);
  }
  out.u64(ckpt.step);
  out.f64(ckpt.running.l_spa);
  out.f64(ckpt.running.l_exp);
  out.f64(ckpt.running.l_col);
  out.f64(ckpt.running.l_tv);
  out.f64(ckpt.running.total);
  return out.take();
}

void decode_optimizer_state(std::span<const std::uint8_t> bytes,
                            Checkpoint& ckpt) {
  Reader r(bytes);
  const ArchConfig arch = read_header(r, kAdamMagic, "optimizer-state");
  if (!ckpt.weights.layers.empty() && !(arch == ckpt.weights.arch))
    throw FormatError(FormatErrc::shape_mismatch,
                      "optimizer state is for " + arch.str() +
                          ", weights are " + ckpt.weights.arch.str());
  AdamState s;
  s.step = r.u64("adam step");
  s.config.lr = r.f64("lr");
  s.config.beta1 = r.f64("beta1");
  s.config.beta2 = r.f64("beta2");
  s.config.eps = r.f64("eps");
  const std::vector<LayerSpec> specs = topology(arch);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    s.m.push_back(read_layer(r, specs[i], i));
    s.v.push_back(read_layer(r, specs[i], i));
  }
  ckpt.step = r.u64("checkpoint step");
  ckpt.running.l_spa = r.f64("running l_spa");
  ckpt.running.l_exp = r.f64("running l_exp");
  ckpt.running.l_col = r.f64("running l_col");
  ckpt.running.l_tv = r.f64("running l_tv");
  ckpt.running.total = r.f64("running total");
  expect_end(r);
  ckpt.adam = std::move(s);
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw IoError("write failed for " + path.string());
}

void save_weights(const NetworkWeights& w, const fs::path& path) {
  write_bytes(path, encode_weights(w));
}

NetworkWeights load_weights(const fs::path& path) {
  return decode_weights(read_bytes(path));
}

fs::path optimizer_state_path(const fs::path& weights) {
  fs::path p = weights;
  p.replace_extension(".adam");
  return p;
}

void save_checkpoint(const Checkpoint& ckpt, const fs::path& path) {
  save_weights(ckpt.weights, path);
  write_bytes(optimizer_state_path(path), encode_optimizer_state(ckpt));
}

Checkpoint load_checkpoint(const fs::path& path) {
  Checkpoint ckpt;
  ckpt.weights = load_weights(path);
  decode_optimizer_state(read_bytes(optimizer_state_path(path)), ckpt);
  return ckpt;
}

} // namespace zdce
