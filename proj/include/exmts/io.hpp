// Copyright 2026 The exmts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Binary dataset and model files.
//
// All integers are little-endian; reals are IEEE-754 binary64, little-endian.
// Strings are a u64 byte count followed by UTF-8 bytes. Both files end with
// a u64 FNV-1a digest of every preceding byte.
//
// Dataset file
//   magic      8 bytes  "EXMTSDS\0"
//   version    u32      kDatasetVersion
//   hash       u64      preprocessing config hash
//   config     string   preprocessing config (JSON)
//   C          u64, then C channel-name strings
//   L          u64
//   N          u64, then N samples:
//                label u8, participant string, clip string, rep_index u64,
//                C*L f64 (channel-major)
//   digest     u64
//
// Model file
//   magic      8 bytes  "EXMTSMD\0"
//   version    u32      kModelVersion
//   hash       u64      preprocessing hash of the training data
//   config     string   full pipeline config (JSON)
//   C          u64, then C channel-name strings
//   L          u64
//   transform  u8 kind (0 ROCKET, 1 MiniROCKET), then
//     ROCKET:     rng-algorithm string, seed u64, K u64, C u64, T u64,
//                 bank checksum u64 (the bank is regenerated on load)
//     MiniROCKET: seed u64, C u64, T u64, normalize u8,
//                 dilations (u64 count + u64s), features_per_dilation (same),
//                 combinations (u64 count, each u64 count + u64s),
//                 fit_samples (u64 count + u64s), quantiles and biases
//                 (u64 count + f64s each)
//   scaler     F u64, F f64 means, F f64 scales
//   ridge      n_alpha u64, alphas f64, loo errors f64, chosen alpha f64,
//              K u64, K i32 labels, F*K f64 weights (feature-major),
//              K f64 intercepts
//   digest     u64

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "exmts/config.hpp"
#include "exmts/error.hpp"
#include "exmts/pipeline.hpp"
#include "exmts/rng.hpp"

namespace exmts {

inline constexpr std::array<char, 8> kDatasetMagic = {'E', 'X', 'M', 'T', 'S', 'D', 'S', '\0'};
inline constexpr std::array<char, 8> kModelMagic = {'E', 'X', 'M', 'T', 'S', 'M', 'D', '\0'};
inline constexpr std::uint32_t kDatasetVersion = 1;
inline constexpr std::uint32_t kModelVersion = 1;

class ByteWriter {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const char*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u64(s.size());
    raw(s.data(), s.size());
  }
  void sizes(const std::vector<std::size_t>& v) {
    u64(v.size());
    for (auto x : v) u64(x);
  }
  void reals(const std::vector<double>& v) {
    u64(v.size());
    for (auto x : v) f64(x);
  }
  void finish() {
    Fnv1a h;
    h.update(buf_.data(), buf_.size());
    u64(h.digest());
  }
  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : data_(bytes) {}

  void raw(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t count(std::size_t element_size) {
    const auto n = u64();
    if (element_size > 0 && n > (data_.size() - pos_) / element_size)
      fail(ErrorKind::FormatError, "truncated or corrupt file (count " + std::to_string(n) + ")");
    return static_cast<std::size_t>(n);
  }
  std::string str() {
    const auto n = count(1);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::vector<std::size_t> sizes() {
    std::vector<std::size_t> v(count(8));
    for (auto& x : v) x = static_cast<std::size_t>(u64());
    return v;
  }
  std::vector<double> reals() {
    std::vector<double> v(count(8));
    for (auto& x : v) x = f64();
    return v;
  }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail(ErrorKind::FormatError, "truncated file");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

namespace detail {

/// Checks magic, trailing digest and version; returns a reader positioned
/// after the version field.
inline ByteReader open_container(std::string_view bytes, const std::array<char, 8>& magic,
                                 std::uint32_t version, std::string_view what) {
  if (bytes.size() < magic.size() + 4 + 8 || std::memcmp(bytes.data(), magic.data(), magic.size()) != 0)
    fail(ErrorKind::FormatError, "not a " + std::string(what) + " file (bad magic bytes)");
  ByteReader tail(bytes.substr(bytes.size() - 8));
  Fnv1a h;
  h.update(bytes.data(), bytes.size() - 8);
  if (tail.u64() != h.digest()) fail(ErrorKind::FormatError, std::string(what) + " file is corrupt (digest mismatch)");
  ByteReader r(bytes.substr(0, bytes.size() - 8));
  char skip[8];
  r.raw(skip, 8);
  const auto v = r.u32();
  if (v != version)
    fail(ErrorKind::FormatError, std::string(what) + " file format version " + std::to_string(v) +
                                     " is not supported (expected " + std::to_string(version) + ")");
  return r;
}

inline void expect_end(const ByteReader& r, std::string_view what) {
  if (r.remaining() != 0) fail(ErrorKind::FormatError, std::string(what) + " file has trailing bytes");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dataset files

inline std::string encode_dataset(const Dataset& d, const nlohmann::json& preprocessing_config) {
  d.validate();
  ByteWriter w;
  w.raw(kDatasetMagic.data(), kDatasetMagic.size());
  w.u32(kDatasetVersion);
  w.u64(d.config_hash);
  w.str(preprocessing_config.dump());
  w.u64(d.channel_names.size());
  for (const auto& n : d.channel_names) w.str(n);
  w.u64(d.length);
  w.u64(d.samples.size());
  for (const auto& s : d.samples) {
    w.u8(static_cast<std::uint8_t>(s.label));
    w.str(s.participant_id);
    w.str(s.clip_id);
    w.u64(s.rep_index);
    for (double v : s.series.data()) w.f64(v);
  }
  w.finish();
  return w.bytes();
}

struct DatasetFile {
  Dataset dataset;
  nlohmann::json config;  ///< preprocessing config recorded at ingest
};

inline DatasetFile decode_dataset(std::string_view bytes) {
  auto r = detail::open_container(bytes, kDatasetMagic, kDatasetVersion, "dataset");
  DatasetFile f;
  f.dataset.config_hash = r.u64();
  try {
    f.config = nlohmann::json::parse(r.str());
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::FormatError, "dataset file has an unreadable config");
  }
  const auto C = r.count(8);
  for (std::size_t c = 0; c < C; ++c) f.dataset.channel_names.push_back(r.str());
  f.dataset.length = static_cast<std::size_t>(r.u64());
  const auto N = r.count(1);
  const std::size_t values = C * f.dataset.length;
  for (std::size_t i = 0; i < N; ++i) {
    RepetitionSample s;
    const auto label = r.u8();
    if (label >= kNumClasses) fail(ErrorKind::FormatError, "dataset file has an invalid class label");
    s.label = static_cast<ExerciseClass>(label);
    s.participant_id = r.str();
    s.clip_id = r.str();
    s.rep_index = static_cast<std::size_t>(r.u64());
    if (r.remaining() / 8 < values) fail(ErrorKind::FormatError, "truncated dataset file");
    s.series = MultivariateSeries(f.dataset.channel_names, f.dataset.length);
    for (auto& v : s.series.data()) v = r.f64();
    f.dataset.samples.push_back(std::move(s));
  }
  detail::expect_end(r, "dataset");
  return f;
}

inline void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

inline std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void save_dataset(const std::filesystem::path& path, const Dataset& d, const nlohmann::json& config) {
  write_bytes(path, encode_dataset(d, config));
}

inline DatasetFile load_dataset(const std::filesystem::path& path) { return decode_dataset(read_bytes(path)); }

// ---------------------------------------------------------------------------
// Model files

inline std::string encode_model(const TrainedModel& m) {
  ByteWriter w;
  w.raw(kModelMagic.data(), kModelMagic.size());
  w.u32(kModelVersion);
  w.u64(m.config_hash);
  w.str(to_json(m.config).dump());
  w.u64(m.channel_names.size());
  for (const auto& n : m.channel_names) w.str(n);
  w.u64(m.length);
  if (const auto* bank = std::get_if<KernelBank>(&m.transform)) {
    w.u8(0);
    w.str(Rng::kAlgorithm);
    w.u64(bank->seed);
    w.u64(bank->kernels.size());
    w.u64(bank->num_channels);
    w.u64(bank->input_length);
    w.u64(bank->checksum());
  } else {
    const auto& p = std::get<MiniRocketParams>(m.transform);
    w.u8(1);
    w.u64(p.seed);
    w.u64(p.num_channels);
    w.u64(p.input_length);
    w.u8(p.normalize_input ? 1 : 0);
    w.sizes(p.dilations);
    w.sizes(p.features_per_dilation);
    w.u64(p.channel_combinations.size());
    for (const auto& c : p.channel_combinations) w.sizes(c);
    w.sizes(p.fit_samples);
    w.reals(p.quantiles);
    w.reals(p.biases);
  }
  const auto F = static_cast<std::size_t>(m.scaler.mean.size());
  w.u64(F);
  for (std::size_t j = 0; j < F; ++j) w.f64(m.scaler.mean(static_cast<Eigen::Index>(j)));
  for (std::size_t j = 0; j < F; ++j) w.f64(m.scaler.scale(static_cast<Eigen::Index>(j)));
  w.reals(m.ridge.alphas);
  w.reals(m.ridge.loo_errors);
  w.f64(m.ridge.alpha);
  w.u64(m.ridge.classes.size());
  for (int c : m.ridge.classes) w.i32(c);
  for (Eigen::Index f = 0; f < m.ridge.weights.rows(); ++f)
    for (Eigen::Index k = 0; k < m.ridge.weights.cols(); ++k) w.f64(m.ridge.weights(f, k));
  for (Eigen::Index k = 0; k < m.ridge.intercept.size(); ++k) w.f64(m.ridge.intercept(k));
  w.finish();
  return w.bytes();
}

inline TrainedModel decode_model(std::string_view bytes) {
  auto r = detail::open_container(bytes, kModelMagic, kModelVersion, "model");
  TrainedModel m;
  m.config_hash = r.u64();
  try {
    m.config = config_from_json(nlohmann::json::parse(r.str()));
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::FormatError, "model file has an unreadable config");
  }
  const auto C = r.count(8);
  for (std::size_t c = 0; c < C; ++c) m.channel_names.push_back(r.str());
  m.length = static_cast<std::size_t>(r.u64());
  const auto kind = r.u8();
  if (kind == 0) {
    const auto algorithm = r.str();
    if (algorithm != Rng::kAlgorithm)
      fail(ErrorKind::FormatError, "model uses RNG algorithm '" + algorithm + "', this build provides '" +
                                       std::string(Rng::kAlgorithm) + "'");
    const auto seed = r.u64();
    const auto K = static_cast<std::size_t>(r.u64());
    const auto bc = static_cast<std::size_t>(r.u64());
    const auto bt = static_cast<std::size_t>(r.u64());
    const auto checksum = r.u64();
    if (K == 0 || K > (std::size_t{1} << 24)) fail(ErrorKind::FormatError, "implausible kernel count");
    auto bank = generate_kernels(K, bc, bt, seed);
    if (bank.checksum() != checksum)
      fail(ErrorKind::FormatError, "regenerated kernel bank does not match the stored checksum");
    m.transform = std::move(bank);
  } else if (kind == 1) {
    MiniRocketParams p;
    p.seed = r.u64();
    p.num_channels = static_cast<std::size_t>(r.u64());
    p.input_length = static_cast<std::size_t>(r.u64());
    p.normalize_input = r.u8() != 0;
    p.dilations = r.sizes();
    p.features_per_dilation = r.sizes();
    p.channel_combinations.resize(r.count(8));
    for (auto& c : p.channel_combinations) {
      c = r.sizes();
      for (auto ch : c)
        if (ch >= p.num_channels) fail(ErrorKind::FormatError, "MiniROCKET channel index out of range");
    }
    p.fit_samples = r.sizes();
    p.quantiles = r.reals();
    p.biases = r.reals();
    std::size_t total = 0;
    for (auto n : p.features_per_dilation) total += n;
    if (p.dilations.size() != p.features_per_dilation.size() ||
        p.channel_combinations.size() != p.dilations.size() * minirocket::kNumKernels ||
        p.biases.size() != total * minirocket::kNumKernels)
      fail(ErrorKind::FormatError, "inconsistent MiniROCKET parameters");
    m.transform = std::move(p);
  } else {
    fail(ErrorKind::FormatError, "unknown transform kind " + std::to_string(kind));
  }
  const auto F = r.count(16);
  m.scaler.mean.resize(static_cast<Eigen::Index>(F));
  m.scaler.scale.resize(static_cast<Eigen::Index>(F));
  for (std::size_t j = 0; j < F; ++j) m.scaler.mean(static_cast<Eigen::Index>(j)) = r.f64();
  for (std::size_t j = 0; j < F; ++j) m.scaler.scale(static_cast<Eigen::Index>(j)) = r.f64();
  m.ridge.alphas = r.reals();
  m.ridge.loo_errors = r.reals();
  m.ridge.alpha = r.f64();
  const auto K = r.count(4);
  for (std::size_t k = 0; k < K; ++k) m.ridge.classes.push_back(r.i32());
  if (r.remaining() / 8 < F * K + K) fail(ErrorKind::FormatError, "truncated model file");
  m.ridge.weights.resize(static_cast<Eigen::Index>(F), static_cast<Eigen::Index>(K));
  for (Eigen::Index f = 0; f < m.ridge.weights.rows(); ++f)
    for (Eigen::Index k = 0; k < m.ridge.weights.cols(); ++k) m.ridge.weights(f, k) = r.f64();
  m.ridge.intercept.resize(static_cast<Eigen::Index>(K));
  for (Eigen::Index k = 0; k < m.ridge.intercept.size(); ++k) m.ridge.intercept(k) = r.f64();
  detail::expect_end(r, "model");
  return m;
}

inline void save_model(const std::filesystem::path& path, const TrainedModel& m) { write_bytes(path, encode_model(m)); }

inline TrainedModel load_model(const std::filesystem::path& path) { return decode_model(read_bytes(path)); }

}  // namespace exmts
