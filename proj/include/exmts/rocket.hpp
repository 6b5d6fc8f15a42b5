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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "exmts/error.hpp"
#include "exmts/features.hpp"
#include "exmts/parallel.hpp"
#include "exmts/rng.hpp"
#include "exmts/series.hpp"
#include "exmts/series_prep.hpp"

namespace exmts {

/// One random dilated kernel over a subset of the input channels. The
/// per-channel weight rows are mean-centred; their responses are summed.
struct RocketKernel {
  std::size_t length = 9;
  std::size_t dilation = 1;
  std::size_t padding = 0;  ///< zeros added on each side
  double bias = 0.0;
  std::vector<std::size_t> channels;
  std::vector<double> weights;  ///< channels.size() rows of `length` taps

  std::span<const double> channel_weights(std::size_t k) const {
    return {weights.data() + k * length, length};
  }

  /// Number of convolution outputs for an input of length T.
  std::size_t output_length(std::size_t T) const {
    const std::size_t span = (length - 1) * dilation;
    return T + 2 * padding > span ? T + 2 * padding - span : 0;
  }

  friend bool operator==(const RocketKernel&, const RocketKernel&) = default;
};

struct KernelBank {
  std::uint64_t seed = 0;
  std::size_t num_channels = 0;
  std::size_t input_length = 0;
  std::vector<RocketKernel> kernels;

  std::size_t num_features() const { return 2 * kernels.size(); }

  /// Digest over every kernel parameter, for regeneration checks.
  std::uint64_t checksum() const {
    Fnv1a h;
    h.update_u64(seed);
    h.update_u64(num_channels);
    h.update_u64(input_length);
    for (const auto& k : kernels) {
      h.update_u64(k.length);
      h.update_u64(k.dilation);
      h.update_u64(k.padding);
      h.update_f64(k.bias);
      for (auto c : k.channels) h.update_u64(c);
      for (auto w : k.weights) h.update_f64(w);
    }
    return h.digest();
  }

  friend bool operator==(const KernelBank&, const KernelBank&) = default;
};

/// Random kernels: length from {7,9,11}; a uniformly sized random channel
/// subset; N(0,1) weights centred per channel; bias U[-1,1]; dilation
/// floor(2^u), u ~ U[0, log2((T-1)/(length-1))]; zero padding on a coin flip.
inline KernelBank generate_kernels(std::size_t num_kernels, std::size_t num_channels,
                                   std::size_t input_length, std::uint64_t seed) {
  if (num_kernels == 0 || num_channels == 0 || input_length < 12)
    fail(ErrorKind::InvalidParams, "generate_kernels needs K >= 1, C >= 1, T >= 12");
  static constexpr std::size_t kLengths[] = {7, 9, 11};
  Rng rng(seed);
  KernelBank bank{seed, num_channels, input_length, {}};
  bank.kernels.reserve(num_kernels);
  for (std::size_t i = 0; i < num_kernels; ++i) {
    RocketKernel k;
    k.length = kLengths[rng.below(3)];
    const auto n_ch = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(num_channels)));
    k.channels = rng.choose(num_channels, n_ch);
    std::sort(k.channels.begin(), k.channels.end());
    k.weights.resize(n_ch * k.length);
    for (std::size_t c = 0; c < n_ch; ++c) {
      double* row = k.weights.data() + c * k.length;
      double mean = 0.0;
      for (std::size_t j = 0; j < k.length; ++j) mean += (row[j] = rng.normal());
      mean /= static_cast<double>(k.length);
      for (std::size_t j = 0; j < k.length; ++j) row[j] -= mean;
    }
    k.bias = rng.uniform(-1.0, 1.0);
    const double max_exp = std::log2(static_cast<double>(input_length - 1) /
                                     static_cast<double>(k.length - 1));
    k.dilation = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(std::exp2(rng.uniform(0.0, max_exp)))));
    while ((k.length - 1) * k.dilation > input_length - 1) --k.dilation;
    k.padding = rng.coin() ? ((k.length - 1) * k.dilation) / 2 : 0;
    bank.kernels.push_back(std::move(k));
  }
  return bank;
}

struct KernelResponse {
  double max = 0.0;
  double ppv = 0.0;  ///< fraction of outputs > 0
};

inline KernelResponse summarize_outputs(std::span<const double> z) {
  if (z.empty()) return {0.0, 0.0};
  KernelResponse r{-std::numeric_limits<double>::infinity(), 0.0};
  std::size_t positive = 0;
  for (double v : z) {
    r.max = std::max(r.max, v);
    positive += v > 0.0 ? 1 : 0;
  }
  r.ppv = static_cast<double>(positive) / static_cast<double>(z.size());
  return r;
}

/// Convolution outputs z_t = sum_c sum_j w[c][j] * x~[c][t + j*dilation] - bias
/// where x~ is x with `padding` zeros on both ends. `out` is reused scratch.
inline void convolve(const MultivariateSeries& x, const RocketKernel& kernel, std::vector<double>& out) {
  const std::size_t T = x.length();
  const std::size_t n_out = kernel.output_length(T);
  out.assign(n_out, -kernel.bias);
  const auto pad = static_cast<std::ptrdiff_t>(kernel.padding);
  for (std::size_t k = 0; k < kernel.channels.size(); ++k) {
    const double* src = x.channel(kernel.channels[k]).data();
    const auto w = kernel.channel_weights(k);
    for (std::size_t j = 0; j < kernel.length; ++j) {
      const std::ptrdiff_t offset = static_cast<std::ptrdiff_t>(j * kernel.dilation) - pad;
      const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, -offset);
      const std::ptrdiff_t t1 =
          std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n_out), static_cast<std::ptrdiff_t>(T) - offset);
      const double wj = w[j];
      double* dst = out.data();
      for (std::ptrdiff_t t = t0; t < t1; ++t) dst[t] += wj * src[t + offset];
    }
  }
}

inline KernelResponse apply_kernel(const MultivariateSeries& x, const RocketKernel& kernel) {
  for (auto c : kernel.channels)
    if (c >= x.num_channels()) fail(ErrorKind::ShapeMismatch, "kernel channel out of range");
  std::vector<double> z;
  convolve(x, kernel, z);
  return summarize_outputs(z);
}

/// Row i holds (max, ppv) for every kernel, in kernel order.
template <typename SeriesAt>
FeatureMatrix rocket_transform_rows(std::size_t n, SeriesAt&& series_at, const KernelBank& bank,
                                    std::size_t workers = 0) {
  FeatureMatrix features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(bank.num_features()));
  for (std::size_t i = 0; i < n; ++i) {
    const MultivariateSeries& s = series_at(i);
    if (s.num_channels() != bank.num_channels || s.length() != bank.input_length)
      fail(ErrorKind::ShapeMismatch,
           "sample shape " + std::to_string(s.num_channels()) + "x" + std::to_string(s.length()) +
               " does not match kernel bank " + std::to_string(bank.num_channels) + "x" +
               std::to_string(bank.input_length));
  }
  parallel_for(n, workers, [&](std::size_t i) {
    const MultivariateSeries& s = series_at(i);
    std::vector<double> z;
    auto row = features.row(static_cast<Eigen::Index>(i));
    for (std::size_t k = 0; k < bank.kernels.size(); ++k) {
      convolve(s, bank.kernels[k], z);
      const auto r = summarize_outputs(z);
      row(static_cast<Eigen::Index>(2 * k)) = r.max;
      row(static_cast<Eigen::Index>(2 * k + 1)) = r.ppv;
    }
  });
  return features;
}

inline FeatureMatrix rocket_transform(const Dataset& dataset, const KernelBank& bank,
                                      std::size_t workers = 0) {
  return rocket_transform_rows(
      dataset.size(), [&](std::size_t i) -> const MultivariateSeries& { return dataset.samples[i].series; },
      bank, workers);
}

inline FeatureMatrix rocket_transform(std::span<const MultivariateSeries> series,
                                      const KernelBank& bank, std::size_t workers = 0) {
  return rocket_transform_rows(
      series.size(), [&](std::size_t i) -> const MultivariateSeries& { return series[i]; }, bank,
      workers);
}

}  // namespace exmts
