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
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "exmts/error.hpp"
#include "exmts/features.hpp"
#include "exmts/parallel.hpp"
#include "exmts/rng.hpp"
#include "exmts/series.hpp"
#include "exmts/series_prep.hpp"

namespace exmts {

namespace minirocket {

inline constexpr std::size_t kKernelLength = 9;
inline constexpr std::size_t kNumKernels = 84;
inline constexpr std::size_t kMaxDilationsPerKernel = 32;

/// The 84 kernels: every choice of three taps (of nine) weighted 2, the
/// remaining six weighted -1. Lexicographic order.
inline const std::array<std::array<std::size_t, 3>, kNumKernels>& kernel_taps() {
  static const auto taps = [] {
    std::array<std::array<std::size_t, 3>, kNumKernels> t{};
    std::size_t n = 0;
    for (std::size_t a = 0; a < kKernelLength; ++a)
      for (std::size_t b = a + 1; b < kKernelLength; ++b)
        for (std::size_t c = b + 1; c < kKernelLength; ++c) t[n++] = {a, b, c};
    return t;
  }();
  return taps;
}

}  // namespace minirocket

/// Fitted MiniROCKET transform. Features are enumerated dilation-major, then
/// kernel, then bias.
struct MiniRocketParams {
  std::uint64_t seed = 0;
  std::size_t num_channels = 0;
  std::size_t input_length = 0;
  bool normalize_input = true;  ///< z-normalize each sample channel before convolving
  std::vector<std::size_t> dilations;
  std::vector<std::size_t> features_per_dilation;
  /// Channel subset per (dilation, kernel) pair, index = dilation * 84 + kernel.
  std::vector<std::vector<std::size_t>> channel_combinations;
  /// Training sample whose outputs set the biases of each (dilation, kernel) pair.
  std::vector<std::size_t> fit_samples;
  std::vector<double> quantiles;
  std::vector<double> biases;

  std::size_t num_features() const { return biases.size(); }

  friend bool operator==(const MiniRocketParams&, const MiniRocketParams&) = default;
};

struct MiniRocketOptions {
  std::size_t num_features = 10000;
  bool normalize_input = true;
};

namespace minirocket {

/// Logarithmic dilation ladder capped by the input length, with the number
/// of biases assigned to each dilation.
inline void fit_dilations(std::size_t input_length, std::size_t features_per_kernel,
                          std::vector<std::size_t>& dilations, std::vector<std::size_t>& counts) {
  const std::size_t n_dil = std::min(features_per_kernel, kMaxDilationsPerKernel);
  const double multiplier = static_cast<double>(features_per_kernel) / static_cast<double>(n_dil);
  const double max_exponent =
      std::log2(static_cast<double>(input_length - 1) / static_cast<double>(kKernelLength - 1));
  dilations.clear();
  std::vector<std::size_t> occurrences;
  for (std::size_t i = 0; i < n_dil; ++i) {
    const double e = n_dil == 1 ? 0.0 : max_exponent * static_cast<double>(i) / static_cast<double>(n_dil - 1);
    const auto d = static_cast<std::size_t>(std::floor(std::exp2(e)));
    if (!dilations.empty() && dilations.back() == d) {
      ++occurrences.back();
    } else {
      dilations.push_back(d);
      occurrences.push_back(1);
    }
  }
  counts.resize(dilations.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < dilations.size(); ++i) {
    counts[i] = static_cast<std::size_t>(static_cast<double>(occurrences[i]) * multiplier);
    total += counts[i];
  }
  for (std::size_t i = 0; total < features_per_kernel; i = (i + 1) % counts.size(), ++total) ++counts[i];
}

/// Low-discrepancy quantile positions frac(k * golden ratio), k = 1..n.
inline std::vector<double> quantile_positions(std::size_t n) {
  const double phi = (std::sqrt(5.0) + 1.0) / 2.0;
  std::vector<double> q(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double v = static_cast<double>(k + 1) * phi;
    q[k] = v - std::floor(v);
  }
  return q;
}

/// Per-channel shifted sums for one dilation: base = -sum of all nine
/// shifted copies, taps[j] = 3 * shifted copy j (zero padded, same length).
struct DilationScratch {
  std::vector<double> base;  ///< C x T
  std::vector<double> taps;  ///< C x 9 x T
};

inline void prepare_dilation(const MultivariateSeries& x, std::size_t dilation, DilationScratch& s) {
  const std::size_t C = x.num_channels(), T = x.length();
  const auto pad = static_cast<std::ptrdiff_t>(((kKernelLength - 1) * dilation) / 2);
  s.base.assign(C * T, 0.0);
  s.taps.assign(C * kKernelLength * T, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    const double* src = x.channel(c).data();
    double* base = s.base.data() + c * T;
    for (std::size_t j = 0; j < kKernelLength; ++j) {
      double* tap = s.taps.data() + (c * kKernelLength + j) * T;
      const std::ptrdiff_t offset = static_cast<std::ptrdiff_t>(j * dilation) - pad;
      const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, -offset);
      const std::ptrdiff_t t1 = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(T),
                                                         static_cast<std::ptrdiff_t>(T) - offset);
      for (std::ptrdiff_t t = t0; t < t1; ++t) {
        base[t] -= src[t + offset];
        tap[t] = 3.0 * src[t + offset];
      }
    }
  }
}

/// Padded ("same" length) output of one kernel over a channel subset.
inline void kernel_output(const DilationScratch& s, std::size_t T, std::size_t kernel,
                          std::span<const std::size_t> channels, std::vector<double>& out) {
  out.assign(T, 0.0);
  const auto& taps = kernel_taps()[kernel];
  for (auto c : channels) {
    const double* base = s.base.data() + c * T;
    const double* a = s.taps.data() + (c * kKernelLength + taps[0]) * T;
    const double* b = s.taps.data() + (c * kKernelLength + taps[1]) * T;
    const double* d = s.taps.data() + (c * kKernelLength + taps[2]) * T;
    for (std::size_t t = 0; t < T; ++t) out[t] += base[t] + a[t] + b[t] + d[t];
  }
}

/// Empirical quantile without interpolation: always an attained value.
inline double attained_quantile(std::vector<double> values, double q) {
  const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx), values.end());
  return values[idx];
}

/// Whether the feature of (dilation index, kernel) uses every padded
/// output or only the positions where the kernel lies inside the series.
inline bool uses_padding(std::size_t dilation_index, std::size_t kernel) {
  return (dilation_index + kernel) % 2 == 0;
}

inline MultivariateSeries prepare_input(const MultivariateSeries& x, bool normalize) {
  return normalize ? znormalize(x) : x;
}

}  // namespace minirocket

/// Fits dilations, channel combinations and biases on training data.
inline MiniRocketParams minirocket_fit(const Dataset& train, std::uint64_t seed,
                                       const MiniRocketOptions& options = {}) {
  using namespace minirocket;
  if (train.empty()) fail(ErrorKind::EmptyDataset, "MiniROCKET fit needs training samples");
  train.validate();
  if (train.length < kKernelLength)
    fail(ErrorKind::InvalidParams, "MiniROCKET needs series of length >= 9");
  const std::size_t features_per_kernel = std::max<std::size_t>(1, options.num_features / kNumKernels);

  MiniRocketParams p;
  p.seed = seed;
  p.num_channels = train.num_channels();
  p.input_length = train.length;
  p.normalize_input = options.normalize_input;
  fit_dilations(p.input_length, features_per_kernel, p.dilations, p.features_per_dilation);

  Rng rng(seed);
  const std::size_t n_pairs = p.dilations.size() * kNumKernels;
  const double max_channel_exp =
      std::log2(static_cast<double>(std::min(p.num_channels, kKernelLength)) + 1.0);
  p.channel_combinations.resize(n_pairs);
  for (auto& combo : p.channel_combinations) {
    const auto n_ch = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::floor(std::exp2(rng.uniform(0.0, max_channel_exp)))), 1,
        p.num_channels);
    combo = rng.choose(p.num_channels, n_ch);
    std::sort(combo.begin(), combo.end());
  }
  p.fit_samples.resize(n_pairs);
  for (auto& s : p.fit_samples) s = static_cast<std::size_t>(rng.below(train.size()));

  p.quantiles = quantile_positions(features_per_kernel * kNumKernels);
  p.biases.resize(p.quantiles.size());

  const std::size_t T = p.input_length;
  DilationScratch scratch;
  std::vector<double> out;
  std::size_t feature = 0;
  for (std::size_t di = 0; di < p.dilations.size(); ++di) {
    for (std::size_t k = 0; k < kNumKernels; ++k) {
      const std::size_t pair = di * kNumKernels + k;
      const auto x = prepare_input(train.samples[p.fit_samples[pair]].series, p.normalize_input);
      prepare_dilation(x, p.dilations[di], scratch);
      kernel_output(scratch, T, k, p.channel_combinations[pair], out);
      for (std::size_t f = 0; f < p.features_per_dilation[di]; ++f, ++feature)
        p.biases[feature] = attained_quantile(out, p.quantiles[feature]);
    }
  }
  return p;
}

template <typename SeriesAt>
FeatureMatrix minirocket_transform_rows(std::size_t n, SeriesAt&& series_at,
                                        const MiniRocketParams& p, std::size_t workers = 0) {
  using namespace minirocket;
  for (std::size_t i = 0; i < n; ++i) {
    const MultivariateSeries& s = series_at(i);
    if (s.num_channels() != p.num_channels || s.length() != p.input_length)
      fail(ErrorKind::ShapeMismatch, "sample shape does not match MiniROCKET parameters");
  }
  FeatureMatrix features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p.num_features()));
  const std::size_t T = p.input_length;
  parallel_for(n, workers, [&](std::size_t i) {
    const auto x = prepare_input(series_at(i), p.normalize_input);
    DilationScratch scratch;
    std::vector<double> out;
    auto row = features.row(static_cast<Eigen::Index>(i));
    std::size_t feature = 0;
    for (std::size_t di = 0; di < p.dilations.size(); ++di) {
      prepare_dilation(x, p.dilations[di], scratch);
      const std::size_t pad = ((kKernelLength - 1) * p.dilations[di]) / 2;
      for (std::size_t k = 0; k < kNumKernels; ++k) {
        kernel_output(scratch, T, k, p.channel_combinations[di * kNumKernels + k], out);
        std::size_t lo = 0, hi = T;
        if (!uses_padding(di, k) && 2 * pad < T) {
          lo = pad;
          hi = T - pad;
        }
        for (std::size_t f = 0; f < p.features_per_dilation[di]; ++f, ++feature) {
          const double bias = p.biases[feature];
          std::size_t positive = 0;
          for (std::size_t t = lo; t < hi; ++t) positive += out[t] > bias ? 1 : 0;
          row(static_cast<Eigen::Index>(feature)) =
              static_cast<double>(positive) / static_cast<double>(hi - lo);
        }
      }
    }
  });
  return features;
}

inline FeatureMatrix minirocket_transform(const Dataset& dataset, const MiniRocketParams& p,
                                          std::size_t workers = 0) {
  return minirocket_transform_rows(
      dataset.size(), [&](std::size_t i) -> const MultivariateSeries& { return dataset.samples[i].series; },
      p, workers);
}

inline FeatureMatrix minirocket_transform(std::span<const MultivariateSeries> series,
                                          const MiniRocketParams& p, std::size_t workers = 0) {
  return minirocket_transform_rows(
      series.size(), [&](std::size_t i) -> const MultivariateSeries& { return series[i]; }, p,
      workers);
}

}  // namespace exmts
