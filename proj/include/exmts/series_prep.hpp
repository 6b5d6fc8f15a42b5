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
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "exmts/body_parts.hpp"
#include "exmts/error.hpp"
#include "exmts/series.hpp"

namespace exmts {

// ---------------------------------------------------------------------------
// Samples and datasets

struct RepetitionSample {
  MultivariateSeries series;
  ExerciseClass label = ExerciseClass::N;
  std::string participant_id;
  std::string clip_id;
  std::size_t rep_index = 0;

  friend bool operator==(const RepetitionSample&, const RepetitionSample&) = default;
};

/// Fixed-length repetitions sharing one channel set.
struct Dataset {
  std::vector<RepetitionSample> samples;
  std::vector<std::string> channel_names;
  std::size_t length = 0;
  std::uint64_t config_hash = 0;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  std::size_t num_channels() const { return channel_names.size(); }

  void validate() const {
    for (const auto& s : samples) {
      if (s.series.names() != channel_names)
        fail(ErrorKind::ShapeMismatch, "sample '" + s.clip_id + "' has a different channel set");
      if (s.series.length() != length)
        fail(ErrorKind::ShapeMismatch, "sample '" + s.clip_id + "' has length " +
                                           std::to_string(s.series.length()) + ", expected " +
                                           std::to_string(length));
    }
  }

  /// Samples at the given positions, same header.
  Dataset subset(std::span<const std::size_t> indices) const {
    Dataset out{{}, channel_names, length, config_hash};
    out.samples.reserve(indices.size());
    for (auto i : indices) out.samples.push_back(samples.at(i));
    return out;
  }

  std::vector<int> labels() const {
    std::vector<int> y;
    y.reserve(samples.size());
    for (const auto& s : samples) y.push_back(static_cast<int>(s.label));
    return y;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// ---------------------------------------------------------------------------
// Savitzky-Golay smoothing

/// Least-squares polynomial smoothing over a sliding odd window. The first
/// and last half-windows are evaluated from the polynomial fitted to the
/// first (last) full window instead of padding the signal.
inline std::vector<double> smooth_savgol(std::span<const double> x, std::size_t window,
                                         std::size_t polyorder) {
  if (window % 2 == 0 || window <= polyorder)
    fail(ErrorKind::InvalidParams, "savgol window must be odd and larger than polyorder");
  if (x.size() < window)
    fail(ErrorKind::InvalidParams, "savgol input shorter than the window");
  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  const auto w = static_cast<Eigen::Index>(window);
  const auto order = static_cast<Eigen::Index>(polyorder);

  Eigen::MatrixXd vander(w, order + 1);
  for (Eigen::Index k = 0; k < w; ++k) {
    const double pos = static_cast<double>(k - half);
    double v = 1.0;
    for (Eigen::Index j = 0; j <= order; ++j, v *= pos) vander(k, j) = v;
  }
  // Rows of `fit` map a window to polynomial coefficients around its centre.
  const Eigen::MatrixXd fit =
      vander.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(w, w));

  const std::size_t n = x.size();
  std::vector<double> out(n);
  for (std::size_t i = static_cast<std::size_t>(half); i + half < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < w; ++k) acc += fit(0, k) * x[i - half + k];
    out[i] = acc;
  }
  auto edge = [&](std::size_t start, std::size_t from, std::size_t to) {
    Eigen::VectorXd y(w);
    for (Eigen::Index k = 0; k < w; ++k) y(k) = x[start + k];
    const Eigen::VectorXd coef = fit * y;
    for (std::size_t i = from; i < to; ++i) {
      const double pos = static_cast<double>(static_cast<std::ptrdiff_t>(i - start) - half);
      double v = 0.0;
      for (Eigen::Index j = order; j >= 0; --j) v = v * pos + coef(j);
      out[i] = v;
    }
  };
  edge(0, 0, static_cast<std::size_t>(half));
  edge(n - window, n - static_cast<std::size_t>(half), n);
  return out;
}

// ---------------------------------------------------------------------------
// Peak detection

struct PeakOptions {
  std::size_t min_distance = 1;  ///< minimum index spacing between kept peaks
  double min_prominence = 0.0;   ///< absolute prominence threshold
};

/// Local maxima. A flat-topped maximum reports its middle sample (left
/// middle for even plateaus). End points are never maxima.
inline std::vector<std::size_t> local_maxima(std::span<const double> x) {
  std::vector<std::size_t> peaks;
  const std::size_t n = x.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (x[i - 1] < x[i]) {
      std::size_t ahead = i + 1;
      while (ahead + 1 < n && x[ahead] == x[i]) ++ahead;
      if (x[ahead] < x[i]) {
        peaks.push_back((i + ahead - 1) / 2);
        i = ahead;
        continue;
      }
    }
    ++i;
  }
  return peaks;
}

/// Topographic prominence of each peak: height above the higher of the two
/// lowest points reached before climbing above the peak on either side.
inline std::vector<double> peak_prominences(std::span<const double> x,
                                            std::span<const std::size_t> peaks) {
  const std::size_t n = x.size();
  std::vector<double> out(peaks.size());
  if (n == 0) return out;

  // Sparse table for O(1) range minima.
  std::vector<std::vector<double>> table{std::vector<double>(x.begin(), x.end())};
  for (std::size_t span = 2; span <= n; span *= 2) {
    const auto& prev = table.back();
    std::vector<double> next(n - span + 1);
    for (std::size_t i = 0; i + span <= n; ++i)
      next[i] = std::min(prev[i], prev[i + span / 2]);
    table.push_back(std::move(next));
  }
  auto range_min = [&](std::size_t lo, std::size_t hi) {  // inclusive
    std::size_t level = 0;
    while ((std::size_t{2} << level) <= hi - lo + 1) ++level;
    return std::min(table[level][lo], table[level][hi + 1 - (std::size_t{1} << level)]);
  };

  // Nearest strictly higher sample on each side via monotonic stacks.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> left_higher(n, kNone), right_higher(n, kNone), stack;
  for (std::size_t i = 0; i < n; ++i) {
    while (!stack.empty() && x[stack.back()] <= x[i]) stack.pop_back();
    if (!stack.empty()) left_higher[i] = stack.back();
    stack.push_back(i);
  }
  stack.clear();
  for (std::size_t i = n; i-- > 0;) {
    while (!stack.empty() && x[stack.back()] <= x[i]) stack.pop_back();
    if (!stack.empty()) right_higher[i] = stack.back();
    stack.push_back(i);
  }

  for (std::size_t k = 0; k < peaks.size(); ++k) {
    const std::size_t p = peaks[k];
    const std::size_t lo = left_higher[p] == kNone ? 0 : left_higher[p] + 1;
    const std::size_t hi = right_higher[p] == kNone ? n - 1 : right_higher[p] - 1;
    out[k] = x[p] - std::max(range_min(lo, p), range_min(p, hi));
  }
  return out;
}

/// Local maxima filtered first by prominence, then by distance: peaks are
/// visited from highest to lowest (ties: lower index first) and every
/// lower peak closer than min_distance to a kept one is discarded.
/// Result is sorted ascending.
inline std::vector<std::size_t> detect_peaks(std::span<const double> x, const PeakOptions& opts) {
  if (x.size() < 3) return {};
  auto peaks = local_maxima(x);
  if (opts.min_prominence > 0.0) {
    const auto prom = peak_prominences(x, peaks);
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < peaks.size(); ++k)
      if (prom[k] >= opts.min_prominence) kept.push_back(peaks[k]);
    peaks = std::move(kept);
  }
  if (opts.min_distance > 1 && peaks.size() > 1) {
    std::vector<std::size_t> order(peaks.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[peaks[a]] > x[peaks[b]]; });
    std::vector<bool> keep(peaks.size(), true);
    for (auto k : order) {
      if (!keep[k]) continue;
      for (std::size_t j = k; j-- > 0 && peaks[k] - peaks[j] < opts.min_distance;) keep[j] = false;
      for (std::size_t j = k + 1; j < peaks.size() && peaks[j] - peaks[k] < opts.min_distance; ++j)
        keep[j] = false;
    }
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < peaks.size(); ++k)
      if (keep[k]) kept.push_back(peaks[k]);
    peaks = std::move(kept);
  }
  return peaks;
}

/// Range-relative prominence threshold: the same index set results for a*x+b, a>0.
inline std::vector<std::size_t> detect_peaks_relative(std::span<const double> x,
                                                      double prominence_fraction,
                                                      std::size_t min_distance = 1) {
  if (x.size() < 3) return {};
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return detect_peaks(x, {min_distance, prominence_fraction * (*hi - *lo)});
}

/// Dominant period in samples from the autocorrelation: the highest
/// autocorrelation lag after its first drop below zero.
inline std::optional<std::size_t> estimate_period(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 8) return std::nullopt;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - mean;
  auto acf = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += d[i] * d[i + lag];
    return s;
  };
  const double zero = acf(0);
  if (zero <= 0.0) return std::nullopt;
  std::size_t lag = 1;
  const std::size_t max_lag = n / 2;
  while (lag <= max_lag && acf(lag) >= 0.0) ++lag;
  if (lag > max_lag) return std::nullopt;
  std::size_t best = 0;
  double best_value = 0.0;
  for (; lag <= max_lag; ++lag) {
    const double v = acf(lag);
    if (v > best_value) {
      best_value = v;
      best = lag;
    }
  }
  if (best == 0) return std::nullopt;
  return best;
}

// ---------------------------------------------------------------------------
// Repetition segmentation

struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;  ///< exclusive

  std::size_t size() const { return end - begin; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct SegmentationParams {
  std::vector<std::size_t> anchor_parts = {index_of(BodyPart::RElbow), index_of(BodyPart::RWrist),
                                           index_of(BodyPart::LElbow), index_of(BodyPart::LWrist)};
  std::size_t window = 11;
  std::size_t polyorder = 3;
  std::optional<std::size_t> min_peak_distance;  ///< unset: estimated from the signal
  double min_prominence = 0.1;                   ///< fraction of the anchor's range
  std::optional<std::size_t> expected_reps;
  /// Image y grows downwards; peaks are searched on -y so that the top of
  /// each lift is one maximum.
  bool invert_y = true;
  double min_segment_fraction = 0.25;  ///< of the median segment length

  void validate() const {
    if (window % 2 == 0 || window <= polyorder)
      fail(ErrorKind::InvalidParams, "smoothing window must be odd and larger than polyorder");
    if (!(min_prominence > 0.0 && min_prominence < 1.0))
      fail(ErrorKind::InvalidParams, "min_prominence must lie in (0,1)");
    if (anchor_parts.empty()) fail(ErrorKind::InvalidParams, "no anchor parts");
    if (min_peak_distance && *min_peak_distance == 0)
      fail(ErrorKind::InvalidParams, "min_peak_distance must be >= 1");
    if (expected_reps && *expected_reps == 0)
      fail(ErrorKind::InvalidParams, "expected_reps must be >= 1");
    if (min_segment_fraction < 0.0 || min_segment_fraction >= 1.0)
      fail(ErrorKind::InvalidParams, "min_segment_fraction must lie in [0,1)");
  }

  std::vector<std::string> anchor_channel_names() const {
    std::vector<std::string> names;
    for (auto p : anchor_parts) names.push_back(std::string(body_part_name(p)) + "_Y");
    return names;
  }
};

struct SegmentationResult {
  std::vector<Segment> segments;
  std::vector<Segment> dropped;      ///< too short relative to the median
  std::vector<std::size_t> peaks;    ///< on the anchor signal
  std::vector<double> anchor;        ///< smoothed, averaged (and inverted) anchor
  bool count_mismatch = false;       ///< found count != expected_reps
};

/// Peak detection with an automatically chosen minimum distance: half the
/// autocorrelation period, then half the median inter-peak gap until stable.
inline std::vector<std::size_t> detect_repetition_peaks(std::span<const double> anchor,
                                                        const SegmentationParams& params) {
  if (params.min_peak_distance)
    return detect_peaks_relative(anchor, params.min_prominence, *params.min_peak_distance);
  std::size_t distance = 1;
  if (auto period = estimate_period(anchor)) distance = std::max<std::size_t>(1, *period / 2);
  auto peaks = detect_peaks_relative(anchor, params.min_prominence, distance);
  for (int iter = 0; iter < 5 && peaks.size() >= 3; ++iter) {
    std::vector<std::size_t> gaps;
    for (std::size_t i = 1; i < peaks.size(); ++i) gaps.push_back(peaks[i] - peaks[i - 1]);
    std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2),
                     gaps.end());
    const std::size_t next = std::max<std::size_t>(1, gaps[gaps.size() / 2] / 2);
    if (next == distance) break;
    distance = next;
    peaks = detect_peaks_relative(anchor, params.min_prominence, distance);
  }
  return peaks;
}

/// Splits a multi-repetition series into single repetitions. The anchor
/// channels (<part>_Y for each anchor part) are smoothed and averaged; each
/// peak of the anchor is one repetition, cut at the lowest anchor sample
/// between consecutive peaks. Segments shorter than min_segment_fraction of
/// the median length are dropped.
inline SegmentationResult segment_repetitions(const MultivariateSeries& series,
                                              const SegmentationParams& params) {
  params.validate();
  const std::size_t n = series.length();
  std::vector<std::size_t> anchors;
  for (const auto& name : params.anchor_channel_names()) {
    auto c = series.find(name);
    if (!c) fail(ErrorKind::InvalidParams, "anchor channel " + name + " not in series");
    anchors.push_back(*c);
  }
  if (n < 3) fail(ErrorKind::NoRepetitionsFound, "series too short to segment");

  std::size_t window = params.window;
  if (n < window) window = (n % 2 == 1) ? n : n - 1;
  if (window <= params.polyorder)
    fail(ErrorKind::NoRepetitionsFound, "series too short for the smoothing window");

  SegmentationResult result;
  result.anchor.assign(n, 0.0);
  for (auto c : anchors) {
    const auto smooth = smooth_savgol(series.channel(c), window, params.polyorder);
    for (std::size_t t = 0; t < n; ++t) result.anchor[t] += smooth[t];
  }
  const double sign = params.invert_y ? -1.0 : 1.0;
  for (auto& v : result.anchor) v *= sign / static_cast<double>(anchors.size());

  const auto [lo, hi] = std::minmax_element(result.anchor.begin(), result.anchor.end());
  if (*hi - *lo <= 1e-9 * (std::abs(*hi) + std::abs(*lo) + 1.0))
    fail(ErrorKind::NoRepetitionsFound, "anchor signal is flat");
  result.peaks = detect_repetition_peaks(result.anchor, params);
  if (result.peaks.empty()) fail(ErrorKind::NoRepetitionsFound, "no peaks in the anchor signal");

  std::vector<std::size_t> cuts{0};
  for (std::size_t k = 1; k < result.peaks.size(); ++k) {
    const auto first = result.anchor.begin() + static_cast<std::ptrdiff_t>(result.peaks[k - 1]);
    const auto last = result.anchor.begin() + static_cast<std::ptrdiff_t>(result.peaks[k]) + 1;
    cuts.push_back(static_cast<std::size_t>(std::min_element(first, last) - result.anchor.begin()));
  }
  cuts.push_back(n);

  std::vector<Segment> all;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) all.push_back({cuts[k], cuts[k + 1]});
  std::vector<std::size_t> lengths;
  for (const auto& s : all) lengths.push_back(s.size());
  std::nth_element(lengths.begin(), lengths.begin() + static_cast<std::ptrdiff_t>(lengths.size() / 2),
                   lengths.end());
  const double min_len = params.min_segment_fraction * static_cast<double>(lengths[lengths.size() / 2]);
  for (const auto& s : all) {
    if (static_cast<double>(s.size()) < min_len || s.size() < 4)
      result.dropped.push_back(s);
    else
      result.segments.push_back(s);
  }
  if (result.segments.empty()) fail(ErrorKind::NoRepetitionsFound, "all segments were dropped");
  if (params.expected_reps && *params.expected_reps != result.segments.size())
    result.count_mismatch = true;
  return result;
}

/// n_reps contiguous windows of length floor(T / n_reps); the last one also
/// takes the remainder.
inline std::vector<Segment> segment_equal(std::size_t length, std::size_t n_reps) {
  if (n_reps == 0) fail(ErrorKind::InvalidParams, "n_reps must be >= 1");
  if (length < n_reps) fail(ErrorKind::InvalidParams, "series shorter than the repetition count");
  const std::size_t step = length / n_reps;
  std::vector<Segment> out;
  for (std::size_t k = 0; k < n_reps; ++k)
    out.push_back({k * step, k + 1 == n_reps ? length : (k + 1) * step});
  return out;
}

// ---------------------------------------------------------------------------
// Resampling

/// Not-a-knot cubic spline through (i, y[i]) evaluated at `count` equally
/// spaced positions spanning [0, n-1]. End points are copied exactly.
inline std::vector<double> resample_cubic(std::span<const double> y, std::size_t count) {
  const std::size_t n = y.size();
  if (n < 4) fail(ErrorKind::TooShort, "cubic resampling needs at least 4 points");
  if (count < 2) fail(ErrorKind::InvalidParams, "target length must be >= 2");

  // Tridiagonal system for the knot slopes (unit spacing).
  std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), rhs(n, 0.0), m(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) m[i] = y[i + 1] - y[i];
  diag[0] = 1.0;
  sup[0] = 2.0;
  rhs[0] = 0.5 * (5.0 * m[0] + m[1]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    sub[i] = 1.0;
    diag[i] = 4.0;
    sup[i] = 1.0;
    rhs[i] = 3.0 * (m[i - 1] + m[i]);
  }
  sub[n - 1] = 2.0;
  diag[n - 1] = 1.0;
  rhs[n - 1] = 0.5 * (m[n - 3] + 5.0 * m[n - 2]);
  for (std::size_t i = 1; i < n; ++i) {
    const double f = sub[i] / diag[i - 1];
    diag[i] -= f * sup[i - 1];
    rhs[i] -= f * rhs[i - 1];
  }
  std::vector<double> slope(n);
  slope[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) slope[i] = (rhs[i] - sup[i] * slope[i + 1]) / diag[i];

  std::vector<double> out(count);
  const double scale = static_cast<double>(n - 1) / static_cast<double>(count - 1);
  for (std::size_t j = 0; j < count; ++j) {
    const double pos = static_cast<double>(j) * scale;
    std::size_t k = std::min(static_cast<std::size_t>(pos), n - 2);
    const double t = pos - static_cast<double>(k);
    const double t2 = t * t, t3 = t2 * t;
    out[j] = (2 * t3 - 3 * t2 + 1) * y[k] + (t3 - 2 * t2 + t) * slope[k] +
             (-2 * t3 + 3 * t2) * y[k + 1] + (t3 - t2) * slope[k + 1];
  }
  out.front() = y.front();
  out.back() = y.back();
  return out;
}

inline MultivariateSeries resample_cubic(const MultivariateSeries& series, std::size_t count) {
  MultivariateSeries out(series.names(), count);
  for (std::size_t c = 0; c < series.num_channels(); ++c) {
    const auto r = resample_cubic(series.channel(c), count);
    std::copy(r.begin(), r.end(), out.channel(c).begin());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normalization

/// Per-channel z-normalization; zero-variance channels become zeros.
inline MultivariateSeries znormalize(const MultivariateSeries& series) {
  MultivariateSeries out = series;
  const double n = static_cast<double>(series.length());
  for (std::size_t c = 0; c < out.num_channels(); ++c) {
    auto ch = out.channel(c);
    if (ch.empty()) continue;
    const double mean = std::accumulate(ch.begin(), ch.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : ch) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / n);
    const double scale = std::abs(mean) + 1.0;
    if (sd <= 1e-12 * scale) {
      std::fill(ch.begin(), ch.end(), 0.0);
    } else {
      for (double& v : ch) v = (v - mean) / sd;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Channel selection

struct ChannelRanking {
  std::vector<double> scores;          ///< by original channel index
  std::vector<std::size_t> ranking;    ///< channel indices, best first
  std::vector<std::size_t> selected;   ///< prefix of ranking that is kept
};

/// Elbow of a descending score curve: the index with the largest second
/// difference. Returns how many leading entries to keep (>= 1).
inline std::size_t elbow_cut(std::span<const double> sorted_desc) {
  const std::size_t n = sorted_desc.size();
  if (n <= 2) return n;
  std::size_t best = 1;
  double best_value = -INFINITY;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double d2 = sorted_desc[i - 1] - 2.0 * sorted_desc[i] + sorted_desc[i + 1];
    if (d2 > best_value) {
      best_value = d2;
      best = i;
    }
  }
  return best;
}

/// Scores each channel by the summed Euclidean distance between all pairs of
/// class-centroid series and keeps the channels before the elbow of the
/// sorted scores (or the top `keep`).
inline ChannelRanking select_channels_ecp(const Dataset& train,
                                          std::optional<std::size_t> keep = std::nullopt) {
  train.validate();
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  // Canonical accumulation order keeps scores independent of sample order.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& sa = train.samples[a];
    const auto& sb = train.samples[b];
    if (sa.clip_id != sb.clip_id) return sa.clip_id < sb.clip_id;
    if (sa.rep_index != sb.rep_index) return sa.rep_index < sb.rep_index;
    if (sa.participant_id != sb.participant_id) return sa.participant_id < sb.participant_id;
    return sa.series.data() < sb.series.data();
  });

  std::vector<int> classes;
  for (const auto& s : train.samples) classes.push_back(static_cast<int>(s.label));
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) fail(ErrorKind::DegenerateDataset, "channel selection needs >= 2 classes");

  const std::size_t C = train.num_channels(), T = train.length, K = classes.size();
  std::vector<double> centroid(K * C * T, 0.0);
  std::vector<std::size_t> counts(K, 0);
  for (auto i : order) {
    const auto& s = train.samples[i];
    const auto k = static_cast<std::size_t>(
        std::lower_bound(classes.begin(), classes.end(), static_cast<int>(s.label)) - classes.begin());
    ++counts[k];
    const auto& data = s.series.data();
    for (std::size_t j = 0; j < C * T; ++j) centroid[k * C * T + j] += data[j];
  }
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t j = 0; j < C * T; ++j) centroid[k * C * T + j] /= static_cast<double>(counts[k]);

  ChannelRanking out;
  out.scores.assign(C, 0.0);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t a = 0; a < K; ++a)
      for (std::size_t b = a + 1; b < K; ++b) {
        double ss = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
          const double d = centroid[(a * C + c) * T + t] - centroid[(b * C + c) * T + t];
          ss += d * d;
        }
        out.scores[c] += std::sqrt(ss);
      }

  out.ranking.resize(C);
  std::iota(out.ranking.begin(), out.ranking.end(), 0);
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [&](std::size_t a, std::size_t b) { return out.scores[a] > out.scores[b]; });
  std::vector<double> sorted;
  for (auto c : out.ranking) sorted.push_back(out.scores[c]);
  const std::size_t n_keep = keep ? std::clamp<std::size_t>(*keep, 1, C) : elbow_cut(sorted);
  out.selected.assign(out.ranking.begin(), out.ranking.begin() + static_cast<std::ptrdiff_t>(n_keep));
  return out;
}

}  // namespace exmts
