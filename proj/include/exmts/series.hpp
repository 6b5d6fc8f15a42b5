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

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exmts/error.hpp"

namespace exmts {

/// C named real-valued channels of equal length T, stored channel-major.
class MultivariateSeries {
 public:
  MultivariateSeries() = default;

  MultivariateSeries(std::vector<std::string> names, std::size_t length)
      : names_(std::move(names)), length_(length), data_(names_.size() * length, 0.0) {}

  static MultivariateSeries from_channels(std::vector<std::string> names,
                                          const std::vector<std::vector<double>>& channels) {
    if (names.size() != channels.size())
      fail(ErrorKind::ShapeMismatch, "channel name count differs from channel count");
    const std::size_t len = channels.empty() ? 0 : channels.front().size();
    MultivariateSeries s(std::move(names), len);
    for (std::size_t c = 0; c < channels.size(); ++c) {
      if (channels[c].size() != len) fail(ErrorKind::ShapeMismatch, "channels differ in length");
      std::copy(channels[c].begin(), channels[c].end(), s.channel(c).begin());
    }
    return s;
  }

  std::size_t num_channels() const { return names_.size(); }
  std::size_t length() const { return length_; }
  bool empty() const { return names_.empty() || length_ == 0; }

  std::span<double> channel(std::size_t c) { return {data_.data() + c * length_, length_}; }
  std::span<const double> channel(std::size_t c) const {
    return {data_.data() + c * length_, length_};
  }

  double& at(std::size_t c, std::size_t t) { return data_[c * length_ + t]; }
  double at(std::size_t c, std::size_t t) const { return data_[c * length_ + t]; }

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t c = 0; c < names_.size(); ++c)
      if (names_[c] == name) return c;
    return std::nullopt;
  }

  /// Time window [begin, end) of every channel.
  MultivariateSeries slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > length_) fail(ErrorKind::InvalidParams, "slice out of range");
    MultivariateSeries out(names_, end - begin);
    for (std::size_t c = 0; c < names_.size(); ++c) {
      auto src = channel(c);
      std::copy(src.begin() + static_cast<std::ptrdiff_t>(begin),
                src.begin() + static_cast<std::ptrdiff_t>(end), out.channel(c).begin());
    }
    return out;
  }

  /// Subset of channels, in the given order.
  MultivariateSeries select(std::span<const std::size_t> indices) const {
    std::vector<std::string> names;
    for (auto i : indices) names.push_back(names_.at(i));
    MultivariateSeries out(std::move(names), length_);
    for (std::size_t k = 0; k < indices.size(); ++k) {
      auto src = channel(indices[k]);
      std::copy(src.begin(), src.end(), out.channel(k).begin());
    }
    return out;
  }

  /// Throws unless C >= 1, T >= 1 and every value is finite.
  void validate() const {
    if (names_.empty()) fail(ErrorKind::ShapeMismatch, "series has no channels");
    if (length_ == 0) fail(ErrorKind::ShapeMismatch, "series has zero length");
    for (double v : data_)
      if (!std::isfinite(v)) fail(ErrorKind::InvalidParams, "series contains non-finite values");
  }

  friend bool operator==(const MultivariateSeries&, const MultivariateSeries&) = default;

 private:
  std::vector<std::string> names_;
  std::size_t length_ = 0;
  std::vector<double> data_;
};

}  // namespace exmts
