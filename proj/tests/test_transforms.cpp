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

#include <array>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "exmts/minirocket.hpp"
#include "exmts/rocket.hpp"
#include "oracles.hpp"

namespace exmts {
namespace {

Dataset random_dataset(Rng& rng, std::size_t n, std::size_t channels, std::size_t length) {
  Dataset d;
  d.length = length;
  for (std::size_t i = 0; i < n; ++i) {
    auto s = oracle::random_series(rng, channels, length);
    if (d.channel_names.empty()) d.channel_names = s.names();
    d.samples.push_back({s, static_cast<ExerciseClass>(i % 4), "P" + std::to_string(i % 5), "c" + std::to_string(i), 0});
  }
  return d;
}

TEST(Rocket, ApplyKernelMatchesBruteForce) {
  Rng rng(21);
  std::size_t checked = 0;
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t C = 1 + rng.below(6), T = 12 + rng.below(200);
    const auto bank = generate_kernels(1, C, T, 1000 + static_cast<std::uint64_t>(trial));
    const auto x = oracle::random_series(rng, C, T);
    const auto got = apply_kernel(x, bank.kernels[0]);
    const auto want = oracle::apply(x, bank.kernels[0]);
    EXPECT_NEAR(got.max, want.max, 1e-9);
    EXPECT_NEAR(got.ppv, want.ppv, 1e-9);
    ++checked;
  }
  EXPECT_GE(checked, 50u);
}

TEST(Rocket, KernelParameterDistributions) {
  const std::size_t K = 10000, C = 16, T = 161;
  const auto bank = generate_kernels(K, C, T, 0);
  ASSERT_EQ(bank.kernels.size(), K);
  std::array<double, 3> counts{};
  std::size_t padded = 0;
  for (const auto& k : bank.kernels) {
    ASSERT_TRUE(k.length == 7 || k.length == 9 || k.length == 11);
    counts[(k.length - 7) / 2] += 1.0;
    ASSERT_GE(k.channels.size(), 1u);
    ASSERT_LE(k.channels.size(), C);
    ASSERT_LE((k.length - 1) * k.dilation, T - 1);
    ASSERT_GE(k.bias, -1.0);
    ASSERT_LE(k.bias, 1.0);
    for (std::size_t c = 0; c < k.channels.size(); ++c) {
      double sum = 0.0;
      for (double w : k.channel_weights(c)) sum += w;
      ASSERT_NEAR(sum, 0.0, 1e-12);
    }
    if (k.padding > 0) {
      ++padded;
      ASSERT_EQ(k.padding, ((k.length - 1) * k.dilation) / 2);
    }
  }
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - K / 3.0) * (c - K / 3.0) / (K / 3.0);
  EXPECT_LT(chi2, 13.82);  // p = 0.001, two degrees of freedom
  EXPECT_NEAR(static_cast<double>(padded) / K, 0.5, 0.03);
}

TEST(Rocket, DeterministicPerSeed) {
  const auto a = generate_kernels(500, 8, 100, 42), b = generate_kernels(500, 8, 100, 42);
  const auto c = generate_kernels(500, 8, 100, 43);
  EXPECT_EQ(a.kernels, b.kernels);
  EXPECT_EQ(a.checksum(), b.checksum());
  EXPECT_NE(a.checksum(), c.checksum());
  Rng rng(1);
  const auto d = random_dataset(rng, 6, 8, 100);
  const FeatureMatrix fa = rocket_transform(d, a, 1), fb = rocket_transform(d, b, 3);
  EXPECT_TRUE(fa == fb);
  EXPECT_EQ(fa.cols(), 1000);
}

TEST(Rocket, TranslationInvariantFeatures) {
  const std::size_t T = 200;
  auto bank = generate_kernels(2000, 2, T, 5);
  std::erase_if(bank.kernels, [](const RocketKernel& k) { return (k.length - 1) * k.dilation > 40; });
  ASSERT_GT(bank.kernels.size(), 300u);
  auto bump = [&](std::size_t at) {
    MultivariateSeries s({"a", "b"}, T);
    for (std::size_t i = 0; i < 10; ++i) {
      s.at(0, at + i) = std::sin(M_PI * static_cast<double>(i) / 9.0);
      s.at(1, at + i) = static_cast<double>(i) / 9.0;
    }
    return s;
  };
  const auto x = bump(60), y = bump(100);
  for (const auto& k : bank.kernels) {
    const auto a = apply_kernel(x, k), b = apply_kernel(y, k);
    ASSERT_NEAR(a.max, b.max, 1e-12);
    ASSERT_NEAR(a.ppv, b.ppv, 1e-12);
  }
}

TEST(Rocket, ShapeChecks) {
  const auto bank = generate_kernels(10, 4, 50, 0);
  Rng rng(2);
  const std::vector<MultivariateSeries> wrong = {oracle::random_series(rng, 3, 50)};
  EXPECT_THROW(rocket_transform(wrong, bank), Error);
  EXPECT_THROW(generate_kernels(10, 4, 11, 0), Error);
  EXPECT_THROW(generate_kernels(0, 4, 50, 0), Error);
}

TEST(MiniRocket, KernelTableAndDilations) {
  const auto& taps = minirocket::kernel_taps();
  EXPECT_EQ(taps.size(), 84u);
  std::set<std::array<std::size_t, 3>> unique(taps.begin(), taps.end());
  EXPECT_EQ(unique.size(), 84u);
  std::vector<std::size_t> dil, counts;
  minirocket::fit_dilations(161, 119, dil, counts);
  EXPECT_EQ(dil.front(), 1u);
  EXPECT_LE((8 * dil.back()), 160u);
  EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::size_t{0}), 119u);
  EXPECT_TRUE(std::is_sorted(dil.begin(), dil.end()));
}

class MiniRocketFit : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    Rng rng(31);
    train_ = new Dataset(random_dataset(rng, 12, 5, 120));
    params_ = new MiniRocketParams(minirocket_fit(*train_, 7, {2000, true}));
  }
  static void TearDownTestSuite() {
    delete train_;
    delete params_;
  }
  static Dataset* train_;
  static MiniRocketParams* params_;
};
Dataset* MiniRocketFit::train_ = nullptr;
MiniRocketParams* MiniRocketFit::params_ = nullptr;

TEST_F(MiniRocketFit, Deterministic) {
  EXPECT_EQ(minirocket_fit(*train_, 7, {2000, true}), *params_);
  EXPECT_NE(minirocket_fit(*train_, 8, {2000, true}).biases, params_->biases);
  EXPECT_EQ(params_->num_features(), 84u * (2000 / 84));
  const FeatureMatrix a = minirocket_transform(*train_, *params_, 1), b = minirocket_transform(*train_, *params_, 4);
  EXPECT_TRUE(a == b);
}

TEST_F(MiniRocketFit, BiasesAreAttainedOutputs) {
  using namespace minirocket;
  const auto& p = *params_;
  minirocket::DilationScratch scratch;
  std::vector<double> out;
  std::size_t feature = 0;
  for (std::size_t di = 0; di < p.dilations.size(); ++di)
    for (std::size_t k = 0; k < kNumKernels; ++k) {
      const std::size_t pair = di * kNumKernels + k;
      const auto x = prepare_input(train_->samples[p.fit_samples[pair]].series, true);
      prepare_dilation(x, p.dilations[di], scratch);
      kernel_output(scratch, p.input_length, k, p.channel_combinations[pair], out);
      for (std::size_t f = 0; f < p.features_per_dilation[di]; ++f, ++feature)
        ASSERT_NE(std::find(out.begin(), out.end(), p.biases[feature]), out.end()) << "feature " << feature;
    }
  EXPECT_EQ(feature, p.num_features());
}

TEST_F(MiniRocketFit, OutputMatchesDirectConvolution) {
  using namespace minirocket;
  const auto& p = *params_;
  const auto x = prepare_input(train_->samples[0].series, true);
  const long T = static_cast<long>(p.input_length);
  minirocket::DilationScratch scratch;
  std::vector<double> out;
  for (std::size_t di = 0; di < p.dilations.size(); ++di) {
    prepare_dilation(x, p.dilations[di], scratch);
    const long d = static_cast<long>(p.dilations[di]);
    for (std::size_t k = 0; k < kNumKernels; k += 5) {
      const auto& combo = p.channel_combinations[di * kNumKernels + k];
      kernel_output(scratch, p.input_length, k, combo, out);
      std::array<double, 9> w;
      w.fill(-1.0);
      for (auto tap : kernel_taps()[k]) w[tap] = 2.0;
      for (long t = 0; t < T; ++t) {
        double acc = 0.0;
        for (auto c : combo)
          for (long j = 0; j < 9; ++j) {
            const long idx = t + (j - 4) * d;
            if (idx >= 0 && idx < T) acc += w[static_cast<std::size_t>(j)] * x.at(c, static_cast<std::size_t>(idx));
          }
        ASSERT_NEAR(out[static_cast<std::size_t>(t)], acc, 1e-9);
      }
    }
  }
}

TEST_F(MiniRocketFit, PpvOnFittingSampleIsOneMinusQuantile) {
  using namespace minirocket;
  const auto& p = *params_;
  const FeatureMatrix f = minirocket_transform(*train_, p, 0);
  const double tol = 1.0 / static_cast<double>(p.input_length);
  std::size_t feature = 0, checked = 0;
  for (std::size_t di = 0; di < p.dilations.size(); ++di)
    for (std::size_t k = 0; k < kNumKernels; ++k) {
      const std::size_t pair = di * kNumKernels + k;
      for (std::size_t j = 0; j < p.features_per_dilation[di]; ++j, ++feature) {
        if (!uses_padding(di, k)) continue;
        const double ppv = f(static_cast<Eigen::Index>(p.fit_samples[pair]), static_cast<Eigen::Index>(feature));
        ASSERT_NEAR(ppv, 1.0 - p.quantiles[feature], tol) << "feature " << feature;
        ++checked;
      }
    }
  EXPECT_GT(checked, p.num_features() / 3);
}

TEST_F(MiniRocketFit, ScaleInvariantWithInputNormalization) {
  Rng rng(77);
  const auto fresh = random_dataset(rng, 4, 5, 120);
  auto scaled = fresh;
  for (auto& s : scaled.samples)
    for (std::size_t c = 0; c < 5; ++c)
      for (auto& v : s.series.channel(c)) v *= 10.0;
  const FeatureMatrix a = minirocket_transform(fresh, *params_), b = minirocket_transform(scaled, *params_);
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1.0 / 120.0 + 1e-12);
  EXPECT_LE(static_cast<double>((a - b).cwiseAbs().cast<bool>().count()), 1e-3 * static_cast<double>(a.size()));
}

}  // namespace
}  // namespace exmts
