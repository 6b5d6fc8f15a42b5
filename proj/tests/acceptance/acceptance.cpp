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

// Acceptance run: one PASS / FAIL / SKIP line per criterion.
//
//   exmts_acceptance [--out DIR] [--workers N]
//
// Criterion 8 runs only when EXMTS_MP_DATASET names a clip manifest of the
// public Military Press keypoint dataset.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "exmts/commands.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace exmts;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Criterion 1 ---------------------------------------------------------------

Outcome oracle_suites() {
  const auto t0 = Clock::now();
  std::vector<std::string> failures;
  Rng rng(2026);

  double conv_err = 0.0;
  const int pairs = 64;
  for (int i = 0; i < pairs; ++i) {
    const std::size_t C = 1 + rng.below(8), T = 12 + rng.below(250);
    const auto bank = generate_kernels(1, C, T, rng.next_u64());
    const auto x = oracle::random_series(rng, C, T);
    const auto got = apply_kernel(x, bank.kernels[0]);
    const auto want = oracle::apply(x, bank.kernels[0]);
    conv_err = std::max({conv_err, std::abs(got.max - want.max), std::abs(got.ppv - want.ppv)});
  }
  if (!(conv_err <= 1e-9)) failures.push_back(fmt("convolution err %.3g", conv_err));

  FeatureMatrix X(10, 5);
  for (Eigen::Index r = 0; r < 10; ++r)
    for (Eigen::Index c = 0; c < 5; ++c) X(r, c) = rng.normal(0.0, 1.0 + static_cast<double>(c));
  Eigen::MatrixXd Y = -Eigen::MatrixXd::Ones(10, 4);
  for (Eigen::Index r = 0; r < 10; ++r) Y(r, static_cast<Eigen::Index>(rng.below(4))) = 1.0;
  const auto alphas = default_alpha_grid();
  const auto fast = ridge_loo_residuals(X, Y, alphas);
  double loo_err = 0.0;
  for (std::size_t a = 0; a < alphas.size(); ++a)
    loo_err = std::max(loo_err, (fast[a] - oracle::loo_refit_residuals(X, Y, alphas[a])).cwiseAbs().maxCoeff());
  if (!(loo_err <= 1e-8)) failures.push_back(fmt("LOO err %.3g", loo_err));

  double sg_err = 0.0;
  for (std::size_t w : {5u, 11u, 21u})
    for (std::size_t order : {2u, 3u}) {
      std::vector<double> x(150);
      for (auto& v : x) v = rng.normal(0.0, 10.0);
      const auto a = smooth_savgol(x, w, order), b = oracle::savgol(x, w, order);
      for (std::size_t i = 0; i < x.size(); ++i) sg_err = std::max(sg_err, std::abs(a[i] - b[i]));
    }
  if (!(sg_err <= 1e-9)) failures.push_back(fmt("savgol err %.3g", sg_err));

  int peak_mismatch = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + rng.below(300);
    auto x = trial % 2 ? oracle::quantized_signal(rng, n, 6) : std::vector<double>(n);
    if (trial % 2 == 0)
      for (auto& v : x) v = rng.normal();
    const std::size_t d = 1 + rng.below(30);
    const double p = rng.uniform(0.0, 3.0);
    if (detect_peaks(x, {d, p}) != oracle::peaks(x, d, p)) ++peak_mismatch;
  }
  if (peak_mismatch) failures.push_back(fmt("%d peak mismatches", peak_mismatch));

  double spline_err = 0.0;
  auto resample = [](const std::vector<double>& y, std::size_t n) { return resample_cubic(y, n); };
  for (auto [n, count] : std::vector<std::pair<std::size_t, std::size_t>>{{90, 161}, {200, 100}, {60, 300}}) {
    spline_err = std::max(spline_err, oracle::resample_relative_error([](double t) { return 2.0 + std::sin(t / 6.0); }, n, count, resample));
    spline_err = std::max(spline_err, oracle::resample_relative_error([](double t) { return std::exp(-t / 70.0) * std::cos(t / 8.0); }, n, count, resample));
  }
  if (!(spline_err <= 1e-3)) failures.push_back(fmt("spline rel err %.3g", spline_err));

  const double secs = seconds_since(t0);
  if (!(secs < 30.0)) failures.push_back(fmt("runtime %.1f s", secs));
  std::string detail = fmt("conv %.1e (%d pairs), LOO %.1e, savgol %.1e, peaks %d mismatches, spline %.1e; %.1f s",
                           conv_err, pairs, loo_err, sg_err, peak_mismatch, spline_err, secs);
  for (const auto& f : failures) detail += "; FAILED " + f;
  return {failures.empty() ? Status::Pass : Status::Fail, detail};
}

// Criteria 2-7 share one synthetic corpus ------------------------------------

struct Corpus {
  fs::path root;
  fs::path manifest;
  std::vector<KeypointSequence> clips;
};

PipelineConfig rocket_config() {
  PipelineConfig c;
  c.transform.kind = TransformKind::Rocket;
  c.transform.num_kernels = 10000;
  c.length = 161;
  c.normalize = false;
  c.eval.seeds = {0, 1, 2};
  return c;
}

double eval_accuracy(const std::vector<KeypointSequence>& clips, const PipelineConfig& c, std::size_t workers) {
  const auto d = ingest_sequences(clips, c, workers).dataset;
  return evaluate(d, c, c.eval.seeds, workers).mean_accuracy;
}

std::string accuracy_list(const EvalReport& r) {
  std::string s;
  for (const auto& split : r.splits) s += (s.empty() ? "" : ", ") + fmt("%.3f", split.accuracy);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string out = (fs::temp_directory_path() / "exmts_acceptance").string();
  std::size_t workers = 0;
  app.add_option("--out", out, "scratch directory");
  app.add_option("--workers", workers, "worker threads (0 = all cores)");
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {Status::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
    if (o.status == Status::Fail) ++failed;
    std::cout << "[" << tag << "] " << id << ". " << name << ": " << o.detail << std::endl;
  };

  report(1, "oracle suites", oracle_suites);

  const fs::path root(out);
  fs::remove_all(root);
  fs::create_directories(root);
  Corpus corpus;
  corpus.root = root / "synth";
  SynthConfig synth;
  synth.participants = 10;
  synth.reps_per_clip = 10;
  synth.seed = 0;
  corpus.manifest = cmd_synth(synth, corpus.root).manifest;
  for (const auto& row : read_manifest(corpus.manifest)) corpus.clips.push_back(load_sequence(row.path, row));

  const auto base = rocket_config();
  std::optional<EvalReport> base_report;
  report(2, "synthetic end-to-end accuracy (ROCKET K=10000, L=161, no normalization, 3 grouped splits)", [&] {
    const auto t0 = Clock::now();
    const auto ds_path = root / "ds_161.bin";
    cmd_ingest(corpus.manifest, base, ds_path, workers);
    base_report = evaluate(load_dataset(ds_path).dataset, base, base.eval.seeds, workers);
    const double secs = seconds_since(t0);
    const double acc = base_report->mean_accuracy;
    return Outcome{acc >= 0.95 && secs <= 120.0 ? Status::Pass : Status::Fail,
                   fmt("mean %.4f (splits %s; need >= 0.95), %zu reps, %.1f s (need <= 120 s)", acc,
                       accuracy_list(*base_report).c_str(), base_report->num_samples, secs)};
  });

  report(3, "normalization ablation direction", [&] {
    if (!base_report) return Outcome{Status::Fail, "criterion 2 did not produce a baseline"};
    auto c = base;
    c.normalize = true;
    const double on = eval_accuracy(corpus.clips, c, workers);
    const double off = base_report->mean_accuracy;
    return Outcome{on < off ? Status::Pass : Status::Fail,
                   fmt("normalization on %.4f vs off %.4f (need on < off)", on, off)};
  });

  report(4, "resampling-length insensitivity", [&] {
    if (!base_report) return Outcome{Status::Fail, "criterion 2 did not produce a baseline"};
    std::vector<std::pair<std::size_t, double>> accs = {{161, base_report->mean_accuracy}};
    for (std::size_t L : {100u, 300u}) {
      auto c = base;
      c.length = L;
      accs.emplace_back(L, eval_accuracy(corpus.clips, c, workers));
    }
    double lo = 1.0, hi = 0.0;
    std::string detail;
    for (auto [L, a] : accs) {
      lo = std::min(lo, a);
      hi = std::max(hi, a);
      detail += fmt("L=%zu %.4f; ", L, a);
    }
    return Outcome{hi - lo <= 0.03 + 1e-12 ? Status::Pass : Status::Fail,
                   detail + fmt("spread %.1f pp (need <= 3)", 100.0 * (hi - lo))};
  });

  report(5, "frame-step robustness", [&] {
    if (!base_report) return Outcome{Status::Fail, "criterion 2 did not produce a baseline"};
    auto c = base;
    c.frame_step = 3;
    const double step3 = eval_accuracy(corpus.clips, c, workers);
    const double drop = base_report->mean_accuracy - step3;
    return Outcome{drop <= 0.03 + 1e-12 ? Status::Pass : Status::Fail,
                   fmt("frame_step 1 %.4f, frame_step 3 %.4f, drop %.1f pp (need <= 3)", base_report->mean_accuracy,
                       step3, 100.0 * drop)};
  });

  const auto model_path = root / "model_a.bin";
  report(6, "determinism", [&] {
    const auto ds_path = root / "ds_161.bin";
    const nlohmann::json overrides = {{"transform", {{"kind", "rocket"}, {"num_kernels", 10000}, {"seed", 0}}}};
    cmd_train(ds_path, overrides, model_path, workers);
    cmd_train(ds_path, overrides, root / "model_b.bin", workers == 0 ? 1 : workers + 1);
    const bool same_model = read_bytes(model_path) == read_bytes(root / "model_b.bin");
    const auto again = evaluate(load_dataset(ds_path).dataset, base, base.eval.seeds, workers == 1 ? 2 : 1);
    bool same_eval = base_report.has_value() && again.splits.size() == base_report->splits.size();
    for (std::size_t i = 0; same_eval && i < again.splits.size(); ++i)
      same_eval = again.splits[i].accuracy == base_report->splits[i].accuracy &&
                  again.splits[i].confusion == base_report->splits[i].confusion;
    return Outcome{same_model && same_eval ? Status::Pass : Status::Fail,
                   fmt("model files %s (%zu bytes), evaluation accuracies %s", same_model ? "byte-identical" : "DIFFER",
                       static_cast<std::size_t>(fs::file_size(model_path)), same_eval ? "identical" : "DIFFER")};
  });

  report(7, "near-real-time prediction", [&] {
    if (!fs::exists(model_path)) return Outcome{Status::Fail, "criterion 6 did not produce a model"};
    const auto clip_dir = corpus.root / "clips" / "P001_N";
    const auto t0 = Clock::now();
    const auto result = cmd_predict(model_path, clip_dir, std::nullopt, workers);
    const double secs = seconds_since(t0);
    const std::size_t reps = result["repetitions"].size();
    return Outcome{secs <= 2.0 && reps == 10 ? Status::Pass : Status::Fail,
                   fmt("%zu repetitions predicted in %.3f s (need 10 in <= 2 s)", reps, secs)};
  });

  report(8, "public dataset accuracy", [&] {
    const char* manifest = std::getenv("EXMTS_MP_DATASET");
    if (!manifest || !*manifest) return Outcome{Status::Skip, "EXMTS_MP_DATASET not set; dataset not available"};
    std::vector<KeypointSequence> clips;
    for (const auto& row : read_manifest(manifest)) clips.push_back(load_sequence(row.path, row));
    const double rocket = eval_accuracy(clips, base, workers);
    auto mini = base;
    mini.transform.kind = TransformKind::MiniRocket;
    const double minirocket = eval_accuracy(clips, mini, workers);
    return Outcome{rocket >= 0.80 && minirocket >= 0.72 ? Status::Pass : Status::Fail,
                   fmt("ROCKET %.4f (need >= 0.80), MiniROCKET %.4f (need >= 0.72), %zu clips", rocket, minirocket,
                       clips.size())};
  });

  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << std::endl;
  return failed ? 1 : 0;
}
