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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "exmts/commands.hpp"
#include "exmts/error.hpp"

namespace fs = std::filesystem;
using exmts::ErrorKind;

namespace {

struct Options {
  std::string config;
  std::size_t workers = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "json";
};

nlohmann::json load_overrides(const Options& o) {
  nlohmann::json j = o.config.empty() ? nlohmann::json::object() : exmts::read_json_file(o.config);
  if (o.seed) j["transform"]["seed"] = *o.seed;
  return j;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  exmts::write_bytes(o.out, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exercise repetition classification from pose keypoint sequences"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config, "JSON config file");
    cmd->add_option("--workers", opt.workers, "worker threads (0 = all cores)");
    cmd->add_option("--seed", opt.seed, "seed override");
  };

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic keypoint corpus");
  add_common(synth);
  std::optional<std::size_t> participants;
  synth->add_option("--out", opt.out, "output directory")->required();
  synth->add_option("--participants", participants, "participants (each records every class)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "keypoint clips -> dataset file");
  add_common(ingest);
  std::string manifest;
  ingest->add_option("manifest", manifest, "clip manifest (.csv or .json)")->required();
  ingest->add_option("--out", opt.out, "dataset file to write")->required();

  // train
  auto* train = app.add_subcommand("train", "fit transform, scaler and classifier on a dataset");
  add_common(train);
  std::string dataset;
  train->add_option("dataset", dataset, "dataset file")->required();
  train->add_option("--out", opt.out, "model file to write")->required();

  // predict
  auto* predict = app.add_subcommand("predict", "classify every repetition of one clip");
  add_common(predict);
  std::string model, clip;
  predict->add_option("model", model, "model file")->required();
  predict->add_option("clip", clip, "directory of per-frame keypoint files")->required();
  predict->add_option("--out", opt.out, "write JSON here instead of stdout");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "participant-grouped train/test evaluation");
  add_common(evaluate);
  std::optional<std::size_t> n_splits;
  std::vector<std::uint64_t> seeds;
  evaluate->add_option("dataset", dataset, "dataset file")->required();
  evaluate->add_option("--splits", n_splits, "number of splits (seeds 0..n-1)");
  evaluate->add_option("--seeds", seeds, "explicit split seeds");
  evaluate->add_option("--out", opt.out, "write the report here");
  evaluate->add_option("--format", opt.format, "report format for --out")->check(CLI::IsMember({"json", "csv"}));

  // channels
  auto* channels = app.add_subcommand("channels", "rank dataset channels by class-centroid separation");
  std::optional<std::size_t> keep;
  channels->add_option("dataset", dataset, "dataset file")->required();
  channels->add_option("--keep", keep, "keep this many channels instead of the elbow cut");
  channels->add_option("--out", opt.out, "write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth) {
      nlohmann::json j = opt.config.empty() ? nlohmann::json::object() : exmts::read_json_file(opt.config);
      if (opt.seed) j["seed"] = *opt.seed;
      if (participants) j["participants"] = *participants;
      const auto summary = exmts::cmd_synth(exmts::synth_config_from_json(j), opt.out);
      std::cout << "wrote " << summary.clips << " clips (" << summary.frames << " frames), manifest "
                << summary.manifest.string() << "\n";
    } else if (*ingest) {
      const auto config = exmts::config_from_json(load_overrides(opt));
      const auto summary = exmts::cmd_ingest(manifest, config, opt.out, opt.workers);
      std::size_t rejected = 0;
      for (const auto& c : summary.clips) {
        std::cout << c.clip_id << ": ";
        if (c.rejected) {
          ++rejected;
          std::cout << "rejected";
          for (const auto& r : c.reasons) std::cout << "; " << r;
        } else {
          std::cout << c.reps << " reps, " << c.dropped << " dropped";
          if (c.count_mismatch) std::cout << " (repetition count mismatch)";
        }
        std::cout << "\n";
        for (const auto& w : c.warnings) std::cerr << c.clip_id << ": warning: " << w << "\n";
      }
      std::cout << "dataset: " << summary.dataset.size() << " repetitions from "
                << summary.clips.size() - rejected << " clips, config hash "
                << exmts::hex64(summary.dataset.config_hash) << " -> " << opt.out << "\n";
    } else if (*train) {
      const auto m = exmts::cmd_train(dataset, load_overrides(opt), opt.out, opt.workers);
      std::cout << "trained on " << m.channel_names.size() << " channels x " << m.length << ", "
                << m.scaler.mean.size() << " features, alpha " << m.ridge.alpha << " -> " << opt.out << "\n";
    } else if (*predict) {
      std::optional<nlohmann::json> cfg;
      if (!opt.config.empty()) cfg = exmts::read_json_file(opt.config);
      const auto result = exmts::cmd_predict(model, clip, cfg, opt.workers);
      emit(opt, result.dump(2) + "\n");
    } else if (*evaluate) {
      auto overrides = load_overrides(opt);
      if (!seeds.empty()) {
        overrides["eval"]["seeds"] = seeds;
      } else if (n_splits) {
        std::vector<std::uint64_t> s;
        for (std::size_t i = 0; i < *n_splits; ++i) s.push_back(i);
        overrides["eval"]["seeds"] = s;
      }
      const auto report = exmts::cmd_evaluate(dataset, overrides, opt.workers);
      std::cout << exmts::to_table(report);
      if (!opt.out.empty())
        exmts::write_bytes(opt.out, opt.format == "csv" ? exmts::to_csv(report) : exmts::to_json(report).dump(2) + "\n");
    } else if (*channels) {
      const auto file = exmts::load_dataset(dataset);
      const auto ranking = exmts::select_channels_ecp(file.dataset, keep);
      nlohmann::json out = nlohmann::json::array();
      for (auto c : ranking.ranking)
        out.push_back({{"channel", file.dataset.channel_names[c]},
                       {"score", ranking.scores[c]},
                       {"selected", std::find(ranking.selected.begin(), ranking.selected.end(), c) !=
                                        ranking.selected.end()}});
      emit(opt, out.dump(2) + "\n");
    }
  } catch (const exmts::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exmts::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
