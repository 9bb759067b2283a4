// Copyright 2026 The semdvc Authors. All Rights Reserved.
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

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semdvc/config.h"
#include "semdvc/errors.h"
#include "semdvc/model/pipeline.h"
#include "semdvc/synthetic.h"

namespace fs = std::filesystem;
using namespace semdvc;

namespace {

// Options shared by the commands that read a RunConfig.
struct ConfigArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::int64_t> seed, epochs, max_events;
  std::optional<std::string> fusion, out;

  void attach(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "flat JSON config file");
    cmd->add_option("--set", sets, "override a config key, key=value (repeatable)");
    cmd->add_option("--seed", seed, "random seed (beats DVC_SEED)");
    cmd->add_option("--epochs", epochs, "training epochs");
    cmd->add_option("--fusion", fusion, "early or late")->check(CLI::IsMember({"early", "late"}));
    cmd->add_option("--max-events", max_events, "counter.max_events");
    cmd->add_option("--out", out, "run output directory (out.dir)");
  }

  RunConfig build() const {
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
    cfg.apply_overrides(sets);
    if (const char* env = std::getenv("DVC_SEED"); env != nullptr && *env != '\0') cfg.set("seed", env);
    if (seed) cfg.seed = *seed;
    if (epochs) cfg.epochs = *epochs;
    if (max_events) cfg.counter_max_events = *max_events;
    if (fusion) cfg.fusion_mode = *fusion;
    if (out) cfg.out_dir = *out;
    cfg.validate();
    return cfg;
  }
};

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ';';
  }
  return s;
}

int fail(const char* kind, const std::string& message, int code) {
  std::cerr << "semdvc: error: " << kind << ": " << one_line(message) << "\n";
  return code;
}

bool dir_nonempty(const fs::path& p) { return fs::exists(p) && (!fs::is_directory(p) || !fs::is_empty(p)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic-assisted dense video captioning"};
  app.require_subcommand(1);
  app.footer("Config keys (defaults):\n" + RunConfig::describe_keys() +
             "\nEnvironment: DVC_SEED overrides the config seed.\nExit codes: 0 ok, 1 user error, 2 internal error.");

  // make-synthetic
  auto* synth = app.add_subcommand("make-synthetic", "write a synthetic dataset");
  SyntheticOptions so;
  std::string synth_out;
  bool force = false;
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--seed", synth_seed, "random seed");
  synth->add_option("--videos", so.num_videos, "number of videos")->capture_default_str();
  synth->add_option("--max-events", so.max_events, "events per video, 1..10")->capture_default_str();
  synth->add_option("--feature-dim", so.feature_dim, "feature width per modality")->capture_default_str();
  synth->add_option("--modalities", so.modalities, "number of modalities")->capture_default_str();
  synth->add_flag("--force", force, "write into a non-empty directory");

  auto* concepts = app.add_subcommand("train-concepts", "train the frame concept detector");
  ConfigArgs concept_args;
  concept_args.attach(concepts);

  auto* train = app.add_subcommand("train", "train the captioning model");
  ConfigArgs train_args;
  train_args.attach(train);
  bool quiet = false;
  train->add_flag("-q,--quiet", quiet, "no per-epoch log");

  auto* predict = app.add_subcommand("predict", "predict events for a manifest");
  ConfigArgs predict_args;
  predict_args.attach(predict);
  std::string checkpoint, manifest, output, split = "train";
  predict->add_option("--checkpoint", checkpoint, "model checkpoint directory (default <out.dir>/model)");
  predict->add_option("--manifest", manifest, "manifest to predict (default from --split)");
  predict->add_option("--split", split, "train or val")->check(CLI::IsMember({"train", "val"}));
  predict->add_option("--output", output, "prediction JSON (default <out.dir>/predictions.json)");

  auto* evaluate = app.add_subcommand("evaluate", "score predictions against ground truth");
  std::string pred_path, gt_path, report_path;
  evaluate->add_option("--predictions", pred_path, "prediction JSON")->required();
  evaluate->add_option("--ground-truth", gt_path, "ground-truth manifest")->required();
  evaluate->add_option("--report", report_path, "report JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 1);
  }

  try {
    if (synth->parsed()) {
      if (dir_nonempty(synth_out) && !force) {
        return fail("io", "output directory " + synth_out + " is not empty (use --force)", 1);
      }
      so.seed = 0;
      if (const char* env = std::getenv("DVC_SEED"); env != nullptr && *env != '\0') {
        try {
          so.seed = std::stoull(env);
        } catch (const std::exception&) {
          return fail("config", std::string("DVC_SEED is not an unsigned integer: ") + env, 1);
        }
      }
      if (synth_seed) so.seed = *synth_seed;
      const auto ds = generate_synthetic_dataset(so);
      save_synthetic_dataset(synth_out, ds);
      std::cout << "wrote " << ds.records.size() << " videos to " << synth_out << "\n";
    } else if (concepts->parsed()) {
      const RunConfig cfg = concept_args.build();
      const auto run = model::run_train_concepts(cfg);
      std::cout << "concept detector: " << run.checkpoint.string() << "\n"
                << "final loss " << (run.loss_curve.empty() ? 0.0 : run.loss_curve.back()) << ", train micro-F1 "
                << std::fixed << std::setprecision(4) << run.train_micro_f1 << "\n";
    } else if (train->parsed()) {
      const RunConfig cfg = train_args.build();
      fs::create_directories(cfg.out_dir);
      cfg.save(fs::path(cfg.out_dir) / "config.json");
      const auto run = model::run_train(cfg, [&](std::int64_t epoch, const model::LossBreakdown& l) {
        if (quiet) return;
        std::cout << "epoch " << (epoch + 1) << " total " << l.total << " caption " << l.caption << " loc " << l.loc
                  << " cls " << l.cls << " counter " << l.counter << "\n";
      });
      std::cout << "model: " << run.checkpoint.string() << "\n";
    } else if (predict->parsed()) {
      const RunConfig cfg = predict_args.build();
      const fs::path ckpt = checkpoint.empty() ? model::model_checkpoint_dir(cfg) : fs::path(checkpoint);
      std::string m = manifest;
      if (m.empty()) m = split == "val" ? cfg.data_val_manifest : cfg.data_manifest;
      if (m.empty()) return fail("config", "no manifest for split '" + split + "'", 1);
      const fs::path out = output.empty() ? fs::path(cfg.out_dir) / "predictions.json" : fs::path(output);
      const auto results = model::run_predict(ckpt, m, out);
      std::cout << "predicted " << results.size() << " videos -> " << out.string() << "\n";
    } else if (evaluate->parsed()) {
      const auto report = model::run_evaluate(pred_path, gt_path, report_path);
      std::cout << report.to_table();
    }
  } catch (const ConfigError& e) {
    return fail("config", e.what(), 1);
  } catch (const ValidationError& e) {
    return fail("validation", e.what(), 1);
  } catch (const FormatError& e) {
    return fail("format", e.what(), 1);
  } catch (const IoError& e) {
    return fail("io", e.what(), 1);
  } catch (const UserError& e) {
    return fail("user", e.what(), 1);
  } catch (const NumericalError& e) {
    return fail("numerical", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 2);
  }
  return 0;
}
