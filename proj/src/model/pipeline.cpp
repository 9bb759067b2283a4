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

#include "semdvc/model/pipeline.h"

#include <algorithm>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "semdvc/concepts.h"
#include "semdvc/errors.h"
#include "semdvc/model/checkpoint.h"
#include "semdvc/resample.h"
#include "semdvc/synthetic.h"

namespace semdvc::model {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

torch::Tensor matrix_tensor(const Matrix& m) {
  return torch::from_blob(const_cast<float*>(m.data.data()),
                          {static_cast<std::int64_t>(m.rows), static_cast<std::int64_t>(m.cols)}, torch::kFloat)
      .clone();
}

Matrix tensor_matrix(const torch::Tensor& t) {
  auto c = t.to(torch::kFloat).contiguous();
  Matrix m(static_cast<std::size_t>(c.size(0)), static_cast<std::size_t>(c.size(1)));
  std::copy(c.data_ptr<float>(), c.data_ptr<float>() + c.numel(), m.data.begin());
  return m;
}

std::vector<VideoRecord> load_records(const RunConfig& cfg, const std::string& manifest) {
  if (manifest.empty()) throw ConfigError("data.manifest is not set");
  std::size_t labels = static_cast<std::size_t>(cfg.labels_size);
  if (!cfg.data_labels.empty()) {
    const auto names = load_label_space(cfg.data_labels);
    if (names.size() != labels) {
      throw ConfigError("labels.size is " + std::to_string(labels) + " but " + cfg.data_labels + " lists " +
                        std::to_string(names.size()) + " labels");
    }
  }
  auto records = load_dataset(manifest, labels);
  if (records.empty()) throw ValidationError("manifest has no videos: " + manifest);
  return records;
}

PosLexicon lexicon_for(const RunConfig& cfg) {
  if (!cfg.data_lexicon.empty()) return load_pos_lexicon(cfg.data_lexicon);
  const fs::path guess = fs::path(cfg.data_manifest).parent_path() / "pos_lexicon.json";
  if (fs::exists(guess)) return load_pos_lexicon(guess);
  throw ConfigError("data.lexicon is not set and no pos_lexicon.json sits beside the manifest");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
}

}  // namespace

double timeline_span(double duration, std::size_t raw_frames, std::size_t target) {
  if (raw_frames == 0) return duration;
  return duration * std::max(1.0, static_cast<double>(target) / static_cast<double>(raw_frames));
}

VideoTensors make_video_tensors(const VideoRecord& record, std::int64_t resize_length, ConceptDetector* detector,
                                std::size_t concept_modality) {
  if (resize_length <= 0) throw ConfigError("resize.length must be positive");
  const auto target = static_cast<std::size_t>(resize_length);
  VideoTensors v;
  v.id = record.id;
  v.duration = record.duration;
  v.span = timeline_span(record.duration, record.frame_count(), target);

  std::vector<std::uint8_t> mask;
  for (const auto& m : record.features) {
    FixedLengthSequence seq = resize_to_fixed_length(m, target);
    v.modalities.push_back(matrix_tensor(seq.data));
    mask = seq.mask;
  }
  if (detector != nullptr) {
    if (concept_modality >= record.features.size()) {
      throw ConfigError("concepts.modality " + std::to_string(concept_modality) + " out of range for video '" +
                        record.id + "'");
    }
    auto probs = detect_concepts(*detector, matrix_tensor(record.features[concept_modality]));
    v.concepts = matrix_tensor(resize_to_fixed_length(tensor_matrix(probs), target).data);
  }
  auto mt = torch::zeros({resize_length}, torch::kBool);
  for (std::size_t i = 0; i < mask.size(); ++i) mt[static_cast<std::int64_t>(i)] = mask[i] != 0;
  v.mask = mt;
  return v;
}

VideoTargets make_video_targets(const VideoRecord& record, double span, const TextVocabulary& vocab,
                                std::int64_t num_labels, std::size_t max_caption_len) {
  VideoTargets t;
  const auto g = static_cast<std::int64_t>(record.events.size());
  t.intervals = torch::zeros({g, 2}, torch::kFloat);
  t.labels = torch::zeros({g, num_labels}, torch::kFloat);
  const double s = span > 0.0 ? span : record.duration;
  for (std::int64_t i = 0; i < g; ++i) {
    const auto& e = record.events[static_cast<std::size_t>(i)];
    t.intervals[i][0] = std::clamp(e.timestamp.start / s, 0.0, 1.0);
    t.intervals[i][1] = std::clamp(e.timestamp.end / s, 0.0, 1.0);
    for (int l : e.labels) {
      if (l < 0 || l >= num_labels) {
        throw ValidationError("video '" + record.id + "' event " + std::to_string(i) + ": label " +
                              std::to_string(l) + " outside [0, " + std::to_string(num_labels) + ")");
      }
      t.labels[i][l] = 1.0f;
    }
    t.captions.push_back(vocab.encode(e.caption, max_caption_len));
  }
  return t;
}

void save_text_vocabulary(const fs::path& path, const TextVocabulary& vocab) {
  write_text(path, json(vocab.tokens()).dump(1) + "\n");
}

TextVocabulary load_text_vocabulary(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> tokens;
  try {
    tokens = json::parse(in).get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw FormatError("text vocabulary must be a JSON list of strings: " + path.string());
  }
  const TextVocabulary reserved;
  if (tokens.size() < TextVocabulary::kNumReserved ||
      !std::equal(reserved.tokens().begin(), reserved.tokens().end(), tokens.begin())) {
    throw FormatError("text vocabulary does not start with the reserved tokens: " + path.string());
  }
  return TextVocabulary(std::vector<std::string>(tokens.begin() + TextVocabulary::kNumReserved, tokens.end()));
}

TrainOptions train_options_from(const RunConfig& cfg) {
  TrainOptions o;
  o.epochs = cfg.epochs;
  o.learning_rate = cfg.lr;
  o.clip_norm = cfg.grad_clip_norm;
  o.cosine_schedule = cfg.lr_schedule == "cosine";
  o.seed = static_cast<std::uint64_t>(cfg.seed);
  o.loss = {cfg.loss_caption, cfg.loss_loc, cfg.loss_cls, cfg.loss_counter};
  o.match = {cfg.match_loc, cfg.match_cls};
  o.focal = {cfg.focal_gamma, cfg.focal_alpha};
  return o;
}

void seed_everything(const RunConfig& cfg) {
  torch::manual_seed(static_cast<std::uint64_t>(cfg.seed));
  torch::set_num_threads(static_cast<int>(std::max<std::int64_t>(1, cfg.threads)));
}

fs::path concept_checkpoint_dir(const RunConfig& cfg) {
  if (!cfg.concepts_checkpoint.empty()) return cfg.concepts_checkpoint;
  return fs::path(cfg.out_dir) / "concepts";
}

fs::path model_checkpoint_dir(const RunConfig& cfg) { return fs::path(cfg.out_dir) / "model"; }

ConceptRun run_train_concepts(const RunConfig& cfg) {
  cfg.validate();
  seed_everything(cfg);
  const auto records = load_records(cfg, cfg.data_manifest);
  const auto vocab = build_concept_vocabulary(records, lexicon_for(cfg), static_cast<std::size_t>(cfg.concepts_count));
  const auto data = build_detector_dataset(records, vocab, static_cast<std::size_t>(cfg.concepts_modality));

  ConceptDetector detector(data.frames.size(1), static_cast<std::int64_t>(vocab.size()), cfg.concepts_hidden);
  DetectorTrainOptions opt;
  opt.gamma = cfg.focal_gamma;
  opt.alpha = cfg.focal_alpha;
  opt.epochs = cfg.concepts_epochs;
  opt.learning_rate = cfg.concepts_lr;
  opt.seed = static_cast<std::uint64_t>(cfg.seed);

  ConceptRun run;
  run.loss_curve = train_concept_detector(detector, data.frames, data.targets, data.mask, opt).loss_curve;
  auto probs = detect_concepts(detector, data.frames);
  auto sel = data.mask.nonzero().squeeze(1);
  run.train_micro_f1 = micro_f1(probs.index_select(0, sel), data.targets.index_select(0, sel));

  run.checkpoint = concept_checkpoint_dir(cfg);
  fs::create_directories(run.checkpoint);
  save_detector(run.checkpoint, detector, vocab);
  cfg.save(run.checkpoint / "config.json");
  return run;
}

TrainRun run_train(const RunConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  seed_everything(cfg);
  const auto records = load_records(cfg, cfg.data_manifest);
  const auto vocab = build_text_vocabulary(records, static_cast<std::size_t>(cfg.text_min_freq));

  std::optional<LoadedDetector> detector;
  if (cfg.concepts_enabled) {
    const fs::path dir = concept_checkpoint_dir(cfg);
    if (!fs::exists(dir / "manifest.json")) {
      throw ConfigError("concepts.enabled is true but no concept detector checkpoint exists at " + dir.string() +
                        "; run train-concepts first or set concepts.enabled=false");
    }
    detector = load_detector(dir);
  }

  ModelDims dims;
  for (const auto& m : records.front().features) dims.modality_dims.push_back(static_cast<std::int64_t>(m.cols));
  dims.num_concepts = detector ? static_cast<std::int64_t>(detector->vocab.size()) : 0;
  dims.vocab_size = static_cast<std::int64_t>(vocab.size());
  dims.num_labels = cfg.labels_size;

  std::vector<VideoTensors> videos;
  std::vector<VideoTargets> targets;
  for (const auto& r : records) {
    videos.push_back(make_video_tensors(r, cfg.resize_length, detector ? &detector->detector : nullptr,
                                        static_cast<std::size_t>(cfg.concepts_modality)));
    targets.push_back(make_video_targets(r, videos.back().span, vocab, cfg.labels_size,
                                         static_cast<std::size_t>(cfg.caption_max_len)));
  }

  DVCModel model(cfg, dims);
  TrainRun run;
  run.history = train_model(model, videos, targets, train_options_from(cfg), on_epoch);
  run.checkpoint = model_checkpoint_dir(cfg);
  save_model(run.checkpoint, model, cfg, vocab);
  if (detector) save_detector(run.checkpoint / "concepts", detector->detector, detector->vocab);

  json curve = json::array();
  for (const auto& e : run.history.epochs) {
    curve.push_back({{"caption", e.caption}, {"loc", e.loc}, {"cls", e.cls}, {"counter", e.counter}, {"total", e.total}});
  }
  write_text(run.checkpoint / "loss_curve.json", curve.dump(1) + "\n");
  return run;
}

void save_model(const fs::path& dir, DVCModel& model, const RunConfig& cfg, const TextVocabulary& vocab) {
  fs::create_directories(dir);
  const auto& d = model->dims();
  json extra;
  extra["kind"] = "dvc_model";
  extra["config"] = json::parse(cfg.to_json_text());
  extra["config_hash"] = cfg.hash();
  extra["dims"] = {{"modality_dims", d.modality_dims},
                   {"num_concepts", d.num_concepts},
                   {"vocab_size", d.vocab_size},
                   {"num_labels", d.num_labels}};
  save_module(dir, *model, extra);
  save_text_vocabulary(dir / "text_vocab.json", vocab);
  cfg.save(dir / "config.json");
}

LoadedModel load_model(const fs::path& dir) {
  const auto manifest = read_manifest(dir);
  if (manifest.value("kind", "") != "dvc_model") throw FormatError("not a model checkpoint: " + dir.string());
  LoadedModel out;
  out.config = RunConfig::from_json_text(manifest.at("config").dump());
  out.vocab = load_text_vocabulary(dir / "text_vocab.json");
  ModelDims dims;
  const auto& jd = manifest.at("dims");
  dims.modality_dims = jd.at("modality_dims").get<std::vector<std::int64_t>>();
  dims.num_concepts = jd.at("num_concepts").get<std::int64_t>();
  dims.vocab_size = jd.at("vocab_size").get<std::int64_t>();
  dims.num_labels = jd.at("num_labels").get<std::int64_t>();
  if (dims.vocab_size != static_cast<std::int64_t>(out.vocab.size())) {
    throw FormatError("text vocabulary size does not match the checkpoint: " + dir.string());
  }
  out.model = DVCModel(out.config, dims);
  load_module(dir, *out.model);
  out.model->eval();
  if (dims.num_concepts > 0) {
    out.detector = load_detector(dir / "concepts");
    if (static_cast<std::int64_t>(out.detector->vocab.size()) != dims.num_concepts) {
      throw FormatError("concept detector size does not match the checkpoint: " + dir.string());
    }
  }
  return out;
}

std::vector<DVCResult> predict_records(LoadedModel& loaded, const std::vector<VideoRecord>& records) {
  const auto& cfg = loaded.config;
  std::vector<DVCResult> results;
  for (const auto& r : records) {
    auto v = make_video_tensors(r, cfg.resize_length, loaded.detector ? &loaded.detector->detector : nullptr,
                                static_cast<std::size_t>(cfg.concepts_modality));
    results.push_back(predict_video(loaded.model, v, loaded.vocab, cfg.caption_max_len));
  }
  return results;
}

std::vector<DVCResult> run_predict(const fs::path& checkpoint, const fs::path& manifest, const fs::path& output) {
  LoadedModel loaded = load_model(checkpoint);
  seed_everything(loaded.config);
  const auto records = load_dataset(manifest, static_cast<std::size_t>(loaded.config.labels_size));
  auto results = predict_records(loaded, records);
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  write_predictions(output, results);
  loaded.config.save(fs::path(output).replace_extension(".config.json"));
  return results;
}

EvalReport run_evaluate(const fs::path& predictions, const fs::path& ground_truth, const fs::path& report_out) {
  const auto results = read_predictions(predictions);
  const auto gt = load_ground_truth(ground_truth);
  EvalReport report = evaluate_dvc(results, gt);
  if (!report_out.empty()) {
    if (report_out.has_parent_path()) fs::create_directories(report_out.parent_path());
    write_text(report_out, report.to_json());
  }
  return report;
}

}  // namespace semdvc::model
