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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "semdvc/config.h"
#include "semdvc/dataset.h"
#include "semdvc/metrics.h"
#include "semdvc/model/concept_detector.h"
#include "semdvc/model/dvc_model.h"
#include "semdvc/model/training.h"
#include "semdvc/text.h"

namespace semdvc::model {

// Seconds covered by a sequence of `target` rows built from `raw_frames`
// frames: the padded tail extends the timeline past the duration.
double timeline_span(double duration, std::size_t raw_frames, std::size_t target);

// Resizes every modality (and the detector's concept probabilities when a
// detector is given) to `resize_length` rows.
VideoTensors make_video_tensors(const VideoRecord& record, std::int64_t resize_length,
                                ConceptDetector* detector = nullptr, std::size_t concept_modality = 0);

VideoTargets make_video_targets(const VideoRecord& record, double span, const TextVocabulary& vocab,
                                std::int64_t num_labels, std::size_t max_caption_len);

void save_text_vocabulary(const std::filesystem::path& path, const TextVocabulary& vocab);
TextVocabulary load_text_vocabulary(const std::filesystem::path& path);

TrainOptions train_options_from(const RunConfig& config);
// Also sets the torch thread count.
void seed_everything(const RunConfig& config);

std::filesystem::path concept_checkpoint_dir(const RunConfig& config);
std::filesystem::path model_checkpoint_dir(const RunConfig& config);

struct ConceptRun {
  std::filesystem::path checkpoint;
  std::vector<double> loss_curve;
  double train_micro_f1 = 0.0;
};
ConceptRun run_train_concepts(const RunConfig& config);

struct TrainRun {
  std::filesystem::path checkpoint;
  TrainHistory history;
};
TrainRun run_train(const RunConfig& config, const EpochCallback& on_epoch = {});

struct LoadedModel {
  RunConfig config;
  TextVocabulary vocab;
  DVCModel model{nullptr};
  std::optional<LoadedDetector> detector;
};
void save_model(const std::filesystem::path& dir, DVCModel& model, const RunConfig& config,
                const TextVocabulary& vocab);
LoadedModel load_model(const std::filesystem::path& dir);

std::vector<DVCResult> predict_records(LoadedModel& loaded, const std::vector<VideoRecord>& records);

// Loads the checkpoint, predicts every video of `manifest` and writes the
// prediction JSON to `output`.
std::vector<DVCResult> run_predict(const std::filesystem::path& checkpoint, const std::filesystem::path& manifest,
                                   const std::filesystem::path& output);

EvalReport run_evaluate(const std::filesystem::path& predictions, const std::filesystem::path& ground_truth,
                        const std::filesystem::path& report_out);

}  // namespace semdvc::model
