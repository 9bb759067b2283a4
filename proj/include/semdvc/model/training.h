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
#include <functional>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "semdvc/matching.h"
#include "semdvc/model/dvc_model.h"
#include "semdvc/ranking.h"
#include "semdvc/text.h"

namespace semdvc::model {

struct LossWeights {
  double caption = 1.0;
  double loc = 2.0;
  double cls = 1.0;
  double counter = 0.5;
};

struct MatchWeights {
  double loc = 2.0;
  double cls = 1.0;
};

struct FocalParams {
  double gamma = 2.0;
  double alpha = 0.25;
};

struct LossBreakdown {
  double caption = 0.0;
  double loc = 0.0;
  double cls = 0.0;
  double counter = 0.0;
  double total = 0.0;
};

// Ground truth of one video in the model's normalized time frame.
struct VideoTargets {
  torch::Tensor intervals;  // (G, 2) normalized by the video's span
  torch::Tensor labels;     // (G, C) multi-hot, C = label space size
  std::vector<std::vector<std::int64_t>> captions;  // token ids ending with the end token
  std::int64_t count() const { return intervals.defined() ? intervals.size(0) : 0; }
};

// cost(i, j) = loc * (1 - gIoU(l_i, gt_j)) + cls * focal(y_i, labels_j).
// The label term is skipped when label_probs is undefined.
CostMatrix matching_cost(const torch::Tensor& intervals, const torch::Tensor& label_probs,
                         const VideoTargets& targets, const MatchWeights& weights, const FocalParams& focal);

struct LossTerms {
  torch::Tensor caption, loc, cls, counter, total;
  LossBreakdown values() const;
};

// Caption and localization losses use matched queries only; the
// classification loss covers all queries (unmatched target all-zero); the
// counter is trained towards min(G, maxEvents). With no ground truth the
// caption and localization terms are zero.
LossTerms compute_losses(DVCModel& model, const HeadOutputs& outputs, const MatchResult& match,
                         const VideoTargets& targets, const LossWeights& weights, const FocalParams& focal);

struct TrainOptions {
  std::int64_t epochs = 30;
  double learning_rate = 1e-4;
  double clip_norm = 0.0;  // <= 0 disables
  bool cosine_schedule = false;
  std::uint64_t seed = 0;
  LossWeights loss;
  MatchWeights match;
  FocalParams focal;
};

struct TrainHistory {
  std::vector<LossBreakdown> epochs;  // mean over videos
};

using EpochCallback = std::function<void(std::int64_t epoch, const LossBreakdown&)>;

// Adam over all model parameters, one step per video in a seeded per-epoch
// order. Throws NumericalError on a non-finite loss.
TrainHistory train_model(DVCModel& model, const std::vector<VideoTensors>& videos,
                         const std::vector<VideoTargets>& targets, const TrainOptions& options,
                         const EpochCallback& on_epoch = {});

// Forward pass + greedy captions for every query, then ranking and top-K.
DVCResult predict_video(DVCModel& model, const VideoTensors& video, const TextVocabulary& vocab,
                        std::int64_t max_caption_len);

}  // namespace semdvc::model
