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

#include <array>
#include <span>
#include <string>
#include <vector>

#include "semdvc/dataset.h"
#include "semdvc/ranking.h"
#include "semdvc/text.h"

namespace semdvc {

inline const std::vector<double> kDefaultTiouThresholds = {0.3, 0.5, 0.7, 0.9};

// Temporal IoU of two ordered intervals; 0 when the union is empty.
double tiou(const TimeStamp& a, const TimeStamp& b);

// Generalized IoU over 1-D intervals: IoU - (hull - union) / hull.
// Two zero-length intervals at the same point score 1; otherwise an empty
// hull yields 0.
double giou_1d(const TimeStamp& pred, const TimeStamp& gt);

inline constexpr double kFocalEpsilon = 1e-7;

// Mean over elements of
//   -a y (1-p)^g log p - (1-a) (1-y) p^g log(1-p),
// with p clamped to [eps, 1 - eps].
double focal_loss(std::span<const double> probs, std::span<const double> targets, double gamma, double alpha);

double bleu4(const Tokens& candidate, const Tokens& reference);

// Exact-match METEOR variant (no stemming or synonyms); reported as "METEOR-exact".
double meteor_exact(const Tokens& candidate, const Tokens& reference);

// CIDEr with idf taken from the reference corpus; per-event scores averaged.
// Returns per-event scores (x10 scale).
std::vector<double> cider_scores(const std::vector<Tokens>& candidates, const std::vector<Tokens>& references);
double cider(const std::vector<Tokens>& candidates, const std::vector<Tokens>& references);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

// Per threshold, averaged over thresholds and then over videos that have at
// least one ground-truth event. A video without predictions scores P = R = 0.
PrecisionRecall localization_pr(const std::vector<DVCResult>& results,
                                const std::vector<GroundTruthVideo>& ground_truth,
                                const std::vector<double>& thresholds = kDefaultTiouThresholds);

struct ThresholdScores {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double bleu4 = 0.0;
  double meteor_exact = 0.0;
  double cider = 0.0;
  std::size_t matched_pairs = 0;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double bleu4 = 0.0;
  double meteor_exact = 0.0;
  double cider = 0.0;
  std::vector<ThresholdScores> per_threshold;

  std::string to_json() const;
  // Plain-text table with columns P, R, B4, M-exact, C.
  std::string to_table() const;
};

// Each prediction pairs with its max-tIoU ground truth when that tIoU reaches
// the threshold; caption metrics are averaged over all predictions with
// unmatched predictions scoring 0, then averaged over thresholds.
EvalReport evaluate_dvc(const std::vector<DVCResult>& results, const std::vector<GroundTruthVideo>& ground_truth,
                        const std::vector<double>& thresholds = kDefaultTiouThresholds);

}  // namespace semdvc
