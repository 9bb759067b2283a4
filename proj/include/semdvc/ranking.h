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

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "semdvc/dataset.h"
#include "semdvc/text.h"

namespace semdvc {

// Decoded output of one event query.
struct QueryDecode {
  double start_norm = 0.0;  // [0, 1]
  double end_norm = 0.0;    // [0, 1]
  Tokens caption;           // without the end token
  // Log-probability of every emitted token including the end token (if emitted).
  std::vector<double> token_logprobs;
  // Empty when the classification head is disabled.
  std::vector<float> label_probs;
};

struct CounterOutput {
  std::vector<double> probs;  // length maxEvents + 1
  std::size_t count = 0;      // argmax, lowest index wins ties
};

// Argmax with lowest-index tie-break.
std::size_t counter_argmax(const std::vector<double>& probs);

struct EventPrediction {
  std::size_t query_index = 0;
  TimeStamp timestamp;  // seconds
  Tokens caption;
  std::vector<int> labels;  // labels with probability >= 0.5
  std::vector<float> label_probs;
  double confidence = 0.0;
};

struct DVCResult {
  std::string video_id;
  std::vector<EventPrediction> events;  // confidence non-increasing
  std::size_t count = 0;
};

double classification_confidence(const QueryDecode& q);
// exp(mean token log-probability); 0 for a query that emitted nothing.
double captioning_confidence(const QueryDecode& q);

// Ranks queries by classification + captioning confidence (ties: lower query
// index first) and keeps the counter's top K. K > N is clamped to N.
// Normalized times are scaled by `span` seconds (defaults to the duration;
// longer when the feature sequence was padded) and clamped to [0, duration].
DVCResult rank_and_select(const std::string& video_id, const std::vector<QueryDecode>& queries,
                          const CounterOutput& counter, double duration, double span = 0.0);

// Submission-shaped JSON:
// {videoId: [{"sentence", "timestamp": [s, e], "labels": [..], "score"}]}
void write_predictions(const std::filesystem::path& path, const std::vector<DVCResult>& results);
std::vector<DVCResult> read_predictions(const std::filesystem::path& path);
std::string predictions_to_json(const std::vector<DVCResult>& results);

}  // namespace semdvc
